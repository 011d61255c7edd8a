#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "binary_io.hpp"
#include "ggd/graph.hpp"

namespace ggd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kFloydLimit = 8192;  // dense n x n working matrix

using HeapEntry = std::pair<double, std::uint32_t>;

// Min-heap over a caller-owned buffer so per-source runs reuse the storage.
class MinHeap {
 public:
  void push(double d, std::uint32_t v) {
    items_.emplace_back(d, v);
    std::push_heap(items_.begin(), items_.end(), std::greater<>{});
  }
  HeapEntry pop() {
    std::pop_heap(items_.begin(), items_.end(), std::greater<>{});
    const HeapEntry top = items_.back();
    items_.pop_back();
    return top;
  }
  bool empty() const { return items_.empty(); }
  void clear() { items_.clear(); }

 private:
  std::vector<HeapEntry> items_;
};

void run_dijkstra(const PatchGraph& graph, std::size_t source, std::span<double> dist,
                  MinHeap& heap) {
  std::fill(dist.begin(), dist.end(), kInf);
  heap.clear();
  dist[source] = 0.0;
  heap.push(0.0, std::uint32_t(source));
  while (!heap.empty()) {
    const auto [d, v] = heap.pop();
    if (d > dist[v]) continue;  // stale entry
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const double candidate = d + w[e];
      if (candidate < dist[nb[e]]) {
        dist[nb[e]] = candidate;
        heap.push(candidate, nb[e]);
      }
    }
  }
}

// Replace infinities by 1.5x the largest finite distance.
void fill_unreachable(GeodesicDistances& out, Diagnostics* diag) {
  auto values = out.values.packed();
  double largest = 0.0;
  std::size_t unreachable = 0;
  for (double v : values) {
    if (std::isinf(v))
      ++unreachable;
    else
      largest = std::max(largest, v);
  }
  out.unreachable_pairs = unreachable;
  if (unreachable == 0) return;
  const double fill = largest > 0.0 ? 1.5 * largest : 1.0;
  for (double& v : values)
    if (std::isinf(v)) v = fill;
  report_warning(diag, "graph is disconnected: " + std::to_string(unreachable) +
                           " vertex pairs unreachable, assigned distance " + std::to_string(fill) +
                           " (1.5 x largest finite geodesic)");
}

void check_graph(const PatchGraph& graph) {
  if (graph.vertex_count() == 0) throw std::invalid_argument("empty graph");
}

GeodesicDistances floyd(const PatchGraph& graph, bool parallel) {
  const std::size_t n = graph.vertex_count();
  if (n > kFloydLimit)
    throw std::invalid_argument("Floyd backend limited to " + std::to_string(kFloydLimit) +
                                " vertices; use dijkstra");
  std::vector<double> d(n * n, kInf);
  for (std::size_t v = 0; v < n; ++v) {
    d[v * n + v] = 0.0;
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) d[v * n + nb[e]] = std::min(d[v * n + nb[e]], w[e]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double* row_k = d.data() + k * n;
    // Row k is fixed during pass k because d[k][k] = 0.
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t i = 0; i < n; ++i) {
      double* row_i = d.data() + i * n;
      const double dik = row_i[k];
      if (std::isinf(dik)) continue;
      for (std::size_t j = 0; j < n; ++j) row_i[j] = std::min(row_i[j], dik + row_k[j]);
    }
  }
  GeodesicDistances out{PackedSymmetric(n), 0};
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.values.upper_row(i);
    std::copy(d.begin() + std::ptrdiff_t(i * n + i), d.begin() + std::ptrdiff_t((i + 1) * n),
              row.begin());
  }
  return out;
}

// Each source writes only its own packed row (columns >= source).
GeodesicDistances dijkstra_all(const PatchGraph& graph, bool parallel) {
  const std::size_t n = graph.vertex_count();
  GeodesicDistances out{PackedSymmetric(n), 0};
#pragma omp parallel if (parallel)
  {
    std::vector<double> dist(n);
    MinHeap heap;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t s = 0; s < n; ++s) {
      run_dijkstra(graph, s, dist, heap);
      auto row = out.values.upper_row(s);
      std::copy(dist.begin() + std::ptrdiff_t(s), dist.end(), row.begin());
    }
  }
  return out;
}

GeodesicDistances apsp(const PatchGraph& graph, ApspBackend backend, Diagnostics* diag,
                       bool parallel) {
  check_graph(graph);
  GeodesicDistances out =
      backend == ApspBackend::floyd ? floyd(graph, parallel) : dijkstra_all(graph, parallel);
  fill_unreachable(out, diag);
  return out;
}

}  // namespace

ApspBackend parse_backend(const std::string& name) {
  if (name == "floyd") return ApspBackend::floyd;
  if (name == "dijkstra") return ApspBackend::dijkstra;
  throw std::invalid_argument("unknown shortest-path backend '" + name +
                              "' (expected floyd or dijkstra)");
}

std::string to_string(ApspBackend backend) {
  return backend == ApspBackend::floyd ? "floyd" : "dijkstra";
}

void dijkstra(const PatchGraph& graph, std::size_t source, std::span<double> dist) {
  check_graph(graph);
  if (source >= graph.vertex_count()) throw std::out_of_range("source vertex out of range");
  if (dist.size() != graph.vertex_count()) throw std::invalid_argument("distance buffer size");
  MinHeap heap;
  run_dijkstra(graph, source, dist, heap);
}

GeodesicDistances all_pairs_shortest_paths(const PatchGraph& graph, ApspBackend backend,
                                           Diagnostics* diag) {
  return apsp(graph, backend, diag, true);
}

namespace serial {
GeodesicDistances all_pairs_shortest_paths(const PatchGraph& graph, ApspBackend backend,
                                           Diagnostics* diag) {
  return apsp(graph, backend, diag, false);
}
}  // namespace serial

void save_geodesics(const GeodesicDistances& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("GGD1", 4);
  detail::write_u64(out, d.size());
  detail::write_f64_array(out, d.values.packed());
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GeodesicDistances load_geodesics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  detail::expect_magic(in, "GGD1");
  const auto size = detail::read_u64(in);
  if (size > (std::uint64_t(1) << 20)) throw std::runtime_error("implausible matrix order");
  std::vector<double> packed(PackedSymmetric::packed_length(size));
  detail::read_f64_array(in, packed);
  return {PackedSymmetric(size, std::move(packed)), 0};
}

}  // namespace ggd
