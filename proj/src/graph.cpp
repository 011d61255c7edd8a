#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ggd/graph.hpp"

namespace ggd {

PatchGraph PatchGraph::from_edges(std::size_t vertex_count, std::span<const Edge> edges,
                                  Metric metric) {
  struct Half {
    std::uint32_t from, to;
    double w;
  };
  std::vector<Half> halves;
  halves.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u >= vertex_count || e.v >= vertex_count)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop on vertex " + std::to_string(e.u));
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument("edge weights must be finite and nonnegative");
    halves.push_back({e.u, e.v, e.weight});
    halves.push_back({e.v, e.u, e.weight});
  }
  std::sort(halves.begin(), halves.end(), [](const Half& a, const Half& b) {
    return a.from != b.from ? a.from < b.from : a.to != b.to ? a.to < b.to : a.w < b.w;
  });
  // Duplicates are adjacent with the lightest first.
  halves.erase(std::unique(halves.begin(), halves.end(),
                           [](const Half& a, const Half& b) {
                             return a.from == b.from && a.to == b.to;
                           }),
               halves.end());

  PatchGraph g;
  g.metric_ = metric;
  g.offsets_.assign(vertex_count + 1, 0);
  for (const Half& h : halves) ++g.offsets_[h.from + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.targets_.reserve(halves.size());
  g.weights_.reserve(halves.size());
  for (const Half& h : halves) {
    g.targets_.push_back(h.to);
    g.weights_.push_back(h.w);
  }
  return g;
}

double PatchGraph::edge_weight(std::size_t u, std::size_t v) const {
  const auto nb = neighbors(u);
  const auto it = std::lower_bound(nb.begin(), nb.end(), std::uint32_t(v));
  if (it == nb.end() || *it != v) return -1.0;
  return weights(u)[std::size_t(it - nb.begin())];
}

std::size_t PatchGraph::component_count() const {
  const std::size_t n = vertex_count();
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> stack;
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(std::uint32_t(s));
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto t : neighbors(v))
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
    }
  }
  return components;
}

PatchGraph graph_from_knn(const KnnTable& table, std::size_t delta) {
  if (delta < 1 || delta > table.k)
    throw std::invalid_argument("neighbour count " + std::to_string(delta) +
                                " not available in a table of " + std::to_string(table.k));
  std::vector<Edge> edges;
  edges.reserve(table.vertex_count * delta);
  for (std::size_t v = 0; v < table.vertex_count; ++v) {
    const auto nb = table.neighbors_of(v);
    const auto d = table.distances_of(v);
    for (std::size_t r = 0; r < delta; ++r) edges.push_back({std::uint32_t(v), nb[r], d[r]});
  }
  return PatchGraph::from_edges(table.vertex_count, edges, table.metric);
}

PatchGraph build_knn_graph(const PatchSet& patches, std::size_t delta, const Metric& metric) {
  return graph_from_knn(knn_table(patches, delta, metric), delta);
}

SparseSymmetric::SparseSymmetric(std::size_t size, std::vector<std::size_t> offsets,
                                 std::vector<std::uint32_t> columns, std::vector<double> values)
    : size_(size),
      offsets_(std::move(offsets)),
      columns_(std::move(columns)),
      values_(std::move(values)) {
  if (offsets_.size() != size_ + 1 || columns_.size() != values_.size() ||
      offsets_.back() != values_.size())
    throw std::invalid_argument("inconsistent compressed-row layout");
}

void SparseSymmetric::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != size_ || y.size() != size_)
    throw std::invalid_argument("matrix-vector size mismatch");
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < size_; ++i) {
    double s = 0.0;
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) s += values_[p] * x[columns_[p]];
    y[i] = s;
  }
}

double SparseSymmetric::operator()(std::size_t i, std::size_t j) const {
  const auto cols = columns(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), std::uint32_t(j));
  if (it == cols.end() || *it != j) return 0.0;
  return row_values(i)[std::size_t(it - cols.begin())];
}

double SparseSymmetric::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

GldWeights gld_weight_matrix(const PatchGraph& graph, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
  if (graph.metric().kind != MetricKind::gld_penalized)
    throw std::invalid_argument("GLD weights need a graph built with the penalised metric");
  const std::size_t n = graph.vertex_count();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> columns;
  std::vector<double> values;
  std::vector<double> degrees(n, 0.0);
  const double inv_g2 = 1.0 / (gamma * gamma);
  for (std::size_t v = 0; v < n; ++v) {
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const double weight = std::exp(-w[e] * w[e] * inv_g2);
      columns.push_back(nb[e]);
      values.push_back(weight);
      degrees[v] += weight;
    }
    offsets[v + 1] = columns.size();
  }
  return {gamma, SparseSymmetric(n, std::move(offsets), std::move(columns), std::move(values)),
          std::move(degrees)};
}

SparseSymmetric graph_laplacian(const GldWeights& weights) {
  const SparseSymmetric& w = weights.weights;
  const std::size_t n = w.size();
  std::vector<double> inv_sqrt(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!(weights.degrees[v] > 0.0))
      throw std::invalid_argument("isolated vertex " + std::to_string(v) +
                                  " (zero degree) in graph Laplacian");
    inv_sqrt[v] = 1.0 / std::sqrt(weights.degrees[v]);
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> columns;
  std::vector<double> values;
  columns.reserve(w.nonzeros() + n);
  values.reserve(w.nonzeros() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = w.columns(i);
    const auto vals = w.row_values(i);
    bool diagonal_done = false;
    for (std::size_t p = 0; p <= cols.size(); ++p) {
      if (!diagonal_done && (p == cols.size() || cols[p] > i)) {
        columns.push_back(std::uint32_t(i));
        values.push_back(1.0);
        diagonal_done = true;
      }
      if (p == cols.size()) break;
      columns.push_back(cols[p]);
      values.push_back(-vals[p] * (inv_sqrt[i] * inv_sqrt[cols[p]]));  // symmetric rounding
    }
    offsets[i + 1] = columns.size();
  }
  return SparseSymmetric(n, std::move(offsets), std::move(columns), std::move(values));
}

}  // namespace ggd
