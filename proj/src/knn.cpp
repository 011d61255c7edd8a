#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "ggd/graph.hpp"

namespace ggd {

double patch_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("patch dimension mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

double gld_distance(std::span<const double> a, std::span<const double> b, PixelCoord xa,
                    PixelCoord xb, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  return patch_distance(a, b) + beta * std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
}

namespace {

constexpr std::size_t kBlockRows = 32;

using Candidate = std::pair<double, std::uint32_t>;  // (selection key, vertex)

void check_metric(const Metric& metric) {
  if (metric.kind == MetricKind::gld_penalized && !(metric.beta >= 0.0))
    throw std::invalid_argument("beta must be >= 0");
  if (!(metric.intensity_scale > 0.0)) throw std::invalid_argument("intensity scale must be > 0");
}

// Squared patch distances from rows [begin, begin + rows) to every vertex. The
// block is transposed (component-major) so the innermost loop runs across the
// block rows and vectorises without reassociating any per-pair sum: each
// pair still accumulates its components in order 0..dim-1.
void block_squared_distances(const PatchSet& patches, std::size_t begin, std::size_t rows,
                             std::vector<double>& block_t, std::vector<double>& out) {
  const std::size_t dim = patches.dimension(), n2 = patches.count();
  block_t.assign(dim * kBlockRows, 0.0);
  for (std::size_t b = 0; b < rows; ++b) {
    const auto p = patches.patch(begin + b);
    for (std::size_t c = 0; c < dim; ++c) block_t[c * kBlockRows + b] = p[c];
  }
  out.resize(kBlockRows * n2);
  double acc[kBlockRows];
  for (std::size_t j = 0; j < n2; ++j) {
    const double* pj = patches.patch(j).data();
    std::fill(std::begin(acc), std::end(acc), 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
      const double v = pj[c];
      const double* col = block_t.data() + c * kBlockRows;
      for (std::size_t b = 0; b < kBlockRows; ++b) {
        const double d = col[b] - v;
        acc[b] += d * d;
      }
    }
    for (std::size_t b = 0; b < rows; ++b) out[b * n2 + j] = acc[b];
  }
}

// Metric distance from a squared patch distance.
double metric_distance(const Metric& metric, double squared, std::size_t i, std::size_t j,
                       std::size_t n) {
  if (metric.kind == MetricKind::patch_euclidean) return std::sqrt(squared);
  const double dr = double(i / n) - double(j / n);
  const double dc = double(i % n) - double(j % n);
  return metric.intensity_scale * std::sqrt(squared) + metric.beta * std::hypot(dr, dc);
}

void select_neighbors(const Metric& metric, std::size_t vertex, std::span<const double> squared,
                      std::size_t n, std::size_t k, std::vector<Candidate>& scratch,
                      KnnTable& table) {
  const bool euclidean = metric.kind == MetricKind::patch_euclidean;
  scratch.clear();
  for (std::size_t j = 0; j < squared.size(); ++j) {
    if (j == vertex) continue;
    // Euclidean selection runs on squared distances (monotone); the penalised
    // metric is not a function of the squared term alone.
    const double key = euclidean ? squared[j] : metric_distance(metric, squared[j], vertex, j, n);
    scratch.emplace_back(key, std::uint32_t(j));
  }
  std::nth_element(scratch.begin(), scratch.begin() + std::ptrdiff_t(k - 1), scratch.end());
  std::sort(scratch.begin(), scratch.begin() + std::ptrdiff_t(k));
  for (std::size_t r = 0; r < k; ++r) {
    const auto [key, j] = scratch[r];
    table.neighbors[vertex * k + r] = j;
    table.distances[vertex * k + r] = euclidean ? std::sqrt(key) : key;
  }
}

KnnTable empty_table(const PatchSet& patches, std::size_t k, const Metric& metric) {
  check_metric(metric);
  const std::size_t n2 = patches.count();
  if (k < 1 || k >= n2)
    throw std::invalid_argument("neighbour count must satisfy 1 <= delta < n^2 (delta = " +
                                std::to_string(k) + ", n^2 = " + std::to_string(n2) + ")");
  if (n2 > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("too many patches for 32-bit vertex ids");
  KnnTable table;
  table.vertex_count = n2;
  table.k = k;
  table.metric = metric;
  table.neighbors.resize(n2 * k);
  table.distances.resize(n2 * k);
  return table;
}

void process_block(const PatchSet& patches, const Metric& metric, std::size_t block,
                   std::vector<double>& block_t, std::vector<double>& squared,
                   std::vector<Candidate>& scratch, KnnTable& table) {
  const std::size_t n2 = patches.count();
  const std::size_t begin = block * kBlockRows;
  const std::size_t rows = std::min(kBlockRows, n2 - begin);
  block_squared_distances(patches, begin, rows, block_t, squared);
  for (std::size_t b = 0; b < rows; ++b)
    select_neighbors(metric, begin + b, {squared.data() + b * n2, n2}, patches.side(), table.k,
                     scratch, table);
}

}  // namespace

KnnTable knn_table(const PatchSet& patches, std::size_t k, const Metric& metric) {
  KnnTable table = empty_table(patches, k, metric);
  const std::size_t blocks = (patches.count() + kBlockRows - 1) / kBlockRows;
#pragma omp parallel
  {
    std::vector<double> block_t, squared;
    std::vector<Candidate> scratch;
#pragma omp for schedule(dynamic, 1)
    for (std::size_t block = 0; block < blocks; ++block)
      process_block(patches, metric, block, block_t, squared, scratch, table);
  }
  return table;
}

namespace serial {

KnnTable knn_table(const PatchSet& patches, std::size_t k, const Metric& metric) {
  KnnTable table = empty_table(patches, k, metric);
  const std::size_t n2 = patches.count();
  std::vector<double> squared(n2);
  std::vector<Candidate> scratch;
  // Straightforward per-vertex scan, one pair at a time.
  for (std::size_t i = 0; i < n2; ++i) {
    const auto pi = patches.patch(i);
    for (std::size_t j = 0; j < n2; ++j) {
      const auto pj = patches.patch(j);
      double s = 0.0;
      for (std::size_t c = 0; c < pi.size(); ++c) {
        const double d = pi[c] - pj[c];
        s += d * d;
      }
      squared[j] = s;
    }
    select_neighbors(metric, i, squared, patches.side(), k, scratch, table);
  }
  return table;
}

}  // namespace serial

}  // namespace ggd
