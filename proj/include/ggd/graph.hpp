#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ggd/diagnostics.hpp"
#include "ggd/packed.hpp"
#include "ggd/patch.hpp"

namespace ggd {

// ---------------------------------------------------------------------------
// Distances in patch space
// ---------------------------------------------------------------------------

/// Euclidean distance between two flattened patches.
double patch_distance(std::span<const double> a, std::span<const double> b);

/// Pixel coordinate (row, col) in pixel units.
using PixelCoord = std::array<double, 2>;

/// Patch distance plus beta times the image-domain distance of the centres.
double gld_distance(std::span<const double> a, std::span<const double> b, PixelCoord xa,
                    PixelCoord xb, double beta);

enum class MetricKind { patch_euclidean, gld_penalized };

struct Metric {
  MetricKind kind = MetricKind::patch_euclidean;
  /// Image-domain penalty (gld_penalized only).
  double beta = 0.0;
  /// Multiplies the patch-space term of gld_penalized, e.g. 1/255 to measure
  /// intensities on a unit scale while pixel coordinates stay in pixels.
  double intensity_scale = 1.0;

  static Metric euclidean() { return {}; }
  static Metric gld(double beta, double intensity_scale = 1.0) {
    return {MetricKind::gld_penalized, beta, intensity_scale};
  }
};

// ---------------------------------------------------------------------------
// k-nearest-neighbour graph
// ---------------------------------------------------------------------------

/// The `k` nearest neighbours of every vertex, sorted by (distance, index).
/// Built once with the largest neighbour count a sweep needs; smaller counts
/// take prefixes.
struct KnnTable {
  std::size_t vertex_count = 0;
  std::size_t k = 0;
  Metric metric;
  std::vector<std::uint32_t> neighbors;  // vertex_count x k
  std::vector<double> distances;         // vertex_count x k

  std::span<const std::uint32_t> neighbors_of(std::size_t v) const {
    return {neighbors.data() + v * k, k};
  }
  std::span<const double> distances_of(std::size_t v) const { return {distances.data() + v * k, k}; }
};

/// Exact brute-force k-NN over the patch set (blocked, parallel over rows).
/// Ties are broken by the smaller vertex index.
KnnTable knn_table(const PatchSet& patches, std::size_t k, const Metric& metric);

namespace serial {
KnnTable knn_table(const PatchSet& patches, std::size_t k, const Metric& metric);
}

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double weight = 0.0;
};

/// Undirected weighted graph in compressed-row form; both directions of every
/// edge are stored.
class PatchGraph {
 public:
  PatchGraph() = default;

  /// Builds a symmetric graph from an undirected edge list. Parallel edges keep
  /// the smaller weight. Throws on self-loops, negative or non-finite weights
  /// and out-of-range endpoints.
  static PatchGraph from_edges(std::size_t vertex_count, std::span<const Edge> edges,
                               Metric metric = Metric::euclidean());

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  const Metric& metric() const noexcept { return metric_; }

  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(std::size_t v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Weight of edge (u, v); negative when absent.
  double edge_weight(std::size_t u, std::size_t v) const;

  /// Number of connected components.
  std::size_t component_count() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
  Metric metric_;
};

/// OR-symmetrised graph over the first `delta` neighbours of every vertex.
PatchGraph graph_from_knn(const KnnTable& table, std::size_t delta);

/// knn_table followed by graph_from_knn. Requires 1 <= delta < n^2.
PatchGraph build_knn_graph(const PatchSet& patches, std::size_t delta, const Metric& metric);

// ---------------------------------------------------------------------------
// All-pairs shortest paths
// ---------------------------------------------------------------------------

enum class ApspBackend { floyd, dijkstra };

ApspBackend parse_backend(const std::string& name);
std::string to_string(ApspBackend backend);

/// Shortest-path lengths between all vertex pairs (packed symmetric).
struct GeodesicDistances {
  PackedSymmetric values;
  /// Vertex pairs that were unreachable and received the inflated distance.
  std::size_t unreachable_pairs = 0;

  std::size_t size() const noexcept { return values.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values(i, j); }
};

/// Exact all-pairs shortest paths. Unreachable pairs are assigned 1.5 times
/// the largest finite distance and reported through `diag`.
GeodesicDistances all_pairs_shortest_paths(const PatchGraph& graph, ApspBackend backend,
                                           Diagnostics* diag = nullptr);

/// Single-source Dijkstra with a binary heap; distances to every vertex
/// (infinity when unreachable).
void dijkstra(const PatchGraph& graph, std::size_t source, std::span<double> dist);

namespace serial {
GeodesicDistances all_pairs_shortest_paths(const PatchGraph& graph, ApspBackend backend,
                                           Diagnostics* diag = nullptr);
}

/// Binary checkpoint: "GGD1", u64 size, packed upper triangle as f64, all
/// little-endian.
void save_geodesics(const GeodesicDistances& d, const std::filesystem::path& path);
GeodesicDistances load_geodesics(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Graph Laplacian baseline
// ---------------------------------------------------------------------------

/// Sparse symmetric matrix in compressed-row form (full pattern stored).
class SparseSymmetric {
 public:
  SparseSymmetric() = default;
  SparseSymmetric(std::size_t size, std::vector<std::size_t> offsets,
                  std::vector<std::uint32_t> columns, std::vector<double> values);

  std::size_t size() const noexcept { return size_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Entry (i, j); zero outside the pattern.
  double operator()(std::size_t i, std::size_t j) const;
  double frobenius_norm() const;

  std::span<const std::uint32_t> columns(std::size_t i) const {
    return {columns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> columns_;
  std::vector<double> values_;
};

/// Gaussian edge weights W(k, k') = exp(-d^2 / gamma^2) on graph edges, zero
/// elsewhere, with the vertex degrees D[k] = sum_k' W(k, k').
struct GldWeights {
  double gamma = 0.0;
  SparseSymmetric weights;
  std::vector<double> degrees;
};

/// Requires gamma > 0 and a graph built with the gld_penalized metric.
GldWeights gld_weight_matrix(const PatchGraph& graph, double gamma);

/// Symmetric normalised Laplacian I - D^{-1/2} W D^{-1/2}. Throws when a
/// vertex has zero degree.
SparseSymmetric graph_laplacian(const GldWeights& weights);

}  // namespace ggd
