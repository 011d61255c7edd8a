#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ggd/diagnostics.hpp"
#include "ggd/graph.hpp"
#include "ggd/image.hpp"
#include "ggd/patch.hpp"
#include "ggd/spectral.hpp"

namespace ggd {

enum class Method { ggd, gld };

Method parse_method(const std::string& name);
std::string to_string(Method method);

/// Images with more pixels than this need an explicit override: the dense
/// geodesic matrix grows with the square of the pixel count.
inline constexpr std::size_t kVertexGuard = 40000;

struct DenoiseConfig {
  Method method = Method::ggd;
  std::size_t rho = 5;
  std::size_t delta = 10;
  std::size_t L = 15;
  /// GLD only.
  double beta = 3.0;
  double gamma = 5.0;
  /// GLD measures patch differences on this intensity scale (pixel
  /// coordinates stay in pixel units), so gamma and beta are unit-free.
  double gld_intensity_scale = 1.0 / 255.0;
  ApspBackend backend = ApspBackend::dijkstra;
  EigenOptions eigen;
  bool override_memory_guard = false;
  /// Also compute the most negative Gramian eigenvalue (GGD only; one more
  /// eigensolve).
  bool report_min_eigenvalue = false;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate(std::size_t n) const;
};

struct MemoryEstimate {
  std::size_t vertices = 0;
  std::size_t distance_bytes = 0;  // packed geodesic / Gramian matrix
  std::size_t patch_bytes = 0;
  std::size_t graph_bytes = 0;
  std::size_t total_bytes() const { return distance_bytes + patch_bytes + graph_bytes; }
  bool exceeds_guard() const { return vertices > kVertexGuard; }
};

/// Projected peak footprint of a GGD run on an n x n image, computed without
/// allocating anything.
MemoryEstimate estimate_memory(std::size_t n, std::size_t rho, std::size_t delta);

std::string format_bytes(std::size_t bytes);

/// Everything up to (but excluding) the projection: patches and the spectral
/// basis with `basis_count` vectors. Reconstructing with any L <= basis_count
/// reuses it.
struct SpectralStage {
  Method method = Method::ggd;
  PatchSet patches;
  SpectralBasis basis;
  std::optional<double> min_eigenvalue;
  std::size_t unreachable_pairs = 0;
  Diagnostics diagnostics;
  double seconds = 0.0;
};

/// Optional reuse of intermediate results across runs.
struct StageReuse {
  /// Precomputed neighbour table over the same noisy image, rho and metric
  /// with k >= delta.
  const KnnTable* knn = nullptr;
  /// Directory for geodesic / basis checkpoints (created when missing).
  std::optional<std::filesystem::path> checkpoint_dir;
};

/// Neighbour metric a config uses.
Metric metric_for(const DenoiseConfig& config);

SpectralStage prepare_stage(const Image& noisy, const DenoiseConfig& config,
                            std::size_t basis_count, const StageReuse& reuse = {});

/// Projection with the first L basis vectors followed by the Shepard merge.
Image reconstruct(const SpectralStage& stage, std::size_t L);

struct DenoiseResult {
  Image image;
  Diagnostics diagnostics;
  std::optional<double> min_eigenvalue;
  double seconds = 0.0;
};

DenoiseResult denoise(const Image& noisy, const DenoiseConfig& config,
                      const StageReuse& reuse = {});

/// Geodesic Gramian denoising end to end. Requires config.method == ggd.
Image ggd_denoise(const Image& noisy, const DenoiseConfig& config);

/// Graph Laplacian baseline end to end. Requires config.method == gld.
Image gld_denoise(const Image& noisy, const DenoiseConfig& config);

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepGrid {
  std::vector<double> epsilons;
  std::vector<std::size_t> rhos;
  std::vector<std::size_t> deltas;
  std::vector<std::size_t> Ls;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  double beta = 3.0;
  double gamma = 5.0;
  ApspBackend backend = ApspBackend::dijkstra;
  EigenOptions eigen;
  bool override_memory_guard = false;
  std::optional<std::filesystem::path> checkpoint_dir;

  std::size_t cell_count() const;
};

struct SweepRow {
  Method method = Method::ggd;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t rho = 0;
  std::size_t delta = 0;
  std::size_t L = 0;
  std::optional<double> beta;   // GLD only
  std::optional<double> gamma;  // GLD only
  double delta_input = 0.0;
  std::optional<double> delta_output;  // empty when the run failed
  double wall_time_s = 0.0;
  std::string error;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  static constexpr const char* kCsvHeader =
      "method,epsilon,seed,rho,delta,L,beta,gamma,delta_input,delta_output,wall_time_s";

  /// Header plus one line per row; "NA" marks inapplicable or missing values.
  void write_csv(std::ostream& out) const;
};

using SweepProgress = std::function<void(const SweepRow&)>;

/// Runs the Cartesian product of the grid: `source` is corrupted per
/// (epsilon, seed) and errors are measured against `reference` (defaults to
/// `source`). Rows sharing everything but L share one spectral stage; rows
/// sharing (epsilon, seed, method, rho) share one neighbour table. Failures
/// are recorded per row. Rows come back sorted by grid coordinates. Throws
/// std::invalid_argument only for an empty grid list or mismatched images.
SweepReport run_sweep(const Image& source, const SweepGrid& grid,
                      const SweepProgress& progress = {}, const Image* reference = nullptr);

// ---------------------------------------------------------------------------
// Synthetic test images
// ---------------------------------------------------------------------------

namespace synthetic {
Image constant(std::size_t n, double value);
Image checkerboard(std::size_t n, std::size_t cell, double low = 40.0, double high = 210.0);
Image gradient(std::size_t n);
/// Sum of `count` Gaussian blobs with seeded centres and widths on a dark
/// background.
Image gaussian_blobs(std::size_t n, std::size_t count, std::uint64_t seed);
/// Blobs + a few hard-edged rectangles; the default test scene.
Image scene(std::size_t n, std::uint64_t seed = 7);
}  // namespace synthetic

}  // namespace ggd
