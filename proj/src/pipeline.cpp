#include "ggd/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ggd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// FNV-1a, used only to name checkpoint files.
class Fingerprint {
 public:
  Fingerprint& add(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ull;
    }
    return *this;
  }
  template <class T>
  Fingerprint& add(const T& value) {
    return add(&value, sizeof value);
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

std::string stage_key(const Image& noisy, const DenoiseConfig& c) {
  Fingerprint f;
  f.add(noisy.values().data(), noisy.values().size_bytes());
  f.add(c.method).add(c.rho).add(c.delta);
  if (c.method == Method::gld) f.add(c.beta).add(c.gamma).add(c.gld_intensity_scale);
  return f.hex();
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "ggd") return Method::ggd;
  if (name == "gld") return Method::gld;
  throw std::invalid_argument("unknown method '" + name + "' (expected ggd or gld)");
}

std::string to_string(Method method) { return method == Method::ggd ? "ggd" : "gld"; }

std::string format_bytes(std::size_t bytes) {
  const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB"};
  double v = double(bytes);
  int u = 0;
  while (v >= 1024.0 && u < 4) {
    v /= 1024.0;
    ++u;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, u == 0 ? "%.0f %s" : "%.1f %s", v, units[u]);
  return buf;
}

MemoryEstimate estimate_memory(std::size_t n, std::size_t rho, std::size_t delta) {
  MemoryEstimate e;
  e.vertices = n * n;
  e.distance_bytes = PackedSymmetric::packed_length(e.vertices) * sizeof(double);
  e.patch_bytes = e.vertices * rho * rho * sizeof(double);
  // Symmetrised k-NN graph: at most 2 delta half-edges per vertex.
  e.graph_bytes = e.vertices * 2 * delta * (sizeof(std::uint32_t) + sizeof(double));
  return e;
}

void DenoiseConfig::validate(std::size_t n) const {
  validate_patch_side(rho, n);
  const std::size_t vertices = n * n;
  if (delta < 1 || delta >= vertices)
    throw std::invalid_argument("neighbour count must satisfy 1 <= delta < n^2");
  if (L < 1 || L > vertices)
    throw std::invalid_argument("eigenvector threshold must satisfy 1 <= L <= n^2");
  if (method == Method::gld) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (!(gld_intensity_scale > 0.0)) throw std::invalid_argument("intensity scale must be > 0");
  }
  if (vertices > kVertexGuard && !override_memory_guard) {
    const auto e = estimate_memory(n, rho, delta);
    throw std::invalid_argument(
        "image has " + std::to_string(vertices) + " pixels (limit " +
        std::to_string(kVertexGuard) + "); the geodesic matrix alone needs " +
        format_bytes(e.distance_bytes) + ". Pass the memory-guard override to proceed.");
  }
}

Metric metric_for(const DenoiseConfig& config) {
  return config.method == Method::ggd ? Metric::euclidean()
                                      : Metric::gld(config.beta, config.gld_intensity_scale);
}

SpectralStage prepare_stage(const Image& noisy, const DenoiseConfig& config,
                            std::size_t basis_count, const StageReuse& reuse) {
  const auto start = Clock::now();
  config.validate(noisy.side());
  if (basis_count < 1 || basis_count > noisy.pixel_count())
    throw std::invalid_argument("basis size must satisfy 1 <= L <= n^2");

  SpectralStage stage;
  stage.method = config.method;
  stage.patches = extract_patches(noisy, config.rho);

  std::optional<std::filesystem::path> geo_file, basis_file;
  if (reuse.checkpoint_dir) {
    std::filesystem::create_directories(*reuse.checkpoint_dir);
    const std::string key = stage_key(noisy, config);
    geo_file = *reuse.checkpoint_dir / ("geodesic_" + key + ".ggd");
    basis_file = *reuse.checkpoint_dir /
                 ("basis_" + key + "_" + to_string(config.method) + "_" +
                  std::to_string(basis_count) + ".ggb");
    if (std::filesystem::exists(*basis_file) && !config.report_min_eigenvalue) {
      stage.basis = load_basis(*basis_file);
      if (stage.basis.count() == basis_count && stage.basis.dimension() == noisy.pixel_count()) {
        stage.seconds = seconds_since(start);
        return stage;
      }
    }
  }

  const auto graph_for = [&]() {
    const Metric metric = metric_for(config);
    if (reuse.knn && reuse.knn->k >= config.delta && reuse.knn->vertex_count == noisy.pixel_count())
      return graph_from_knn(*reuse.knn, config.delta);
    return build_knn_graph(stage.patches, config.delta, metric);
  };

  if (config.method == Method::ggd) {
    GeodesicDistances geodesics;
    if (geo_file && std::filesystem::exists(*geo_file)) {
      geodesics = load_geodesics(*geo_file);
    } else {
      const PatchGraph graph = graph_for();
      geodesics = all_pairs_shortest_paths(graph, config.backend, &stage.diagnostics);
      if (geo_file) save_geodesics(geodesics, *geo_file);
    }
    stage.unreachable_pairs = geodesics.unreachable_pairs;
    const GramianMatrix gram = gramian_from_distances(std::move(geodesics));
    stage.basis = top_eigenpairs(gram.values, basis_count, Selection::largest, config.eigen);
    stage.basis.source = BasisSource::gramian;
    if (config.report_min_eigenvalue) {
      const auto lowest = top_eigenpairs(gram.values, 1, Selection::smallest, config.eigen);
      stage.min_eigenvalue = lowest.values.front();
    }
  } else {
    const PatchGraph graph = graph_for();
    const GldWeights weights = gld_weight_matrix(graph, config.gamma);
    const SparseSymmetric laplacian = graph_laplacian(weights);
    stage.basis = top_eigenpairs(laplacian, basis_count, Selection::smallest, config.eigen);
    stage.basis.source = BasisSource::laplacian;
  }
  if (basis_file) save_basis(stage.basis, *basis_file);
  stage.seconds = seconds_since(start);
  return stage;
}

Image reconstruct(const SpectralStage& stage, std::size_t L) {
  // Gramian eigenvectors are orthogonal to the constant vector (it spans the
  // Gramian's null space after double centring), so each slot's mean is
  // carried through explicitly. The Laplacian basis already contains the
  // degree-weighted constant direction.
  const SlotCentering centering =
      stage.method == Method::ggd ? SlotCentering::mean : SlotCentering::none;
  return merge_patches(denoise_patches(stage.patches, stage.basis, L, centering));
}

DenoiseResult denoise(const Image& noisy, const DenoiseConfig& config, const StageReuse& reuse) {
  const auto start = Clock::now();
  SpectralStage stage = prepare_stage(noisy, config, config.L, reuse);
  DenoiseResult result{reconstruct(stage, config.L), std::move(stage.diagnostics),
                       stage.min_eigenvalue, 0.0};
  result.seconds = seconds_since(start);
  return result;
}

Image ggd_denoise(const Image& noisy, const DenoiseConfig& config) {
  if (config.method != Method::ggd) throw std::invalid_argument("ggd_denoise needs method = ggd");
  DenoiseResult r = denoise(noisy, config);
  for (const auto& w : r.diagnostics.warnings) report_warning(nullptr, w);
  return std::move(r.image);
}

Image gld_denoise(const Image& noisy, const DenoiseConfig& config) {
  if (config.method != Method::gld) throw std::invalid_argument("gld_denoise needs method = gld");
  DenoiseResult r = denoise(noisy, config);
  for (const auto& w : r.diagnostics.warnings) report_warning(nullptr, w);
  return std::move(r.image);
}

}  // namespace ggd
