#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggd/graph.hpp"
#include "ggd/packed.hpp"
#include "ggd/patch.hpp"

namespace ggd {

/// Double-centred geodesic distances (packed symmetric).
struct GramianMatrix {
  PackedSymmetric values;

  std::size_t size() const noexcept { return values.size(); }
};

/// G[i,j] = -1/2 (D[i,j] - mean_i - mean_j + mean), computed in place over the
/// distance buffer. Throws std::invalid_argument on non-finite input.
GramianMatrix gramian_from_distances(GeodesicDistances distances);

enum class BasisSource : std::uint64_t { gramian = 0, laplacian = 1 };
enum class Selection { largest, smallest };
enum class EigenSolver { automatic, lanczos, dense };

EigenSolver parse_solver(const std::string& name);

/// Leading eigenpairs of a symmetric matrix. Column l of `vectors` is the
/// eigenvector for values[l]; values are ordered by the selection rule
/// (descending for `largest`, ascending for `smallest`). The entry of largest
/// magnitude in every eigenvector is positive.
struct SpectralBasis {
  BasisSource source = BasisSource::gramian;
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // dimension x count

  std::size_t count() const noexcept { return values.size(); }
  std::size_t dimension() const noexcept { return std::size_t(vectors.rows()); }
};

struct EigenOptions {
  EigenSolver solver = EigenSolver::automatic;
  /// Convergence when every wanted Ritz residual <= tolerance * |largest Ritz value|.
  double tolerance = 1e-8;
  /// Matrix-vector product budget; 0 selects 30 L + 300.
  std::size_t max_matvecs = 0;
  std::uint64_t seed = 0x5eed;
  /// `automatic` uses the dense solver up to this order.
  std::size_t dense_limit = 2000;
};

/// The iterative solver ran out of budget before the wanted pairs converged.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// y = A x for a symmetric operator of known order.
using SymmetricOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Thick-restart Lanczos with full reorthogonalisation.
SpectralBasis lanczos_eigenpairs(std::size_t order, const SymmetricOperator& apply, std::size_t count,
                                 Selection rule, const EigenOptions& options = {});

/// Full symmetric eigendecomposition (Eigen's tridiagonal QR), then selection.
SpectralBasis dense_eigenpairs(const Eigen::MatrixXd& matrix, std::size_t count, Selection rule);

Eigen::MatrixXd to_dense(const PackedSymmetric& matrix);
Eigen::MatrixXd to_dense(const SparseSymmetric& matrix);

SpectralBasis top_eigenpairs(const PackedSymmetric& matrix, std::size_t count, Selection rule,
                             const EigenOptions& options = {});
SpectralBasis top_eigenpairs(const SparseSymmetric& matrix, std::size_t count, Selection rule,
                             const EigenOptions& options = {});

/// Flip each column so its largest-magnitude entry is positive.
void normalize_signs(Eigen::MatrixXd& vectors);

/// How each patch-coordinate slot is treated before projection.
enum class SlotCentering {
  /// Project the slot vector as is.
  none,
  /// Project the slot's deviation from its mean and add the mean back; this
  /// is projection onto span{basis, constant vector} for bases orthogonal to
  /// the constant vector, as Gramian eigenvectors are.
  mean,
};

/// Projects every patch-coordinate slot (the n^2-vector holding component c of
/// all patches) onto the first `count` basis vectors and reassembles patches.
/// Values are not clamped.
PatchSet denoise_patches(const PatchSet& patches, const SpectralBasis& basis, std::size_t count,
                         SlotCentering centering = SlotCentering::none);

/// Binary checkpoint: "GGB1", u64 dimension, u64 count, u64 source, then the
/// eigenvalues and the eigenvectors (one after another) as f64, all
/// little-endian.
void save_basis(const SpectralBasis& basis, const std::filesystem::path& path);
SpectralBasis load_basis(const std::filesystem::path& path);

}  // namespace ggd
