#include "ggd/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"

namespace ggd {

GramianMatrix gramian_from_distances(GeodesicDistances distances) {
  PackedSymmetric& d = distances.values;
  const std::size_t n = d.size();
  if (n == 0) throw std::invalid_argument("empty distance matrix");
  for (double v : d.packed())
    if (!std::isfinite(v)) throw std::invalid_argument("distance matrix has non-finite entries");

  std::vector<double> mean = d.row_sums();
  double grand = 0.0;
  for (double& m : mean) {
    grand += m;
    m /= double(n);
  }
  grand /= double(n) * double(n);

  for (std::size_t i = 0; i < n; ++i) {
    auto row = d.upper_row(i);
    const double mi = mean[i];
    for (std::size_t c = 0; c < row.size(); ++c)
      row[c] = -0.5 * (row[c] - mi - mean[i + c] + grand);
  }
  return {std::move(d)};
}

EigenSolver parse_solver(const std::string& name) {
  if (name == "auto") return EigenSolver::automatic;
  if (name == "lanczos") return EigenSolver::lanczos;
  if (name == "dense") return EigenSolver::dense;
  throw std::invalid_argument("unknown eigensolver '" + name + "' (expected auto, lanczos, dense)");
}

void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index l = 0; l < vectors.cols(); ++l) {
    Eigen::Index at = 0;
    vectors.col(l).cwiseAbs().maxCoeff(&at);
    if (vectors(at, l) < 0.0) vectors.col(l) *= -1.0;
  }
}

SpectralBasis dense_eigenpairs(const Eigen::MatrixXd& matrix, std::size_t count, Selection rule) {
  const auto n = std::size_t(matrix.rows());
  if (matrix.cols() != matrix.rows()) throw std::invalid_argument("matrix must be square");
  if (count < 1 || count > n)
    throw std::invalid_argument("eigenpair count must satisfy 1 <= L <= " + std::to_string(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  // Eigen returns ascending eigenvalues.
  SpectralBasis basis;
  basis.values.resize(count);
  basis.vectors.resize(Eigen::Index(n), Eigen::Index(count));
  for (std::size_t l = 0; l < count; ++l) {
    const auto src = Eigen::Index(rule == Selection::largest ? n - 1 - l : l);
    basis.values[l] = solver.eigenvalues()(src);
    basis.vectors.col(Eigen::Index(l)) = solver.eigenvectors().col(src);
  }
  normalize_signs(basis.vectors);
  return basis;
}

Eigen::MatrixXd to_dense(const PackedSymmetric& matrix) {
  const auto n = Eigen::Index(matrix.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = matrix.upper_row(std::size_t(i));
    for (Eigen::Index j = i; j < n; ++j) out(i, j) = out(j, i) = row[std::size_t(j - i)];
  }
  return out;
}

Eigen::MatrixXd to_dense(const SparseSymmetric& matrix) {
  const auto n = Eigen::Index(matrix.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cols = matrix.columns(std::size_t(i));
    const auto vals = matrix.row_values(std::size_t(i));
    for (std::size_t p = 0; p < cols.size(); ++p) out(i, Eigen::Index(cols[p])) = vals[p];
  }
  return out;
}

namespace {

bool use_dense(std::size_t order, const EigenOptions& options) {
  switch (options.solver) {
    case EigenSolver::dense:
      return true;
    case EigenSolver::lanczos:
      return false;
    case EigenSolver::automatic:
      break;
  }
  return order <= options.dense_limit;
}

}  // namespace

SpectralBasis top_eigenpairs(const PackedSymmetric& matrix, std::size_t count, Selection rule,
                             const EigenOptions& options) {
  if (use_dense(matrix.size(), options)) return dense_eigenpairs(to_dense(matrix), count, rule);
  return lanczos_eigenpairs(
      matrix.size(),
      [&matrix](std::span<const double> x, std::span<double> y) { matrix.multiply(x, y); }, count,
      rule, options);
}

SpectralBasis top_eigenpairs(const SparseSymmetric& matrix, std::size_t count, Selection rule,
                             const EigenOptions& options) {
  if (use_dense(matrix.size(), options)) return dense_eigenpairs(to_dense(matrix), count, rule);
  return lanczos_eigenpairs(
      matrix.size(),
      [&matrix](std::span<const double> x, std::span<double> y) { matrix.multiply(x, y); }, count,
      rule, options);
}

PatchSet denoise_patches(const PatchSet& patches, const SpectralBasis& basis, std::size_t count,
                         SlotCentering centering) {
  if (count < 1) throw std::invalid_argument("eigenvector threshold L must be >= 1");
  if (count > basis.count())
    throw std::invalid_argument("basis holds " + std::to_string(basis.count()) +
                                " vectors, L = " + std::to_string(count) + " requested");
  if (basis.dimension() != patches.count())
    throw std::invalid_argument("basis dimension " + std::to_string(basis.dimension()) +
                                " does not match patch count " + std::to_string(patches.count()));

  const auto n2 = Eigen::Index(patches.count());
  const auto dim = Eigen::Index(patches.dimension());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> in(patches.values().data(), n2, dim);
  std::vector<double> out_values(patches.values().size());
  Eigen::Map<RowMajor> out(out_values.data(), n2, dim);
  const auto v = basis.vectors.leftCols(Eigen::Index(count));

#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::VectorXd slot = in.col(c);
    const double mean = centering == SlotCentering::mean ? slot.mean() : 0.0;
    slot.array() -= mean;
    const Eigen::VectorXd coeffs = v.transpose() * slot;
    Eigen::VectorXd projected = v * coeffs;
    projected.array() += mean;
    out.col(c) = projected;
  }
  return PatchSet(patches.side(), patches.rho(), std::move(out_values));
}

void save_basis(const SpectralBasis& basis, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("GGB1", 4);
  detail::write_u64(out, basis.dimension());
  detail::write_u64(out, basis.count());
  detail::write_u64(out, static_cast<std::uint64_t>(basis.source));
  detail::write_f64_array(out, basis.values);
  // Column-major storage: each eigenvector is contiguous.
  detail::write_f64_array(
      out, std::span<const double>(basis.vectors.data(), std::size_t(basis.vectors.size())));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SpectralBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  detail::expect_magic(in, "GGB1");
  const auto dimension = detail::read_u64(in);
  const auto count = detail::read_u64(in);
  const auto source = detail::read_u64(in);
  if (dimension > (std::uint64_t(1) << 24) || count > dimension || source > 1)
    throw std::runtime_error("corrupt basis header in " + path.string());
  SpectralBasis basis;
  basis.source = static_cast<BasisSource>(source);
  basis.values.resize(count);
  detail::read_f64_array(in, basis.values);
  basis.vectors.resize(Eigen::Index(dimension), Eigen::Index(count));
  std::span<double> raw(basis.vectors.data(), std::size_t(basis.vectors.size()));
  detail::read_f64_array(in, raw);
  return basis;
}

}  // namespace ggd
