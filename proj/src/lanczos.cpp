#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ggd/image.hpp"
#include "ggd/spectral.hpp"

namespace ggd {

namespace {

// Two passes of classical Gram-Schmidt against the first `cols` columns of
// `basis`; returns the accumulated projection coefficients.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::VectorXd& w) {
  const auto v = basis.leftCols(cols);
  Eigen::VectorXd h = v.transpose() * w;
  w.noalias() -= v * h;
  const Eigen::VectorXd h2 = v.transpose() * w;
  w.noalias() -= v * h2;
  return h + h2;
}

// Unit vector orthogonal to the first `cols` columns, from the generator.
Eigen::VectorXd fresh_direction(const Eigen::MatrixXd& basis, Eigen::Index cols,
                                std::mt19937_64& gen) {
  const Eigen::Index n = basis.rows();
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = uniform_symmetric(gen());
    orthogonalize(basis, cols, w);
    const double norm = w.norm();
    if (norm > 1e-8) return w / norm;
  }
  throw std::runtime_error("Lanczos: could not extend an exhausted Krylov basis");
}

}  // namespace

SpectralBasis lanczos_eigenpairs(std::size_t order, const SymmetricOperator& apply, std::size_t count,
                                 Selection rule, const EigenOptions& options) {
  if (count < 1 || count > order)
    throw std::invalid_argument("eigenpair count must satisfy 1 <= L <= " + std::to_string(order));
  const auto n = Eigen::Index(order);
  const auto wanted = Eigen::Index(count);
  // Basis capacity: room for the wanted pairs plus a buffer that speeds up
  // convergence; never more than the matrix order.
  const Eigen::Index m = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * wanted + 20, wanted + 40));
  const std::size_t budget = options.max_matvecs ? options.max_matvecs : 30 * count + 300;

  std::mt19937_64 gen(options.seed);
  Eigen::MatrixXd v(n, m);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  v.col(0) = fresh_direction(v, 0, gen);

  Eigen::VectorXd w(n), residual(n);
  std::size_t matvecs = 0;
  Eigen::Index kept = 0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd s;
  std::vector<Eigen::Index> order_idx(static_cast<std::size_t>(m));
  double residual_norm = 0.0;
  double worst = 0.0;

  for (;;) {
    // Extend the basis from column `kept` to m columns.
    for (Eigen::Index j = kept; j < m; ++j) {
      apply(std::span<const double>(v.col(j).data(), order), std::span<double>(w.data(), order));
      ++matvecs;
      const Eigen::VectorXd h = orthogonalize(v, j + 1, w);
      t.col(j).head(j + 1) = h;
      t.row(j).head(j + 1) = h.transpose();
      const double beta = w.norm();
      if (j + 1 < m) {
        const double scale = std::max(1.0, t.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff());
        v.col(j + 1) = beta > 1e-12 * scale ? Eigen::VectorXd(w / beta) : fresh_direction(v, j + 1, gen);
      } else {
        residual = w;
        residual_norm = beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    theta = small.eigenvalues();  // ascending
    s = small.eigenvectors();
    std::iota(order_idx.begin(), order_idx.end(), Eigen::Index{0});
    if (rule == Selection::largest) std::reverse(order_idx.begin(), order_idx.end());

    const double scale = std::max(theta.cwiseAbs().maxCoeff(), 1e-300);
    worst = 0.0;
    for (Eigen::Index l = 0; l < wanted; ++l)
      worst = std::max(worst, residual_norm * std::abs(s(m - 1, order_idx[std::size_t(l)])) / scale);
    if (worst <= options.tolerance || m == n) break;
    if (matvecs >= budget) {
      std::ostringstream msg;
      msg << "Lanczos did not converge within " << budget << " matrix-vector products "
          << "(relative residual " << worst << ", target " << options.tolerance << ")";
      throw ConvergenceError(msg.str(), worst);
    }

    // Thick restart: keep the best Ritz vectors and continue from the residual.
    kept = std::min<Eigen::Index>(wanted + (m - wanted) / 2, m - 1);
    Eigen::MatrixXd keep_s(m, kept);
    for (Eigen::Index l = 0; l < kept; ++l) keep_s.col(l) = s.col(order_idx[std::size_t(l)]);
    const Eigen::MatrixXd ritz = v * keep_s;
    v.leftCols(kept) = ritz;
    t.setZero();
    for (Eigen::Index l = 0; l < kept; ++l) t(l, l) = theta(order_idx[std::size_t(l)]);
    if (residual_norm > 1e-12 * scale) {
      w = residual / residual_norm;
      orthogonalize(v, kept, w);  // guard against drift
      v.col(kept) = w.normalized();
    } else {
      v.col(kept) = fresh_direction(v, kept, gen);
    }
  }

  SpectralBasis basis;
  basis.values.resize(count);
  Eigen::MatrixXd pick(m, wanted);
  for (Eigen::Index l = 0; l < wanted; ++l) {
    pick.col(l) = s.col(order_idx[std::size_t(l)]);
    basis.values[std::size_t(l)] = theta(order_idx[std::size_t(l)]);
  }
  basis.vectors = v * pick;
  normalize_signs(basis.vectors);
  return basis;
}

}  // namespace ggd
