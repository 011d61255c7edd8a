#include <doctest.h>

#include <cmath>
#include <limits>

#include "ggd/spectral.hpp"
#include "test_support.hpp"

using namespace ggd;

namespace {

PackedSymmetric random_symmetric(std::size_t n, std::uint64_t seed) {
  const auto v = test::random_vector(PackedSymmetric::packed_length(n), seed);
  return PackedSymmetric(n, v);
}

GeodesicDistances distances_of(PackedSymmetric d) { return {std::move(d), 0}; }

// Largest principal angle between two column spaces (sine).
double subspace_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd residual = b - a * (a.transpose() * b);
  return residual.norm();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("packed storage") {
  PackedSymmetric m(4);
  m(1, 3) = 7.0;
  CHECK(m(3, 1) == 7.0);
  CHECK(m.row_offset(0) == 0);
  CHECK(m.row_offset(1) == 4);
  CHECK(m.row_offset(3) == 9);
  CHECK(m.upper_row(3).size() == 1);
  CHECK_THROWS_AS(PackedSymmetric(3, std::vector<double>(5)), std::invalid_argument);

  const PackedSymmetric r = random_symmetric(37, 2);
  const Eigen::MatrixXd dense = to_dense(r);
  const auto x = test::random_vector(37, 3);
  std::vector<double> y(37), ys(37);
  r.multiply(x, y);
  serial::multiply(r, x, ys);
  const Eigen::VectorXd ref = dense * Eigen::Map<const Eigen::VectorXd>(x.data(), 37);
  for (int i = 0; i < 37; ++i) {
    CHECK(y[std::size_t(i)] == doctest::Approx(ref(i)).epsilon(1e-13));
    CHECK(y[std::size_t(i)] == ys[std::size_t(i)]);
  }
  const auto sums = r.row_sums();
  for (int i = 0; i < 37; ++i) CHECK(sums[std::size_t(i)] == doctest::Approx(dense.row(i).sum()).epsilon(1e-13));
  CHECK(r.frobenius_norm() == doctest::Approx(dense.norm()).epsilon(1e-13));
}

TEST_CASE("Gramian of distances") {
  SUBCASE("zero matrix") {
    const auto g = gramian_from_distances(distances_of(PackedSymmetric(5, 0.0)));
    for (double v : g.values.packed()) CHECK(v == 0.0);
  }
  SUBCASE("two points") {
    const auto g = gramian_from_distances(distances_of(PackedSymmetric(2, std::vector<double>{0, 2, 0})));
    CHECK(g.values(0, 0) == 0.5);
    CHECK(g.values(0, 1) == -0.5);
    CHECK(g.values(1, 1) == 0.5);
  }
  SUBCASE("matches the centring formula and has zero row sums") {
    PackedSymmetric d = random_symmetric(40, 9);
    for (auto& v : d.packed()) v = std::abs(v) * 10.0;
    for (std::size_t i = 0; i < 40; ++i) d(i, i) = 0.0;
    const Eigen::MatrixXd dd = to_dense(d);
    const auto g = gramian_from_distances(distances_of(d));
    const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(40, 40) - Eigen::MatrixXd::Constant(40, 40, 1.0 / 40);
    const Eigen::MatrixXd ref = -0.5 * j * dd * j;
    CHECK(max_abs(to_dense(g.values) - ref) <= 1e-12);
    for (double s : g.values.row_sums()) CHECK(std::abs(s) <= 1e-6 * 40 * 40);
  }
  SUBCASE("non-finite input") {
    PackedSymmetric d(3, 1.0);
    d(0, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(gramian_from_distances(distances_of(d)), std::invalid_argument);
  }
}

TEST_CASE("dense eigenpairs: small hand cases") {
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  const auto top = dense_eigenpairs(diag, 1, Selection::largest);
  CHECK(top.values[0] == doctest::Approx(3.0));
  CHECK(top.vectors(0, 0) == doctest::Approx(1.0));
  CHECK(top.vectors(1, 0) == doctest::Approx(0.0));
  const auto low = dense_eigenpairs(diag, 1, Selection::smallest);
  CHECK(low.values[0] == doctest::Approx(1.0));

  const auto g = gramian_from_distances(distances_of(PackedSymmetric(2, std::vector<double>{0, 2, 0})));
  for (EigenSolver solver : {EigenSolver::dense, EigenSolver::lanczos}) {
    EigenOptions opt;
    opt.solver = solver;
    const auto b = top_eigenpairs(g.values, 1, Selection::largest, opt);
    CHECK(b.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.vectors(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b.vectors(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dense_eigenpairs(diag, 0, Selection::largest), std::invalid_argument);
  CHECK_THROWS_AS(dense_eigenpairs(diag, 3, Selection::largest), std::invalid_argument);
}

TEST_CASE("Lanczos agrees with the dense oracle") {
  EigenOptions lanczos;
  lanczos.solver = EigenSolver::lanczos;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PackedSymmetric m = random_symmetric(50, 100 + seed);
    for (Selection rule : {Selection::largest, Selection::smallest}) {
      const auto a = top_eigenpairs(m, 5, rule, lanczos);
      const auto b = dense_eigenpairs(to_dense(m), 5, rule);
      for (std::size_t l = 0; l < 5; ++l) CHECK(std::abs(a.values[l] - b.values[l]) <= 1e-8);
      CHECK(subspace_gap(b.vectors, a.vectors) <= 1e-6);
      // Orthonormal columns.
      CHECK(max_abs(a.vectors.transpose() * a.vectors - Eigen::MatrixXd::Identity(5, 5)) <= 1e-10);
    }
  }
}

TEST_CASE("Lanczos on a larger Gramian and on a sparse Laplacian") {
  EigenOptions lanczos;
  lanczos.solver = EigenSolver::lanczos;
  const PatchSet p = extract_patches(test::random_image(16, 4), 3);
  const PatchGraph g = build_knn_graph(p, 6, Metric::euclidean());
  const auto gram = gramian_from_distances(all_pairs_shortest_paths(g, ApspBackend::dijkstra));
  const auto a = top_eigenpairs(gram.values, 15, Selection::largest, lanczos);
  const auto b = dense_eigenpairs(to_dense(gram.values), 15, Selection::largest);
  for (std::size_t l = 0; l < 15; ++l)
    CHECK(std::abs(a.values[l] - b.values[l]) <= 1e-8 * std::abs(b.values[0]));

  const PatchGraph gg = build_knn_graph(p, 6, Metric::gld(3.0, 1.0 / 255.0));
  const auto lap = graph_laplacian(gld_weight_matrix(gg, 5.0));
  const auto c = top_eigenpairs(lap, 10, Selection::smallest, lanczos);
  const auto d = dense_eigenpairs(to_dense(lap), 10, Selection::smallest);
  for (std::size_t l = 0; l < 10; ++l) CHECK(std::abs(c.values[l] - d.values[l]) <= 1e-8);
  CHECK(std::abs(c.values[0]) <= 1e-8);
}

TEST_CASE("Lanczos edge cases") {
  EigenOptions lanczos;
  lanczos.solver = EigenSolver::lanczos;
  const PackedSymmetric m = random_symmetric(12, 5);
  const auto all = top_eigenpairs(m, 12, Selection::largest, lanczos);
  const auto ref = dense_eigenpairs(to_dense(m), 12, Selection::largest);
  for (std::size_t l = 0; l < 12; ++l) CHECK(all.values[l] == doctest::Approx(ref.values[l]).epsilon(1e-10));

  // Rank-one matrix: the Krylov space is exhausted after one step.
  PackedSymmetric ones(30, 1.0);
  const auto r1 = top_eigenpairs(ones, 3, Selection::largest, lanczos);
  CHECK(r1.values[0] == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(std::abs(r1.values[1]) <= 1e-10);

  EigenOptions starved = lanczos;
  starved.max_matvecs = 1;
  starved.tolerance = 1e-15;
  CHECK_THROWS_AS(top_eigenpairs(random_symmetric(300, 6), 10, Selection::largest, starved),
                  ConvergenceError);
  CHECK_THROWS_AS(top_eigenpairs(m, 0, Selection::largest, lanczos), std::invalid_argument);
  CHECK(parse_solver("dense") == EigenSolver::dense);
  CHECK_THROWS_AS(parse_solver("qr"), std::invalid_argument);
}

TEST_CASE("sign convention") {
  Eigen::MatrixXd v(3, 2);
  v << 0.1, 0.5, -0.9, -0.2, 0.3, -0.6;
  normalize_signs(v);
  CHECK(v(1, 0) == 0.9);
  CHECK(v(2, 1) == 0.6);
  CHECK(v(0, 1) == -0.5);
}

TEST_CASE("projection of patch slots") {
  const std::size_t n = 4, rho = 3;
  const PatchSet p = extract_patches(test::random_image(n, 2), rho);

  SUBCASE("complete basis reproduces the input") {
    const auto basis = dense_eigenpairs(to_dense(random_symmetric(16, 1)), 16, Selection::largest);
    for (SlotCentering c : {SlotCentering::none, SlotCentering::mean}) {
      const PatchSet out = denoise_patches(p, basis, 16, c);
      for (std::size_t i = 0; i < p.values().size(); ++i)
        CHECK(std::abs(out.values()[i] - p.values()[i]) <= 1e-9);
    }
  }
  SUBCASE("coordinate vector keeps one patch") {
    SpectralBasis e1;
    e1.values = {1.0};
    e1.vectors = Eigen::MatrixXd::Zero(16, 1);
    e1.vectors(0, 0) = 1.0;
    const PatchSet out = denoise_patches(p, e1, 1);
    for (std::size_t c = 0; c < 9; ++c) CHECK(out.patch(0)[c] == p.patch(0)[c]);
    for (std::size_t k = 1; k < 16; ++k)
      for (std::size_t c = 0; c < 9; ++c) CHECK(out.patch(k)[c] == 0.0);
    CHECK_THROWS_AS(denoise_patches(p, e1, 0), std::invalid_argument);
    CHECK_THROWS_AS(denoise_patches(p, e1, 2), std::invalid_argument);
  }
  SUBCASE("explicit Gram-Schmidt oracle") {
    const std::size_t m = 2;  // 4 patches
    const PatchSet small = extract_patches(test::random_image(m, 6), 3);
    const auto raw = test::random_vector(8, 11);
    Eigen::MatrixXd a(4, 2);
    for (int i = 0; i < 4; ++i) {
      a(i, 0) = raw[std::size_t(i)];
      a(i, 1) = raw[std::size_t(4 + i)];
    }
    Eigen::VectorXd q0 = a.col(0).normalized();
    Eigen::VectorXd q1 = a.col(1) - q0.dot(a.col(1)) * q0;
    q1.normalize();
    SpectralBasis b;
    b.values = {2.0, 1.0};
    b.vectors.resize(4, 2);
    b.vectors.col(0) = q0;
    b.vectors.col(1) = q1;
    const PatchSet out = denoise_patches(small, b, 2);
    for (std::size_t c = 0; c < 9; ++c) {
      Eigen::VectorXd slot(4);
      for (int k = 0; k < 4; ++k) slot(k) = small.patch(std::size_t(k))[c];
      const Eigen::VectorXd expected = q0 * q0.dot(slot) + q1 * q1.dot(slot);
      for (int k = 0; k < 4; ++k) CHECK(out.patch(std::size_t(k))[c] == doctest::Approx(expected(k)).epsilon(1e-12));
    }
  }
  SUBCASE("idempotent and non-expansive") {
    // Mean centring is an orthogonal projection for bases orthogonal to the
    // constant vector, which Gramian eigenvectors are.
    PackedSymmetric d = random_symmetric(16, 3);
    for (auto& v : d.packed()) v = std::abs(v);
    const auto gram = gramian_from_distances(distances_of(d));
    for (SlotCentering c : {SlotCentering::none, SlotCentering::mean}) {
      const auto basis = c == SlotCentering::none
                             ? dense_eigenpairs(to_dense(random_symmetric(16, 3)), 5, Selection::largest)
                             : dense_eigenpairs(to_dense(gram.values), 5, Selection::largest);
      const PatchSet once = denoise_patches(p, basis, 5, c);
      const PatchSet twice = denoise_patches(once, basis, 5, c);
      double in_norm = 0.0, out_norm = 0.0;
      for (std::size_t i = 0; i < p.values().size(); ++i) {
        CHECK(std::abs(once.values()[i] - twice.values()[i]) <= 1e-9);
        in_norm += p.values()[i] * p.values()[i];
        out_norm += once.values()[i] * once.values()[i];
      }
      CHECK(out_norm <= in_norm * (1.0 + 1e-12));
    }
  }
  SUBCASE("mean centring keeps constant slots") {
    const PatchSet flat = extract_patches(Image(4, 99.0), 3);
    const auto basis = dense_eigenpairs(to_dense(random_symmetric(16, 8)), 2, Selection::largest);
    const PatchSet out = denoise_patches(flat, basis, 2, SlotCentering::mean);
    for (double v : out.values()) CHECK(v == doctest::Approx(99.0).epsilon(1e-13));
  }
  SUBCASE("dimension mismatch") {
    const auto basis = dense_eigenpairs(to_dense(random_symmetric(9, 3)), 2, Selection::largest);
    CHECK_THROWS_AS(denoise_patches(p, basis, 2), std::invalid_argument);
  }
}

TEST_CASE("basis checkpoint round trip") {
  test::TempDir dir("basis");
  auto basis = dense_eigenpairs(to_dense(random_symmetric(20, 4)), 6, Selection::smallest);
  basis.source = BasisSource::laplacian;
  save_basis(basis, dir / "b.ggb");
  CHECK(std::filesystem::file_size(dir / "b.ggb") == 4 + 3 * 8 + 8 * (6 + 20 * 6));
  const auto back = load_basis(dir / "b.ggb");
  CHECK(back.source == BasisSource::laplacian);
  CHECK(back.values == basis.values);
  CHECK(back.vectors == basis.vectors);
  CHECK_THROWS(load_basis(dir / "missing.ggb"));
}
