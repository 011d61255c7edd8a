#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "ggd/graph.hpp"
#include "ggd/spectral.hpp"
#include "test_support.hpp"

using namespace ggd;

namespace {

// Patch set over an n x n grid whose first component carries `coord` and the
// rest are zero; rho = 3.
PatchSet line_points(std::size_t n, const std::vector<double>& coord) {
  std::vector<double> v(n * n * 9, 0.0);
  for (std::size_t k = 0; k < n * n; ++k) v[k * 9] = coord[k];
  return PatchSet(n, 3, std::move(v));
}

PatchGraph random_graph(std::size_t vertices, std::size_t delta, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < vertices; ++u)
    for (std::size_t e = 0; e < delta; ++e) {
      auto v = std::size_t(gen() % vertices);
      if (v == u) v = (v + 1) % vertices;
      edges.push_back({std::uint32_t(u), std::uint32_t(v), 0.01 + 5.0 * (1.0 + uniform_symmetric(gen()))});
    }
  return PatchGraph::from_edges(vertices, edges);
}

}  // namespace

TEST_CASE("patch distances") {
  const std::vector<double> z(9, 0.0), b{3, 4, 0, 0, 0, 0, 0, 0, 0};
  CHECK(patch_distance(z, z) == 0.0);
  CHECK(patch_distance(z, b) == 5.0);
  const auto x = test::random_vector(9, 1), y = test::random_vector(9, 2);
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  CHECK(patch_distance(x, y) == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
  CHECK_THROWS_AS(patch_distance(x, std::vector<double>(4)), std::invalid_argument);

  CHECK(gld_distance(x, y, {0, 0}, {5, 5}, 0.0) == patch_distance(x, y));
  CHECK(gld_distance(z, z, {1, 1}, {1, 4}, 3.0) == 9.0);
  CHECK(gld_distance(x, y, {0, 0}, {3, 4}, 2.0) == doctest::Approx(std::sqrt(s) + 10.0).epsilon(1e-15));
  CHECK_THROWS_AS(gld_distance(x, y, {0, 0}, {1, 1}, -1.0), std::invalid_argument);
}

TEST_CASE("k-NN: collinear points") {
  // Points at 0, 1, 2 on a line plus a far outlier at 100.
  const PatchSet p = line_points(2, {0.0, 1.0, 2.0, 100.0});
  const PatchGraph g = build_knn_graph(p, 1, Metric::euclidean());
  CHECK(g.edge_weight(0, 1) == 1.0);
  CHECK(g.edge_weight(1, 0) == 1.0);
  CHECK(g.edge_weight(1, 2) == 1.0);
  CHECK(g.edge_weight(0, 2) < 0.0);
  CHECK(g.edge_weight(2, 3) == 98.0);
  CHECK(g.edge_count() == 3);
  CHECK(g.component_count() == 1);

  // Vertex 1 has two neighbours at distance 1; the smaller index wins.
  const KnnTable t = knn_table(p, 1, Metric::euclidean());
  CHECK(t.neighbors_of(1)[0] == 0);
  CHECK(t.neighbors_of(3)[0] == 2);
}

TEST_CASE("k-NN: delta = n^2 - 1 gives the complete graph") {
  const PatchSet p = extract_patches(test::random_image(3, 4), 3);
  const PatchGraph g = build_knn_graph(p, 8, Metric::euclidean());
  CHECK(g.edge_count() == 36);
  for (std::size_t v = 0; v < 9; ++v) CHECK(g.degree(v) == 8);
  CHECK_THROWS_AS(build_knn_graph(p, 9, Metric::euclidean()), std::invalid_argument);
  CHECK_THROWS_AS(build_knn_graph(p, 0, Metric::euclidean()), std::invalid_argument);
}

TEST_CASE("k-NN: ties on identical patches break by index") {
  const PatchSet p = extract_patches(Image(4, 10.0), 3);
  const KnnTable t = knn_table(p, 3, Metric::euclidean());
  CHECK(t.neighbors_of(0)[0] == 1);
  CHECK(t.neighbors_of(0)[2] == 3);
  CHECK(t.neighbors_of(5)[0] == 0);
  CHECK(t.neighbors_of(5)[2] == 2);
  for (double d : t.distances) CHECK(d == 0.0);
}

TEST_CASE("k-NN: table rows are sorted and exact") {
  const PatchSet p = extract_patches(test::random_image(9, 12), 3);
  const KnnTable t = knn_table(p, 6, Metric::euclidean());
  for (std::size_t v = 0; v < p.count(); ++v) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t u = 0; u < p.count(); ++u)
      if (u != v) all.emplace_back(patch_distance(p.patch(v), p.patch(u)), u);
    std::sort(all.begin(), all.end());
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(t.neighbors_of(v)[j] == all[j].second);
      CHECK(t.distances_of(v)[j] == doctest::Approx(all[j].first).epsilon(1e-12));
    }
  }
}

TEST_CASE("k-NN: parallel kernel equals the serial reference bitwise") {
  const PatchSet p = extract_patches(test::random_image(20, 3), 5);
  for (const Metric& m : {Metric::euclidean(), Metric::gld(3.0, 1.0 / 255.0), Metric::gld(0.5)}) {
    const KnnTable a = knn_table(p, 12, m);
    const KnnTable b = serial::knn_table(p, 12, m);
    CHECK(a.neighbors == b.neighbors);
    CHECK(a.distances == b.distances);
  }
}

TEST_CASE("k-NN: penalised metric") {
  const PatchSet p = extract_patches(test::random_image(6, 9), 3);
  const double beta = 3.0, scale = 1.0 / 255.0;
  const KnnTable t = knn_table(p, 4, Metric::gld(beta, scale));
  for (std::size_t v = 0; v < p.count(); ++v)
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t u = t.neighbors_of(v)[j];
      const PixelCoord xv{double(v / 6), double(v % 6)}, xu{double(u / 6), double(u % 6)};
      const double expected = scale * patch_distance(p.patch(v), p.patch(u)) +
                              beta * std::hypot(xv[0] - xu[0], xv[1] - xu[1]);
      CHECK(t.distances_of(v)[j] == doctest::Approx(expected).epsilon(1e-12));
    }
  // With a heavy pixel penalty the nearest neighbours are the 4-connected pixels.
  const KnnTable local = knn_table(p, 4, Metric::gld(1e6, scale));
  const auto nb = local.neighbors_of(2 * 6 + 2);
  std::set<std::uint32_t> s(nb.begin(), nb.end());
  CHECK(s == std::set<std::uint32_t>{8, 13, 15, 20});
}

TEST_CASE("graph from edges") {
  const std::vector<Edge> edges{{0, 1, 2.0}, {1, 0, 1.5}, {2, 3, 1.0}};
  const PatchGraph g = PatchGraph::from_edges(5, edges);
  CHECK(g.edge_count() == 2);
  CHECK(g.edge_weight(0, 1) == 1.5);
  CHECK(g.component_count() == 3);
  CHECK_THROWS_AS(PatchGraph::from_edges(3, std::vector<Edge>{{1, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PatchGraph::from_edges(3, std::vector<Edge>{{0, 1, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PatchGraph::from_edges(3, std::vector<Edge>{{0, 3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(
      PatchGraph::from_edges(3, std::vector<Edge>{{0, 1, std::numeric_limits<double>::infinity()}}),
      std::invalid_argument);
}

TEST_CASE("shortest paths: hand examples") {
  for (ApspBackend backend : {ApspBackend::floyd, ApspBackend::dijkstra}) {
    const PatchGraph path = PatchGraph::from_edges(3, std::vector<Edge>{{0, 1, 1.0}, {1, 2, 2.0}});
    const auto d = all_pairs_shortest_paths(path, backend);
    CHECK(d(0, 2) == 3.0);
    CHECK(d(2, 0) == 3.0);
    CHECK(d(1, 1) == 0.0);

    const PatchGraph tri =
        PatchGraph::from_edges(3, std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 10.0}});
    CHECK(all_pairs_shortest_paths(tri, backend)(0, 2) == 2.0);
  }
  CHECK(parse_backend("floyd") == ApspBackend::floyd);
  CHECK(to_string(ApspBackend::dijkstra) == "dijkstra");
  CHECK_THROWS_AS(parse_backend("bfs"), std::invalid_argument);
}

TEST_CASE("shortest paths: Floyd and Dijkstra agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PatchGraph g = random_graph(50, 4, seed);
    const auto a = all_pairs_shortest_paths(g, ApspBackend::floyd);
    const auto b = all_pairs_shortest_paths(g, ApspBackend::dijkstra);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.packed().size(); ++i)
      worst = std::max(worst, std::abs(a.values.packed()[i] - b.values.packed()[i]));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("shortest paths: parallel equals serial") {
  const PatchGraph g = random_graph(120, 3, 77);
  for (ApspBackend backend : {ApspBackend::floyd, ApspBackend::dijkstra}) {
    const auto a = all_pairs_shortest_paths(g, backend);
    const auto b = serial::all_pairs_shortest_paths(g, backend);
    CHECK(std::equal(a.values.packed().begin(), a.values.packed().end(), b.values.packed().begin()));
  }
}

TEST_CASE("shortest paths: metric axioms") {
  const PatchGraph g = build_knn_graph(extract_patches(test::random_image(8, 21), 3), 3,
                                       Metric::euclidean());
  const auto d = all_pairs_shortest_paths(g, ApspBackend::dijkstra);
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(d(i, j) >= 0.0);
      for (std::size_t k = 0; k < n; ++k) CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-9);
    }
  }
}

TEST_CASE("shortest paths: disconnected graphs") {
  const PatchGraph g = PatchGraph::from_edges(4, std::vector<Edge>{{0, 1, 2.0}, {2, 3, 4.0}});
  for (ApspBackend backend : {ApspBackend::floyd, ApspBackend::dijkstra}) {
    Diagnostics diag;
    const auto d = all_pairs_shortest_paths(g, backend, &diag);
    CHECK(d.unreachable_pairs == 4);
    CHECK(d(0, 2) == 6.0);
    CHECK(d(1, 3) == 6.0);
    CHECK(d(2, 3) == 4.0);
    REQUIRE(diag.warnings.size() == 1);
    CHECK(diag.warnings[0].find("4") != std::string::npos);
  }
  // No finite positive distance at all: unreachable pairs get 1.
  Diagnostics diag;
  const auto iso = all_pairs_shortest_paths(PatchGraph::from_edges(2, std::vector<Edge>{}),
                                            ApspBackend::dijkstra, &diag);
  CHECK(iso(0, 1) == 1.0);
}

TEST_CASE("geodesic checkpoint round trip") {
  test::TempDir dir("geo");
  const auto d = all_pairs_shortest_paths(random_graph(30, 3, 5), ApspBackend::dijkstra);
  save_geodesics(d, dir / "d.ggd");
  const auto back = load_geodesics(dir / "d.ggd");
  CHECK(back.size() == d.size());
  CHECK(std::equal(back.values.packed().begin(), back.values.packed().end(), d.values.packed().begin()));

  // Layout: magic, u64 size, packed values.
  CHECK(std::filesystem::file_size(dir / "d.ggd") == 4 + 8 + 8 * PackedSymmetric::packed_length(30));
  {
    std::ofstream bad(dir / "bad.ggd", std::ios::binary);
    bad << "XXXX";
  }
  CHECK_THROWS(load_geodesics(dir / "bad.ggd"));
  CHECK_THROWS(load_geodesics(dir / "missing.ggd"));
}

TEST_CASE("GLD weights") {
  const std::vector<Edge> edges{{0, 1, 0.0}, {1, 2, 5.0}};
  const PatchGraph g = PatchGraph::from_edges(3, edges, Metric::gld(3.0));
  const GldWeights w = gld_weight_matrix(g, 5.0);
  CHECK(w.weights(0, 1) == 1.0);
  CHECK(w.weights(1, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(w.weights(0, 2) == 0.0);
  CHECK(w.weights(0, 0) == 0.0);
  CHECK(w.degrees[1] == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(gld_weight_matrix(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gld_weight_matrix(PatchGraph::from_edges(3, edges), 5.0), std::invalid_argument);
}

TEST_CASE("normalised Laplacian") {
  SUBCASE("two vertices") {
    const PatchGraph g = PatchGraph::from_edges(2, std::vector<Edge>{{0, 1, 0.0}}, Metric::gld(3.0));
    const auto l = graph_laplacian(gld_weight_matrix(g, 5.0));
    CHECK(l(0, 0) == 1.0);
    CHECK(l(1, 1) == 1.0);
    CHECK(l(0, 1) == -1.0);
    CHECK(l(1, 0) == -1.0);
  }
  SUBCASE("regular graph annihilates constants") {
    std::vector<Edge> ring;
    for (std::uint32_t v = 0; v < 12; ++v) ring.push_back({v, (v + 1) % 12, 2.0});
    const auto l = graph_laplacian(gld_weight_matrix(PatchGraph::from_edges(12, ring, Metric::gld(1.0)), 3.0));
    std::vector<double> one(12, 1.0), y(12);
    l.multiply(one, y);
    for (double v : y) CHECK(std::abs(v) <= 1e-14);
  }
  SUBCASE("spectrum lies in [0, 2] and the matrix is symmetric") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const PatchSet p = extract_patches(test::random_image(6, seed), 3);
      const PatchGraph g = build_knn_graph(p, 3, Metric::gld(3.0, 1.0 / 255.0));
      const auto l = graph_laplacian(gld_weight_matrix(g, 5.0));
      const Eigen::MatrixXd dense = to_dense(l);
      CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense).eigenvalues();
      CHECK(ev.minCoeff() >= -1e-9);
      CHECK(ev.maxCoeff() <= 2.0 + 1e-9);
    }
  }
  SUBCASE("isolated vertex") {
    const PatchGraph g = PatchGraph::from_edges(3, std::vector<Edge>{{0, 1, 1.0}}, Metric::gld(3.0));
    CHECK_THROWS_AS(graph_laplacian(gld_weight_matrix(g, 5.0)), std::invalid_argument);
  }
}

TEST_CASE("sparse symmetric product matches dense") {
  const PatchGraph g = build_knn_graph(extract_patches(test::random_image(7, 2), 3), 4,
                                       Metric::gld(3.0, 1.0 / 255.0));
  const auto l = graph_laplacian(gld_weight_matrix(g, 5.0));
  const auto x = test::random_vector(49, 4);
  std::vector<double> y(49);
  l.multiply(x, y);
  const Eigen::VectorXd ref = to_dense(l) * Eigen::Map<const Eigen::VectorXd>(x.data(), 49);
  for (int i = 0; i < 49; ++i) CHECK(y[std::size_t(i)] == doctest::Approx(ref(i)).epsilon(1e-13));
  CHECK(l.frobenius_norm() == doctest::Approx(to_dense(l).norm()).epsilon(1e-13));
}
