#include <doctest.h>

#include <Eigen/SVD>

#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"

using namespace axbnet;

TEST_CASE("laplacian of the two-node graph") {
  Network g = make_graph(GraphKind::complete, 2);
  Mat l = laplacian(g);
  Mat expect(2, 2);
  expect << 1, -1, -1, 1;
  CHECK(l == expect);
}

TEST_CASE("laplacian of the four-cycle") {
  Network g = make_graph(GraphKind::cycle, 4);
  Mat l = laplacian(g);
  for (int i = 0; i < 4; ++i) CHECK(l(i, i) == 2.0);
  CHECK(l(0, 1) == -1.0);
  CHECK(l(1, 2) == -1.0);
  CHECK(l(2, 3) == -1.0);
  CHECK(l(3, 0) == -1.0);
  CHECK(l(0, 2) == 0.0);
  CHECK(l(1, 3) == 0.0);
  // Row sums vanish: L * ones = 0.
  CHECK(frob_norm(l * Mat::Ones(4, 1)) == 0.0);
}

TEST_CASE("connectivity by traversal") {
  CHECK(is_connected(make_graph(GraphKind::cycle, 4)));
  Network isolated = make_graph(Mat::Zero(2, 2));
  CHECK_FALSE(is_connected(isolated));

  Network path5 = make_graph(GraphKind::path, 5);
  CHECK(is_connected(path5));
  // A connected graph's Laplacian drops rank by exactly one.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(laplacian(path5)));
  const double tol = 5 * 1e-15 * svd.singularValues()(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  CHECK(rank == 4);
}

TEST_CASE("named topologies") {
  Network c4 = make_graph(GraphKind::cycle, 4);
  Mat expect = Mat::Zero(4, 4);
  expect(0, 1) = expect(1, 0) = 1;
  expect(1, 2) = expect(2, 1) = 1;
  expect(2, 3) = expect(3, 2) = 1;
  expect(3, 0) = expect(0, 3) = 1;
  CHECK(c4.weights == expect);

  Network k2 = make_graph(GraphKind::complete, 2);
  CHECK(k2.weights(0, 1) == 1.0);
  CHECK(k2.weights(1, 0) == 1.0);
  CHECK(k2.weights(0, 0) == 0.0);

  Network s4 = make_graph(GraphKind::star, 4);
  Mat l = laplacian(s4);
  CHECK(l(0, 0) == 3.0);  // hub degree n-1
  CHECK(l(1, 1) == 1.0);
}

TEST_CASE("custom graphs are validated") {
  Mat asym = Mat::Zero(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(make_graph(asym), std::invalid_argument);

  Mat neg = Mat::Zero(2, 2);
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK_THROWS_AS(make_graph(neg), std::invalid_argument);

  Mat diag = Mat::Identity(2, 2);
  CHECK_THROWS_AS(make_graph(diag), std::invalid_argument);
}

TEST_CASE("algebraic connectivity is positive on connected graphs") {
  for (GraphKind kind : {GraphKind::cycle, GraphKind::path, GraphKind::complete, GraphKind::star}) {
    for (int n = 2; n <= 5; ++n) {
      Network g = make_graph(kind, n);
      REQUIRE(is_connected(g));
      Mat l = laplacian(g);
      CHECK((l - l.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::MatrixXd dense = l;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
      // Second-smallest eigenvalue strictly positive.
      CHECK(es.eigenvalues()(1) > 1e-9 * n);
    }
  }
}

TEST_CASE("graph kind strings round-trip") {
  for (GraphKind k : {GraphKind::cycle, GraphKind::path, GraphKind::complete, GraphKind::star,
                      GraphKind::custom}) {
    CHECK(graph_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(graph_kind_from_string("torus"), std::invalid_argument);
}
