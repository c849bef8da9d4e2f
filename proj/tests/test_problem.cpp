#include <doctest.h>

#include <random>

#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"
#include "axbnet/oracle.hpp"
#include "axbnet/problem.hpp"
#include "helpers.hpp"

using namespace axbnet;
using testutil::random_mat;

namespace {

// Four-agent row/row instance used throughout the suite (also bundled as a
// data fixture for the CLI).
ProblemInstance four_agent_rrr() {
  ProblemInstance p;
  p.A = Mat(4, 2);
  p.A << 2, 1, 4, 3, 1, 3, 2, 4;
  p.B = Mat(4, 2);
  p.B << 1, 2, 3, 2, 2, 4, 2, 1;
  p.F = Mat(4, 2);
  p.F << 0, 0, 2, 1, 3, 5, 1, 4;
  p.structure = Structure::RRR;
  p.part_m = Partition({1, 1, 1, 1});
  p.part_p = Partition({1, 1, 1, 1});
  return p;
}

}  // namespace

TEST_CASE("structure strings round-trip") {
  for (Structure s : {Structure::RCC, Structure::RRR, Structure::CCR, Structure::CRR,
                      Structure::RCR, Structure::CCC, Structure::RRC, Structure::CRC}) {
    CHECK(structure_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(structure_from_string("XYZ"), std::invalid_argument);
  CHECK(is_canonical(Structure::RCC));
  CHECK(is_canonical(Structure::CRR));
  CHECK_FALSE(is_canonical(Structure::RCR));
  CHECK(canonical_of(Structure::RCR) == Structure::RCC);
  CHECK(canonical_of(Structure::CCC) == Structure::RRR);
  CHECK(canonical_of(Structure::RRC) == Structure::CCR);
  CHECK(canonical_of(Structure::CRC) == Structure::CRR);
  CHECK(canonical_of(Structure::RRR) == Structure::RRR);
}

TEST_CASE("row/row views of the four-agent instance") {
  ProblemInstance p = four_agent_rrr();
  validate(p);
  CHECK(block_count(p) == 4);
  Network g = make_graph(GraphKind::cycle, 4);
  auto views = partition_views(p, g);
  REQUIRE(views.size() == 4);
  Mat a0(1, 2), b0(1, 2), f0(1, 2);
  a0 << 2, 1;
  b0 << 1, 2;
  f0 << 0, 0;
  CHECK(views[0].a == a0);
  CHECK(views[0].b == b0);
  CHECK(views[0].f == f0);
  Mat a3(1, 2);
  a3 << 2, 4;
  CHECK(views[3].a == a3);
}

TEST_CASE("single-agent views are the whole matrices") {
  std::mt19937_64 rng(11);
  ProblemInstance p;
  p.A = random_mat(rng, 3, 2);
  p.B = random_mat(rng, 2, 4);
  p.F = random_mat(rng, 3, 4);
  p.structure = Structure::RCC;
  p.part_m = Partition({3});
  p.part_q = Partition({4});
  Network g = make_graph(GraphKind::complete, 1);
  auto views = partition_views(p, g);
  REQUIRE(views.size() == 1);
  CHECK(views[0].a == p.A);
  CHECK(views[0].b == p.B);
  CHECK(views[0].f == p.F);
}

TEST_CASE("views reassemble the instance") {
  std::mt19937_64 rng(12);
  ProblemInstance p;
  p.A = random_mat(rng, 5, 2);
  p.B = random_mat(rng, 3, 4);
  p.F = random_mat(rng, 5, 4);
  p.structure = Structure::RCC;
  p.part_m = Partition({2, 3});
  p.part_q = Partition({1, 3});
  Network g = make_graph(GraphKind::complete, 2);
  auto views = partition_views(p, g);

  Mat a = Mat::Zero(5, 2), b = Mat::Zero(3, 4), f = Mat::Zero(5, 4);
  for (int i = 0; i < 2; ++i) {
    a += embed_row(views[static_cast<size_t>(i)].a, p.part_m, i);
    b += embed_col(views[static_cast<size_t>(i)].b, p.part_q, i);
    f += embed_col(views[static_cast<size_t>(i)].f, p.part_q, i);
  }
  CHECK(a == p.A);
  CHECK(b == p.B);
  CHECK(f == p.F);
}

TEST_CASE("validation rejects malformed instances") {
  ProblemInstance p = four_agent_rrr();
  CHECK_NOTHROW(validate(p));

  ProblemInstance bad = p;
  bad.F = Mat(3, 2);
  bad.F.setZero();
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = p;
  bad.part_q = Partition({1, 1});  // a partition the structure does not use
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = p;
  bad.part_m = Partition({2, 2});  // mismatched block count vs part_p
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = p;
  bad.part_p = Partition({1, 1, 1, 2});  // sums past B's rows
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = p;
  bad.A(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("transpose reduction rewrites the instance") {
  std::mt19937_64 rng(13);
  ProblemInstance p;
  p.A = random_mat(rng, 4, 3);
  p.B = random_mat(rng, 2, 4);
  p.F = random_mat(rng, 4, 4);

  SUBCASE("row/col/row maps to row/col/col") {
    p.structure = Structure::RCR;
    p.part_m = Partition({2, 2});
    p.part_q = Partition({3, 1});
    validate(p);
    ProblemInstance c = to_canonical(p);
    CHECK(c.structure == Structure::RCC);
    CHECK(c.A == Mat(p.B.transpose()));
    CHECK(c.B == Mat(p.A.transpose()));
    CHECK(c.F == Mat(p.F.transpose()));
    CHECK(c.part_m == p.part_q);
    CHECK(c.part_q == p.part_m);
    CHECK_NOTHROW(validate(c));
    CHECK_THROWS_AS(to_canonical(c), std::invalid_argument);
  }

  SUBCASE("col/col/col maps to row/row/row") {
    p.structure = Structure::CCC;
    p.part_r = Partition({1, 2});
    p.part_q = Partition({3, 1});
    validate(p);
    ProblemInstance c = to_canonical(p);
    CHECK(c.structure == Structure::RRR);
    CHECK(c.part_m == p.part_q);
    CHECK(c.part_p == p.part_r);
  }

  SUBCASE("row/row/col maps to col/col/row") {
    p.structure = Structure::RRC;
    p.part_m = Partition({2, 2});
    p.part_p = Partition({1, 1});
    p.part_q = Partition({3, 1});
    validate(p);
    ProblemInstance c = to_canonical(p);
    CHECK(c.structure == Structure::CCR);
    CHECK(c.part_r == p.part_p);
    CHECK(c.part_q == p.part_m);
    CHECK(c.part_m == p.part_q);
  }

  SUBCASE("col/row/col maps to col/row/row") {
    p.structure = Structure::CRC;
    p.part_r = Partition({1, 2});
    p.part_p = Partition({1, 1});
    p.part_q = Partition({3, 1});
    validate(p);
    ProblemInstance c = to_canonical(p);
    CHECK(c.structure == Structure::CRR);
    CHECK(c.part_r == p.part_p);
    CHECK(c.part_p == p.part_r);
    CHECK(c.part_m == p.part_q);
  }
}

TEST_CASE("solving the reduced instance solves the original") {
  std::mt19937_64 rng(14);
  ProblemInstance p;
  p.A = random_mat(rng, 4, 3);
  p.B = random_mat(rng, 2, 4);
  p.F = random_mat(rng, 4, 4);
  p.structure = Structure::RCR;
  p.part_m = Partition({2, 2});
  p.part_q = Partition({2, 2});
  validate(p);

  ProblemInstance c = to_canonical(p);
  OracleResult res = solve_centralized(c);
  Mat x = res.x_star.transpose();
  CHECK(optimality_residual(p, x) <= 1e-8 * optimality_scale(p, x));
}

TEST_CASE("solvability classification") {
  ProblemInstance p;
  p.A = Mat::Identity(2, 2);
  p.B = Mat::Identity(2, 2);
  p.F = Mat(2, 2);
  p.F << 3, -1, 2, 5;
  p.structure = Structure::RCC;
  p.part_m = Partition({1, 1});
  p.part_q = Partition({1, 1});
  CHECK(solvability(p) == Solvability::exact);
  CHECK(to_string(Solvability::exact) == "exact");

  CHECK(solvability(four_agent_rrr()) == Solvability::least_squares_only);
  CHECK(to_string(Solvability::least_squares_only) == "least_squares_only");

  std::mt19937_64 rng(15);
  ProblemInstance q;
  q.A = random_mat(rng, 4, 2);
  q.B = random_mat(rng, 2, 3);
  q.F = q.A * random_mat(rng, 2, 2) * q.B;
  q.structure = Structure::RRR;
  q.part_m = Partition({2, 2});
  q.part_p = Partition({1, 1});
  CHECK(solvability(q) == Solvability::exact);
}
