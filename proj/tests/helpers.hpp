#pragma once

// Shared test fixtures: deterministic random instances over all four
// canonical structures, plus an independent value-function evaluator for the
// saddle-point interpretation of the RCC field.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "axbnet/dynamics.hpp"
#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"
#include "axbnet/problem.hpp"

namespace testutil {

using axbnet::Index;
using axbnet::Mat;
using axbnet::Network;
using axbnet::Partition;
using axbnet::ProblemInstance;
using axbnet::Structure;
using axbnet::Vec;

inline Mat random_mat(std::mt19937_64& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

/// Random matrix with singular values in [0.8, 1.6]: orthogonal factors from
/// QR of Gaussian draws around a log-uniform diagonal. Keeping the data
/// blocks well conditioned keeps the slow modes of the flows bounded away
/// from zero, so randomized convergence tests finish in bounded time. Entry
/// signs and subspaces remain fully random.
inline Mat random_conditioned_mat(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto gaussian = [&](Index d) {
    Mat g(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
    return g;
  };
  const Mat q1 = Eigen::HouseholderQR<Mat>(gaussian(rows)).householderQ();
  const Mat q2 = Eigen::HouseholderQR<Mat>(gaussian(cols)).householderQ();
  std::uniform_real_distribution<double> u(std::log(0.8), std::log(1.6));
  Mat s = Mat::Zero(rows, cols);
  for (Index k = 0; k < std::min(rows, cols); ++k) s(k, k) = std::exp(u(rng));
  return q1 * s * q2.transpose();
}

/// n block sizes in {1, ..., max_block} (max_block <= 3), weighted toward 1
/// so state dimensions stay small enough for dense eigenanalysis.
inline std::vector<Index> random_blocks(std::mt19937_64& rng, int n, int max_block = 3) {
  std::uniform_int_distribution<int> d(0, 9);
  std::vector<Index> sizes;
  for (int i = 0; i < n; ++i) {
    const int r = d(rng);
    const int s = r < 6 ? 1 : (r < 9 ? 2 : 3);
    sizes.push_back(std::min(s, max_block));
  }
  return sizes;
}

inline Network random_connected_graph(std::mt19937_64& rng, int n) {
  using axbnet::GraphKind;
  static const GraphKind kinds[] = {GraphKind::cycle, GraphKind::path,
                                    GraphKind::complete, GraphKind::star};
  std::uniform_int_distribution<int> d(0, 3);
  return axbnet::make_graph(kinds[d(rng)], n);
}

/// One data set A, B, F with every dimension partitioned into n blocks, so
/// that each canonical structure can be instantiated over the same data.
struct Dataset {
  Mat A, B, F;
  Partition part_m, part_r, part_p, part_q;
  Network graph;
  bool solvable = false;
  int n = 0;
};

inline Dataset random_dataset(std::mt19937_64& rng, int n, bool solvable, int max_block = 3) {
  Dataset d;
  d.n = n;
  d.part_m = Partition(random_blocks(rng, n, max_block));
  d.part_r = Partition(random_blocks(rng, n, max_block));
  d.part_p = Partition(random_blocks(rng, n, max_block));
  d.part_q = Partition(random_blocks(rng, n, max_block));
  const Index m = d.part_m.total(), r = d.part_r.total();
  const Index p = d.part_p.total(), q = d.part_q.total();
  d.A = random_conditioned_mat(rng, m, r);
  d.B = random_conditioned_mat(rng, p, q);
  if (solvable) {
    d.F = d.A * random_mat(rng, r, p) * d.B;
  } else {
    d.F = random_mat(rng, m, q);
  }
  d.solvable = solvable;
  d.graph = random_connected_graph(rng, n);
  return d;
}

/// The data set viewed under one canonical structure: only the partitions
/// that structure distributes are carried.
inline ProblemInstance instance_for(const Dataset& d, Structure st) {
  ProblemInstance p;
  p.A = d.A;
  p.B = d.B;
  p.F = d.F;
  p.structure = st;
  switch (st) {
    case Structure::RCC:
      p.part_m = d.part_m;
      p.part_q = d.part_q;
      break;
    case Structure::RRR:
      p.part_m = d.part_m;
      p.part_p = d.part_p;
      break;
    case Structure::CCR:
      p.part_r = d.part_r;
      p.part_q = d.part_q;
      p.part_m = d.part_m;
      break;
    case Structure::CRR:
      p.part_r = d.part_r;
      p.part_p = d.part_p;
      p.part_m = d.part_m;
      break;
    default:
      throw std::invalid_argument("instance_for: canonical structures only");
  }
  return p;
}

inline const Structure kCanonical[] = {Structure::RCC, Structure::RRR,
                                       Structure::CCR, Structure::CRR};

/// Value function whose saddle-point flow (descent in X and Y, ascent in the
/// multipliers) the RCC field claims to be: local objective and coupling
/// penalty plus Laplacian regularization and the consensus multiplier terms.
inline double rcc_value_function(const ProblemInstance& p, const Network& g,
                                 const std::vector<axbnet::AgentView>& views,
                                 const axbnet::StateLayout& layout, const Vec& s) {
  const int n = g.n;
  double val = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& v = views[static_cast<size_t>(i)];
    const Mat xi = layout.view(s, i, 0);
    const Mat yi = layout.view(s, i, 1);
    const Mat l1 = layout.view(s, i, 2);
    const Mat l2 = layout.view(s, i, 3);
    const Mat l3 = layout.view(s, i, 4);
    const Index off = p.part_m.offset(i), len = p.part_m.size(i);
    const Mat local = v.a * xi - yi.middleRows(off, len);
    val += 0.5 * std::pow(axbnet::frob_norm(yi * v.b - v.f), 2);
    val += 0.5 * std::pow(axbnet::frob_norm(local), 2);
    val += axbnet::frob_inner(l3, local);
    for (int j = 0; j < n; ++j) {
      const double a = g.weights(i, j);
      if (a <= 0.0) continue;
      const Mat xj = layout.view(s, j, 0);
      const Mat yj = layout.view(s, j, 1);
      val += 0.25 * a * std::pow(axbnet::frob_norm(xi - xj), 2);
      val += 0.25 * a * std::pow(axbnet::frob_norm(yi - yj), 2);
      val += a * axbnet::frob_inner(l1, xi - xj);
      val += a * axbnet::frob_inner(l2, yi - yj);
    }
  }
  return val;
}

}  // namespace testutil
