// Microbenchmarks for the hot paths: field evaluation per structure, one
// integrator step, and the dense analysis pipeline (assembly plus the
// semistability check).

#include <benchmark/benchmark.h>

#include <random>

#include "axbnet/dynamics.hpp"
#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"
#include "axbnet/problem.hpp"
#include "axbnet/sim.hpp"

using namespace axbnet;

namespace {

Mat random_mat(std::mt19937_64& rng, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

/// n agents, every partitioned dimension split into n blocks of size `blk`.
ProblemInstance bench_instance(Structure st, int n, Index blk) {
  std::mt19937_64 rng(0xBE7C4ull + static_cast<std::uint64_t>(st) * 131 +
                      static_cast<std::uint64_t>(n) * 17 + static_cast<std::uint64_t>(blk));
  std::vector<Index> sizes(static_cast<size_t>(n), blk);
  Partition part(sizes);
  const Index dim = part.total();
  ProblemInstance p;
  p.A = random_mat(rng, dim, dim);
  p.B = random_mat(rng, dim, dim);
  p.F = random_mat(rng, dim, dim);
  p.structure = st;
  switch (st) {
    case Structure::RCC:
      p.part_m = part;
      p.part_q = part;
      break;
    case Structure::RRR:
      p.part_m = part;
      p.part_p = part;
      break;
    case Structure::CCR:
      p.part_r = part;
      p.part_q = part;
      p.part_m = part;
      break;
    case Structure::CRR:
      p.part_r = part;
      p.part_p = part;
      p.part_m = part;
      break;
    default:
      throw std::invalid_argument("bench_instance: canonical structures only");
  }
  return p;
}

void bench_field(benchmark::State& state, Structure st) {
  const int n = static_cast<int>(state.range(0));
  const Index blk = state.range(1);
  ProblemInstance p = bench_instance(st, n, blk);
  Network g = make_graph(GraphKind::cycle, n);
  System sys(p, g);
  Vec s = seeded_state(sys.state_dim(), 1);
  Vec out;
  for (auto _ : state) {
    out = sys.field(s);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
  state.counters["state_dim"] = static_cast<double>(sys.state_dim());
}

void bench_rk4_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ProblemInstance p = bench_instance(Structure::RRR, n, 2);
  Network g = make_graph(GraphKind::cycle, n);
  System sys(p, g);
  Vec s = seeded_state(sys.state_dim(), 2);
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 1e-4;  // exactly one step
  cfg.record_stride = 1 << 20;
  for (auto _ : state) {
    Trajectory traj = integrate(sys, s, cfg);
    benchmark::DoNotOptimize(traj.final_state().data());
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ProblemInstance p = bench_instance(Structure::RCC, n, 1);
  Network g = make_graph(GraphKind::cycle, n);
  System sys(p, g);
  for (auto _ : state) {
    LinearSystem ls = assemble_linear_system(sys);
    benchmark::DoNotOptimize(ls.m.data());
  }
  state.counters["state_dim"] = static_cast<double>(sys.state_dim());
}

void bench_semistability(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ProblemInstance p = bench_instance(Structure::RCC, n, 1);
  Network g = make_graph(GraphKind::cycle, n);
  LinearSystem ls = assemble_linear_system(p, g);
  for (auto _ : state) {
    SemistabilityReport rep = check_semistable(ls.m);
    benchmark::DoNotOptimize(rep.semistable);
  }
  state.counters["state_dim"] = static_cast<double>(ls.m.rows());
}

}  // namespace

BENCHMARK_CAPTURE(bench_field, rcc, Structure::RCC)->Args({4, 2})->Args({8, 2});
BENCHMARK_CAPTURE(bench_field, rrr, Structure::RRR)->Args({4, 2})->Args({8, 2});
BENCHMARK_CAPTURE(bench_field, ccr, Structure::CCR)->Args({4, 2})->Args({8, 2});
BENCHMARK_CAPTURE(bench_field, crr, Structure::CRR)->Args({4, 2})->Args({8, 2});
BENCHMARK(bench_rk4_step)->Arg(4)->Arg(8);
BENCHMARK(bench_assemble)->Arg(3)->Arg(5);
BENCHMARK(bench_semistability)->Arg(3)->Arg(5);

BENCHMARK_MAIN();
