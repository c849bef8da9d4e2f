#include "axbnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "axbnet/errors.hpp"
#include "axbnet/oracle.hpp"

namespace axbnet {

Method method_from_string(std::string_view s) {
  if (s == "rk4") return Method::RK4;
  if (s == "euler") return Method::Euler;
  throw std::invalid_argument("unknown integration method: " + std::string(s));
}

std::string to_string(Method m) { return m == Method::RK4 ? "rk4" : "euler"; }

namespace {

Index step_count(double t_end, double dt) {
  return static_cast<Index>(std::ceil(t_end / dt - 1e-9));
}

SnapshotMetrics snapshot_metrics(const System& sys, const Vec& s, double field_norm) {
  const ProblemInstance& p = sys.problem();
  const Mat x = sys.extract_solution(s);
  SnapshotMetrics out;
  out.res_f = frob_norm(p.A * x * p.B - p.F);
  out.opt_res = optimality_residual(p, x);
  out.cons_res = sys.constraint_total(s);
  out.field_norm = field_norm;
  return out;
}

}  // namespace

Trajectory integrate(const System& sys, const Vec& s0, const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
  if (cfg.record_stride < 1) {
    throw std::invalid_argument("integrate: record_stride must be at least 1");
  }
  if (s0.size() != sys.state_dim()) {
    throw std::invalid_argument("integrate: initial state has wrong length");
  }
  if (!s0.allFinite()) {
    throw std::invalid_argument("integrate: initial state has non-finite entries");
  }

  const double dt = cfg.dt;
  const Index n_steps = step_count(cfg.t_end, dt);
  Trajectory traj;

  Vec s = s0;
  for (Index k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec f1 = sys.field(s);
    if (!f1.allFinite()) {
      throw DivergenceError("integration diverged: non-finite field at t=" + std::to_string(t),
                            t);
    }
    const double fn = f1.norm();
    const bool stop = cfg.stop_tol > 0.0 && fn <= cfg.stop_tol * (1.0 + s.norm());
    if (k % cfg.record_stride == 0 || k == n_steps || stop) {
      traj.times.push_back(t);
      traj.states.push_back(s);
      traj.metrics.push_back(snapshot_metrics(sys, s, fn));
    }
    if (stop) {
      traj.stopped_early = true;
      break;
    }
    if (k == n_steps) break;

    if (cfg.method == Method::RK4) {
      const Vec k2 = sys.field(s + (0.5 * dt) * f1);
      const Vec k3 = sys.field(s + (0.5 * dt) * k2);
      const Vec k4 = sys.field(s + dt * k3);
      s += (dt / 6.0) * (f1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      s += dt * f1;
    }
    traj.steps_taken = k + 1;
    if (!s.allFinite()) {
      const double t_next = static_cast<double>(k + 1) * dt;
      throw DivergenceError(
          "integration diverged: non-finite state at t=" + std::to_string(t_next), t_next);
    }
  }
  return traj;
}

Trajectory integrate(const ProblemInstance& p, const Network& g, const Vec& s0,
                     const IntegratorConfig& cfg) {
  return integrate(System(p, g), s0, cfg);
}

LinearSystem assemble_linear_system(const System& sys, Index cap) {
  const Index dim = sys.state_dim();
  if (dim > cap) {
    throw CapError("state dimension " + std::to_string(dim) +
                   " exceeds the dense assembly cap " + std::to_string(cap));
  }
  LinearSystem ls;
  ls.b = sys.field(Vec::Zero(dim));
  ls.m.resize(dim, dim);
  Vec e = Vec::Zero(dim);
  for (Index j = 0; j < dim; ++j) {
    e(j) = 1.0;
    ls.m.col(j) = sys.field(e) - ls.b;
    e(j) = 0.0;
  }
  return ls;
}

LinearSystem assemble_linear_system(const ProblemInstance& p, const Network& g, Index cap) {
  return assemble_linear_system(System(p, g), cap);
}

SemistabilityReport check_semistable(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("check_semistable: matrix must be square and nonempty");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("check_semistable: matrix has non-finite entries");
  }
  const Index n = m.rows();
  const Eigen::MatrixXd mc = m;
  const double eps = std::numeric_limits<double>::epsilon();

  Eigen::EigenSolver<Eigen::MatrixXd> eig(mc, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("check_semistable: eigensolver did not converge");
  }
  const Eigen::VectorXcd ev = eig.eigenvalues();

  // Spectral norm via the Gram matrix, whose extreme eigenvalue comes from
  // the symmetric tridiagonal solver.
  const auto spectral_norm = [](const Eigen::MatrixXd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * x, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  };
  const double smax = spectral_norm(mc);

  SemistabilityReport rep;
  rep.zero_tol = 1e-8 * smax;

  rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  double nz_abscissa = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k) {
    rep.spectral_abscissa = std::max(rep.spectral_abscissa, ev(k).real());
    if (std::abs(ev(k)) > rep.zero_tol) {
      any_nonzero = true;
      nz_abscissa = std::max(nz_abscissa, ev(k).real());
    }
  }
  rep.nonzero_abscissa = any_nonzero ? nz_abscissa : 0.0;
  rep.predicted_rate = -rep.nonzero_abscissa;

  // Zero-eigenvalue semisimplicity as a rank test: rank M == rank M^2, each
  // rank counted on the diagonal of a column-pivoted QR at the same relative
  // threshold. A Jordan chain at zero kills a direction of M^2 outright, so
  // it is still detected, and the gap between the kernel and the slowest
  // modes keeps the pivot count insensitive to the exact threshold.
  const auto rank_at = [](const Eigen::MatrixXd& x, double tol) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
    Index count = 0;
    for (Index k = 0; k < diag.size(); ++k) {
      if (diag(k) > tol) ++count;
    }
    return count;
  };
  const double tol1 = std::max(rep.zero_tol, static_cast<double>(n) * eps * smax);
  const Index rank1 = rank_at(mc, tol1);
  const Eigen::MatrixXd m2 = mc * mc;
  const double smax2 = spectral_norm(m2);
  const double tol2 = std::max(1e-8 * smax2, static_cast<double>(n) * eps * smax2);
  const Index rank2 = rank_at(m2, tol2);
  rep.rank_m = rank1;
  rep.rank_m_sq = rank2;
  rep.semistable = rep.spectral_abscissa <= rep.zero_tol && rank1 == rank2;
  return rep;
}

std::vector<double> lyapunov_monitor(const System& sys, const Trajectory& traj,
                                     const Vec& s_star, double eq_tol) {
  if (!sys.is_equilibrium(s_star, eq_tol)) {
    throw std::invalid_argument("lyapunov_monitor: reference state is not an equilibrium");
  }
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const Vec& s : traj.states) out.push_back(sys.lyapunov(s, s_star));
  return out;
}

std::vector<double> lyapunov_monitor(const ProblemInstance& p, const Network& g,
                                     const Trajectory& traj, const Vec& s_star,
                                     double eq_tol) {
  return lyapunov_monitor(System(p, g), traj, s_star, eq_tol);
}

RateFit estimate_rate(const Trajectory& traj, const Vec& s_star) {
  if (traj.states.empty()) throw std::invalid_argument("estimate_rate: empty trajectory");
  const double d0 = (traj.states.front() - s_star).norm();
  const double lo = 1e-9 * d0;
  const double hi = 1e-2 * d0;

  std::vector<double> ts, ys;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    const double d = (traj.states[k] - s_star).norm();
    if (d > 0.0 && d >= lo && d <= hi) {
      ts.push_back(traj.times[k]);
      ys.push_back(std::log(d));
    }
  }
  if (ts.size() < 2) {
    throw std::runtime_error(
        "estimate_rate: fit window is empty; the trajectory has not converged far enough");
  }

  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    my += ys[k];
  }
  mt /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t k = 0; k < ts.size(); ++k) {
    const double dx = ts[k] - mt;
    const double dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::runtime_error("estimate_rate: degenerate time window");
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (size_t k = 0; k < ts.size(); ++k) {
    const double pred = my + slope * (ts[k] - mt);
    ss_res += (ys[k] - pred) * (ys[k] - pred);
  }
  RateFit fit;
  fit.rate = -slope;
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points = static_cast<int>(ts.size());
  return fit;
}

Vec refine_equilibrium(const System& sys, const Vec& s, Index cap) {
  if (s.size() != sys.state_dim()) {
    throw std::invalid_argument("refine_equilibrium: state vector has wrong length");
  }
  const LinearSystem ls = assemble_linear_system(sys, cap);
  const Eigen::MatrixXd m = ls.m;
  const Vec rhs = -(ls.m * s + ls.b);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  const Vec delta = cod.solve(rhs);
  return s + delta;
}

double spectral_radius_estimate(const std::function<Vec(const Vec&)>& apply, Index dim) {
  if (dim <= 0) throw std::invalid_argument("spectral_radius_estimate: empty space");
  const Index m = std::min<Index>(dim, 48);

  std::vector<Vec> basis;
  basis.reserve(static_cast<size_t>(m) + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);

  Vec v0 = seeded_state(dim, 0x9e3779b97f4a7c15ull);
  if (v0.norm() == 0.0) v0 = Vec::Ones(dim);
  basis.push_back(v0 / v0.norm());

  Index steps = 0;
  for (Index k = 0; k < m; ++k) {
    Vec w = apply(basis[static_cast<size_t>(k)]);
    if (static_cast<Index>(w.size()) != dim || !w.allFinite()) {
      throw std::runtime_error("spectral_radius_estimate: bad matvec result");
    }
    // modified Gram-Schmidt, two passes for orthogonality at small subspaces
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j <= k; ++j) {
        const double c = basis[static_cast<size_t>(j)].dot(w);
        h(j, k) += c;
        w -= c * basis[static_cast<size_t>(j)];
      }
    }
    const double beta = w.norm();
    h(k + 1, k) = beta;
    steps = k + 1;
    if (beta <= 1e-12 * (1.0 + h.topLeftCorner(k + 2, k + 1).norm())) break;
    basis.push_back(w / beta);
  }

  const Eigen::MatrixXd hk = h.topLeftCorner(steps, steps);
  Eigen::EigenSolver<Eigen::MatrixXd> eig(hk, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("spectral_radius_estimate: eigensolver did not converge");
  }
  const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
  return 1.1 * rho;  // Ritz values can undershoot; pad so derived caps stay safe
}

Vec seeded_state(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vec v(dim);
  for (Index i = 0; i < dim; ++i) {
    const std::uint64_t bits = rng();
    // top 53 bits to [0,1), affinely to [-1,1); identical on every platform
    v(i) = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
  }
  return v;
}

SolveReport solve(const ProblemInstance& p, const Network& g, const SolveOptions& opt) {
  validate(p);
  SolveReport rep;
  rep.structure = p.structure;
  rep.solved_as = canonical_of(p.structure);
  rep.reduced = !is_canonical(p.structure);
  const ProblemInstance pc = rep.reduced ? to_canonical(p) : p;
  const System sys(pc, g);
  const Index dim = sys.state_dim();

  // Stable step size from the spectral radius of the linear part, probed
  // through the field itself so no dense assembly is needed.
  const Vec affine = sys.field(Vec::Zero(dim));
  const double rho = spectral_radius_estimate(
      [&](const Vec& v) { return Vec(sys.field(v) - affine); }, dim);
  double dt = opt.dt;
  if (dt <= 0.0) {
    dt = rho > 0.0 ? 1.0 / (2.0 * rho) : 1e-3;
  } else if (rho > 0.0 && dt > 1.8 / rho) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "solve: dt=%g exceeds the stability cap 1.8/rho=%g for this instance", dt,
                  1.8 / rho);
    throw std::invalid_argument(msg);
  }

  IntegratorConfig cfg;
  cfg.method = opt.method;
  cfg.dt = dt;
  cfg.t_end = opt.t_end;
  cfg.stop_tol = opt.stop_tol;
  cfg.record_stride = opt.record_stride > 0
                          ? opt.record_stride
                          : std::max<Index>(1, step_count(opt.t_end, dt) / 2000);

  const Vec s0 = opt.seeded_init ? seeded_state(dim, opt.seed) : Vec::Zero(dim);
  rep.traj = integrate(sys, s0, cfg);
  rep.time_steps = rep.traj.steps_taken;
  rep.t_final = rep.traj.final_time();
  rep.dt_used = dt;

  const Mat xc = sys.extract_solution(rep.traj.final_state(), opt.pick_agent);
  rep.x = rep.reduced ? Mat(xc.transpose()) : xc;
  rep.residual = frob_norm(p.A * rep.x * p.B - p.F);
  rep.opt_residual = optimality_residual(p, rep.x);
  rep.opt_residual_scaled = rep.opt_residual / optimality_scale(p, rep.x);
  rep.converged = rep.opt_residual_scaled <= opt.tol;

  if (opt.want_rate && dim <= kAssembleCap) {
    try {
      const Vec s_star = refine_equilibrium(sys, rep.traj.final_state());
      if (sys.is_equilibrium(s_star, 1e-6)) {
        rep.lyapunov = lyapunov_monitor(sys, rep.traj, s_star);
        try {
          const RateFit fit = estimate_rate(rep.traj, s_star);
          rep.rate = fit.rate;
          rep.rate_r2 = fit.r2;
        } catch (const std::runtime_error&) {
          // window empty: trajectory too short for a rate; report without one
        }
      }
    } catch (const CapError&) {
      // beyond desk scale: no refined reference, no rate
    }
  }
  return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<double>* lyapunov) {
  if (lyapunov && lyapunov->size() != traj.snapshots()) {
    throw std::invalid_argument("write_trajectory_csv: V series length mismatch");
  }
  os << "t,res_F,opt_res,cons_res,field_norm";
  if (lyapunov) os << ",V";
  os << "\n";
  char buf[640];
  for (size_t k = 0; k < traj.snapshots(); ++k) {
    const SnapshotMetrics& m = traj.metrics[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", traj.times[k], m.res_f,
                  m.opt_res, m.cons_res, m.field_norm);
    os << buf;
    if (lyapunov) {
      std::snprintf(buf, sizeof buf, ",%.17g", (*lyapunov)[k]);
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace axbnet
