#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "axbnet/dynamics.hpp"
#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"
#include "axbnet/problem.hpp"

namespace axbnet {

/// Largest state dimension the dense linear-system path will handle.
inline constexpr Index kAssembleCap = 4000;

enum class Method { RK4, Euler };
Method method_from_string(std::string_view s);
std::string to_string(Method m);

struct IntegratorConfig {
  Method method = Method::RK4;
  double dt = 1e-3;
  double t_end = 100.0;
  /// Halt once ||field(s)|| <= stop_tol * (1 + ||s||); 0 disables the rule.
  double stop_tol = 0.0;
  /// Record a snapshot every record_stride steps (>= 1).
  Index record_stride = 1;
};

struct SnapshotMetrics {
  double res_f = 0.0;       ///< ||A X B - F||_F at the extracted X
  double opt_res = 0.0;     ///< ||A^T (A X B - F) B^T||_F (unscaled)
  double cons_res = 0.0;    ///< root sum of squares of the constraint families
  double field_norm = 0.0;  ///< ||field(s)||
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<SnapshotMetrics> metrics;
  Index steps_taken = 0;
  bool stopped_early = false;

  size_t snapshots() const { return times.size(); }
  const Vec& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Fixed-step integration of the stacked flow. Snapshots are recorded at
/// t = 0, every record_stride steps, and at the final state. Throws
/// DivergenceError as soon as any state entry stops being finite.
Trajectory integrate(const System& sys, const Vec& s0, const IntegratorConfig& cfg);
Trajectory integrate(const ProblemInstance& p, const Network& g, const Vec& s0,
                     const IntegratorConfig& cfg);

/// The flow written as field(s) = m * s + b (every structure's field is
/// affine in the stacked state, so this is exact up to rounding).
struct LinearSystem {
  Mat m;
  Vec b;
};

/// Recovers (m, b) by probing the field with basis vectors.
/// Throws CapError when the state dimension exceeds cap.
LinearSystem assemble_linear_system(const System& sys, Index cap = kAssembleCap);
LinearSystem assemble_linear_system(const ProblemInstance& p, const Network& g,
                                    Index cap = kAssembleCap);

struct SemistabilityReport {
  bool semistable = false;
  double spectral_abscissa = 0.0;  ///< max real part over all eigenvalues
  double nonzero_abscissa = 0.0;   ///< max real part over eigenvalues with |z| > zero_tol
  double predicted_rate = 0.0;     ///< -nonzero_abscissa
  Index rank_m = 0;
  Index rank_m_sq = 0;
  double zero_tol = 0.0;  ///< threshold separating zero modes, 1e-8 * sigma_max
};

/// Semistability test: every eigenvalue real part <= zero_tol and the zero
/// eigenvalue is semisimple (rank M == rank M^2 at matching tolerance).
/// A semistable flow converges exponentially at predicted_rate.
SemistabilityReport check_semistable(const Mat& m);

/// V(state; s_star) at every snapshot. Requires s_star to be an equilibrium
/// at eq_tol (throws std::invalid_argument otherwise).
std::vector<double> lyapunov_monitor(const System& sys, const Trajectory& traj,
                                     const Vec& s_star, double eq_tol = 1e-6);
std::vector<double> lyapunov_monitor(const ProblemInstance& p, const Network& g,
                                     const Trajectory& traj, const Vec& s_star,
                                     double eq_tol = 1e-6);

struct RateFit {
  double rate = 0.0;  ///< decay rate of ||s(t) - s_star||, positive when converging
  double r2 = 0.0;    ///< coefficient of determination of the log-linear fit
  int points = 0;     ///< snapshots inside the fit window
};

/// Least-squares slope of log ||s(t) - s_star|| over the window where the
/// distance lies in [1e-9, 1e-2] times its initial value. Throws
/// std::runtime_error when fewer than two snapshots fall in the window.
RateFit estimate_rate(const Trajectory& traj, const Vec& s_star);

/// One Gauss-Newton step onto the equilibrium set: s + argmin_d ||m(s+d)+b||
/// with the minimum-norm d. Assembles the linear system (cap applies).
Vec refine_equilibrium(const System& sys, const Vec& s, Index cap = kAssembleCap);

/// Largest |eigenvalue| estimate of the linear map `apply` on R^dim via an
/// Arnoldi sweep with a deterministic start vector; includes a safety margin
/// so step-size caps derived from it stay conservative.
double spectral_radius_estimate(const std::function<Vec(const Vec&)>& apply, Index dim);

/// Reproducible start state: entries uniform on [-1, 1) drawn from
/// mt19937_64 raw output, identical bit pattern on every platform.
Vec seeded_state(Index dim, std::uint64_t seed);

struct SolveOptions {
  Method method = Method::RK4;
  double dt = 0.0;          ///< 0: choose 1/(2 rho) from the spectral estimate
  double t_end = 100.0;
  double stop_tol = 0.0;    ///< early-stop threshold on the field norm; 0 disables
  Index record_stride = 0;  ///< 0: choose a stride targeting ~2000 snapshots
  double tol = 1e-6;        ///< scaled optimality tolerance for the verdict
  bool seeded_init = false;
  std::uint64_t seed = 0;
  std::optional<int> pick_agent;  ///< readout: one agent's copy instead of the average
  bool want_rate = true;          ///< fit the exponential rate when feasible
};

struct SolveReport {
  Mat x;                      ///< solution in the orientation of the input problem
  Structure structure;        ///< structure of the input problem
  Structure solved_as;        ///< canonical structure actually integrated
  bool reduced = false;       ///< whether a transpose reduction was applied
  bool converged = false;
  double residual = 0.0;      ///< ||A X B - F||_F on the input problem
  double opt_residual = 0.0;  ///< unscaled optimality residual on the input problem
  double opt_residual_scaled = 0.0;
  std::optional<double> rate;
  std::optional<double> rate_r2;
  Index time_steps = 0;
  double t_final = 0.0;
  double dt_used = 0.0;
  Trajectory traj;
  std::vector<double> lyapunov;  ///< V per snapshot when a reference was found
};

/// End-to-end run: reduce to canonical form if needed, pick a stable step,
/// integrate, read out X (transposed back for reduced structures), and judge
/// convergence by the scaled optimality residual on the input problem.
SolveReport solve(const ProblemInstance& p, const Network& g, const SolveOptions& opt = {});

/// Header `t,res_F,opt_res,cons_res,field_norm[,V]`, one full-precision row
/// per snapshot. The V column appears when `lyapunov` is non-null.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<double>* lyapunov = nullptr);

}  // namespace axbnet
