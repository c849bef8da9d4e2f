#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "axbnet/matcore.hpp"
#include "axbnet/netgraph.hpp"
#include "axbnet/problem.hpp"

namespace axbnet {

/// Layout of all agents' state matrices inside one flat vector:
/// agent-major, field-minor, row-major inside each field.
/// Field order per structure:
///   RCC: X(r,p)  Y(m,p)   L1(r,p) L2(m,p) L3(m_i,p)
///   RRR: Xl(r,p_i) Y(r,q) Z(r,q)  L1(r,q) L2(r,q)
///   CCR: X(r,p)  Yv(r_i,q) U(m,q) W(m,q) Z(r,q) L1(r,p) L2(m,q) L3(r,q)
///   CRR: Xl(r,p_i) Yv(r_i,q) U(m,q) W(m,q) Z(r,q) L1(m,q) L2(r,q)
class StateLayout {
 public:
  struct Block {
    Index rows = 0, cols = 0, offset = 0;
  };

  StateLayout() = default;
  explicit StateLayout(const ProblemInstance& p);

  Index dim() const { return dim_; }
  int agents() const { return agents_; }
  int fields() const { return fields_; }
  const std::string& field_name(int field) const;
  const Block& block(int agent, int field) const;

  Eigen::Map<const Mat> view(const Vec& s, int agent, int field) const;
  Eigen::Map<Mat> view(Vec& s, int agent, int field) const;

 private:
  std::vector<Block> blocks_;  // agent-major, field-minor
  std::vector<std::string> names_;
  int agents_ = 0;
  int fields_ = 0;
  Index dim_ = 0;
};

/// reads[i] = set of agent indices whose blocks were touched while
/// evaluating agent i's derivative. Used by the locality audit.
struct AccessLog {
  std::vector<std::set<int>> reads;
};

/// One canonical instance bound to a connected network: evaluates the
/// distributed vector field and the quantities derived from it.
class System {
 public:
  System(ProblemInstance p, Network g);

  const ProblemInstance& problem() const { return problem_; }
  const Network& graph() const { return graph_; }
  const StateLayout& layout() const { return layout_; }
  Index state_dim() const { return layout_.dim(); }
  const std::vector<AgentView>& views() const { return views_; }

  /// Right-hand side of the stacked ODE. Evaluation is two-phase: all
  /// non-multiplier rates are computed first, then the multiplier rates,
  /// which may consume their own and their neighbors' first-phase rates.
  /// If log is given, records which agents' blocks each agent touched.
  Vec field(const Vec& s, AccessLog* log = nullptr) const;

  /// Frobenius norm of each constraint family of the reformulated problem.
  /// Consensus families use the Laplacian quadratic form
  /// sqrt(1/2 sum_ij a_ij |P_i - P_j|^2).
  std::map<std::string, double> constraint_residuals(const Vec& s) const;

  /// Root sum of squares over all constraint families.
  double constraint_total(const Vec& s) const;

  /// X readout: average of the agent copies (RCC, CCR) or concatenation of
  /// the column blocks (RRR, CRR). pick_agent substitutes one agent's copy
  /// for the average where copies exist; it is ignored for concatenating
  /// structures.
  Mat extract_solution(const Vec& s, std::optional<int> pick_agent = {}) const;

  /// True iff ||field(s)|| <= tol * (1 + ||s||).
  bool is_equilibrium(const Vec& s, double tol) const;

  /// Equilibrium assembled from a least-squares solution x_star: primal
  /// blocks take their consensus values and the multiplier blocks solve the
  /// stationarity equations, consensus-coupled components via the Laplacian
  /// pseudoinverse. The result has (numerically) zero field when x_star is
  /// optimal.
  Vec kkt_state(const Mat& x_star) const;

  /// Descent function V(s; s_star) from the convergence analysis of the
  /// structure's algorithm, evaluated against a reference equilibrium.
  /// Nonnegative and nonincreasing along trajectories.
  double lyapunov(const Vec& s, const Vec& s_star) const;

 private:
  struct Ctx;
  void phase1(Ctx& c, int i) const;
  void phase2(Ctx& c, int i) const;
  Mat consensus_rhs_sum(Ctx& c, int i, int field) const;
  Mat consensus_rate_sum(Ctx& c, int i, int field) const;
  double consensus_sq(const Vec& s, int field) const;
  std::vector<Mat> solve_consensus(const std::vector<Mat>& rhs) const;

  ProblemInstance problem_;
  Network graph_;
  StateLayout layout_;
  std::vector<AgentView> views_;
  std::vector<std::vector<std::pair<int, double>>> nbrs_;
  std::vector<Mat> f_embed_;  // CCR/CRR: agent i's F rows placed in an m x q zero matrix
  std::vector<Mat> b_embed_;  // CCR: agent i's B columns placed in a p x q zero matrix
  int n_ = 0;
};

/// Builds the state layout of a canonical instance without binding a graph.
StateLayout make_layout(const ProblemInstance& p);

// Per-structure entry points. Each requires the instance to carry its tag.
Vec field_rcc(const ProblemInstance& p, const Network& g, const Vec& s);
Vec field_rrr(const ProblemInstance& p, const Network& g, const Vec& s);
Vec field_ccr(const ProblemInstance& p, const Network& g, const Vec& s);
Vec field_crr(const ProblemInstance& p, const Network& g, const Vec& s);

std::map<std::string, double> constraint_residuals(const ProblemInstance& p, const Network& g,
                                                   const Vec& s);
Mat extract_solution(const ProblemInstance& p, const Vec& s,
                     std::optional<int> pick_agent = {});
bool is_equilibrium(const ProblemInstance& p, const Network& g, const Vec& s, double tol);

}  // namespace axbnet
