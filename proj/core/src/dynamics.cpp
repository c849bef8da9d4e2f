#include "axbnet/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/SVD>

#include "axbnet/errors.hpp"

namespace axbnet {

namespace {

// Field indices inside the per-agent slab, by structure.
namespace rcc {
constexpr int kX = 0, kY = 1, kL1 = 2, kL2 = 3, kL3 = 4;
}
namespace rrr {
constexpr int kXl = 0, kY = 1, kZ = 2, kL1 = 3, kL2 = 4;
}
namespace ccr {
constexpr int kX = 0, kYv = 1, kU = 2, kW = 3, kZ = 4, kL1 = 5, kL2 = 6, kL3 = 7;
}
namespace crr {
constexpr int kXl = 0, kYv = 1, kU = 2, kW = 3, kZ = 4, kL1 = 5, kL2 = 6;
}

}  // namespace

StateLayout::StateLayout(const ProblemInstance& p) {
  validate(p);
  if (!is_canonical(p.structure)) {
    throw std::invalid_argument("state layout: structure " + to_string(p.structure) +
                                " must be reduced to its canonical partner first");
  }
  const Index m = p.A.rows();
  const Index r = p.A.cols();
  const Index pp = p.B.rows();
  const Index q = p.B.cols();
  agents_ = block_count(p);

  // shape(i, field) for one agent; {rows, cols} pairs in field order.
  auto shapes_for = [&](int i) -> std::vector<std::pair<Index, Index>> {
    switch (p.structure) {
      case Structure::RCC: {
        const Index mi = p.part_m.size(i);
        return {{r, pp}, {m, pp}, {r, pp}, {m, pp}, {mi, pp}};
      }
      case Structure::RRR: {
        const Index pi = p.part_p.size(i);
        return {{r, pi}, {r, q}, {r, q}, {r, q}, {r, q}};
      }
      case Structure::CCR: {
        const Index ri = p.part_r.size(i);
        return {{r, pp}, {ri, q}, {m, q}, {m, q}, {r, q}, {r, pp}, {m, q}, {r, q}};
      }
      case Structure::CRR: {
        const Index ri = p.part_r.size(i);
        const Index pi = p.part_p.size(i);
        return {{r, pi}, {ri, q}, {m, q}, {m, q}, {r, q}, {m, q}, {r, q}};
      }
      default:
        throw std::logic_error("unreachable");
    }
  };
  switch (p.structure) {
    case Structure::RCC:
      names_ = {"x", "y", "lambda1", "lambda2", "lambda3"};
      break;
    case Structure::RRR:
      names_ = {"xl", "y", "z", "lambda1", "lambda2"};
      break;
    case Structure::CCR:
      names_ = {"x", "yv", "u", "w", "z", "lambda1", "lambda2", "lambda3"};
      break;
    case Structure::CRR:
      names_ = {"xl", "yv", "u", "w", "z", "lambda1", "lambda2"};
      break;
    default:
      throw std::logic_error("unreachable");
  }
  fields_ = static_cast<int>(names_.size());

  blocks_.reserve(static_cast<size_t>(agents_) * fields_);
  Index at = 0;
  for (int i = 0; i < agents_; ++i) {
    for (auto [rows, cols] : shapes_for(i)) {
      blocks_.push_back(Block{rows, cols, at});
      at += rows * cols;
    }
  }
  dim_ = at;
}

const std::string& StateLayout::field_name(int field) const {
  if (field < 0 || field >= fields_) throw std::out_of_range("field index");
  return names_[static_cast<size_t>(field)];
}

const StateLayout::Block& StateLayout::block(int agent, int field) const {
  if (agent < 0 || agent >= agents_ || field < 0 || field >= fields_) {
    throw std::out_of_range("state block index");
  }
  return blocks_[static_cast<size_t>(agent) * fields_ + field];
}

Eigen::Map<const Mat> StateLayout::view(const Vec& s, int agent, int field) const {
  if (s.size() != dim_) throw std::invalid_argument("state vector has wrong length");
  const Block& b = block(agent, field);
  return Eigen::Map<const Mat>(s.data() + b.offset, b.rows, b.cols);
}

Eigen::Map<Mat> StateLayout::view(Vec& s, int agent, int field) const {
  if (s.size() != dim_) throw std::invalid_argument("state vector has wrong length");
  const Block& b = block(agent, field);
  return Eigen::Map<Mat>(s.data() + b.offset, b.rows, b.cols);
}

StateLayout make_layout(const ProblemInstance& p) { return StateLayout(p); }

// Accessor tying a state vector, the derivative buffer being filled, and the
// read log together. Every read is attributed to the agent whose derivative
// is currently being evaluated.
struct System::Ctx {
  const StateLayout& ly;
  const Vec& s;
  Vec& ds;
  AccessLog* log = nullptr;
  int reader = -1;

  void note(int agent) {
    if (log && reader >= 0) log->reads[static_cast<size_t>(reader)].insert(agent);
  }
  Eigen::Map<const Mat> st(int agent, int field) {
    note(agent);
    return ly.view(s, agent, field);
  }
  // First-phase rate of an agent's block; only valid in phase two, and only
  // for blocks phase one has already written.
  Eigen::Map<const Mat> d1(int agent, int field) {
    note(agent);
    return ly.view(std::as_const(ds), agent, field);
  }
  Eigen::Map<Mat> out(int agent, int field) { return ly.view(ds, agent, field); }
};

System::System(ProblemInstance p, Network g)
    : problem_(std::move(p)), graph_(std::move(g)) {
  validate(problem_);
  if (!is_canonical(problem_.structure)) {
    throw std::invalid_argument("dynamics: structure " + to_string(problem_.structure) +
                                " must be reduced to its canonical partner first");
  }
  validate(graph_);
  if (!is_connected(graph_)) {
    throw DisconnectedError("dynamics: communication graph is disconnected");
  }
  n_ = graph_.n;
  if (n_ != block_count(problem_)) {
    throw std::invalid_argument("dynamics: graph size does not match the block count");
  }
  layout_ = StateLayout(problem_);
  views_ = partition_views(problem_, graph_);

  nbrs_.resize(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double w = graph_.weights(i, j);
      if (j != i && w > 0.0) nbrs_[static_cast<size_t>(i)].push_back({j, w});
    }
  }

  // Zero-padded embeddings used by the column-split structures, where each
  // agent knows full-height slices: its F rows inside an m x q zero matrix,
  // and (for CCR) its B columns inside a p x q zero matrix.
  if (problem_.structure == Structure::CCR || problem_.structure == Structure::CRR) {
    f_embed_.reserve(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      f_embed_.push_back(embed_row(views_[static_cast<size_t>(i)].f, problem_.part_m, i));
    }
  }
  if (problem_.structure == Structure::CCR) {
    b_embed_.reserve(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      b_embed_.push_back(embed_col(views_[static_cast<size_t>(i)].b, problem_.part_q, i));
    }
  }
}

Mat System::consensus_rhs_sum(Ctx& c, int i, int field) const {
  auto pi = c.st(i, field);
  Mat acc = Mat::Zero(pi.rows(), pi.cols());
  for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) acc += w * (pi - c.st(j, field));
  return acc;
}

Mat System::consensus_rate_sum(Ctx& c, int i, int field) const {
  auto pi = c.d1(i, field);
  Mat acc = Mat::Zero(pi.rows(), pi.cols());
  for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) acc += w * (pi - c.d1(j, field));
  return acc;
}

void System::phase1(Ctx& c, int i) const {
  const AgentView& v = views_[static_cast<size_t>(i)];
  switch (problem_.structure) {
    case Structure::RCC: {
      // v.a: rows of A (m_i x r); v.b: columns of B (p x q_i);
      // v.f: columns of F (m x q_i). The whole field is single-phase.
      auto xi = c.st(i, rcc::kX);
      auto yi = c.st(i, rcc::kY);
      auto l3 = c.st(i, rcc::kL3);
      const Index off = problem_.part_m.offset(i);
      const Index len = problem_.part_m.size(i);
      const Mat resid = v.a * xi - yi.middleRows(off, len);

      c.out(i, rcc::kX) = -v.a.transpose() * (resid + l3) -
                          consensus_rhs_sum(c, i, rcc::kL1) - consensus_rhs_sum(c, i, rcc::kX);
      Mat dy = -(yi * v.b - v.f) * v.b.transpose() - consensus_rhs_sum(c, i, rcc::kY) -
               consensus_rhs_sum(c, i, rcc::kL2);
      dy.middleRows(off, len) += l3 + resid;
      c.out(i, rcc::kY) = dy;
      c.out(i, rcc::kL1) = consensus_rhs_sum(c, i, rcc::kX);
      c.out(i, rcc::kL2) = consensus_rhs_sum(c, i, rcc::kY);
      c.out(i, rcc::kL3) = resid;
      break;
    }
    case Structure::RRR: {
      // v.a: rows of A (m_i x r); v.b: rows of B (p_i x q);
      // v.f: rows of F (m_i x q).
      auto yi = c.st(i, rrr::kY);
      auto l1 = c.st(i, rrr::kL1);
      c.out(i, rrr::kXl) = l1 * v.b.transpose();
      c.out(i, rrr::kY) = -v.a.transpose() * (v.a * yi - v.f) -
                          consensus_rhs_sum(c, i, rrr::kY) - l1 / n_ -
                          consensus_rhs_sum(c, i, rrr::kL2);
      c.out(i, rrr::kZ) = -consensus_rhs_sum(c, i, rrr::kL1);
      break;
    }
    case Structure::CCR: {
      // v.a: columns of A (m x r_i); v.b: columns of B (p x q_i);
      // v.f: rows of F (m_i x q).
      auto yv = c.st(i, ccr::kYv);
      auto ui = c.st(i, ccr::kU);
      auto l2 = c.st(i, ccr::kL2);
      auto l3 = c.st(i, ccr::kL3);
      const Mat& bc = b_embed_[static_cast<size_t>(i)];
      const Index off = problem_.part_r.offset(i);
      const Index len = problem_.part_r.size(i);
      const Mat mismatch = v.a * yv - f_embed_[static_cast<size_t>(i)] - ui;

      c.out(i, ccr::kX) = l3 * bc.transpose() - consensus_rhs_sum(c, i, ccr::kL1) -
                          consensus_rhs_sum(c, i, ccr::kX);
      c.out(i, ccr::kYv) = -v.a.transpose() * mismatch - l3.middleRows(off, len);
      c.out(i, ccr::kU) = mismatch - l2;
      c.out(i, ccr::kW) = consensus_rhs_sum(c, i, ccr::kL2);
      c.out(i, ccr::kZ) = consensus_rhs_sum(c, i, ccr::kL3);
      c.out(i, ccr::kL1) = consensus_rhs_sum(c, i, ccr::kX);
      break;
    }
    case Structure::CRR: {
      // v.a: columns of A (m x r_i); v.b: rows of B (p_i x q);
      // v.f: rows of F (m_i x q).
      auto yv = c.st(i, crr::kYv);
      auto ui = c.st(i, crr::kU);
      auto l1 = c.st(i, crr::kL1);
      auto l2 = c.st(i, crr::kL2);
      const Index off = problem_.part_r.offset(i);
      const Index len = problem_.part_r.size(i);
      const Mat mismatch = v.a * yv - f_embed_[static_cast<size_t>(i)] - ui;

      c.out(i, crr::kXl) = l2 * v.b.transpose();
      c.out(i, crr::kYv) = -v.a.transpose() * mismatch - l2.middleRows(off, len);
      c.out(i, crr::kU) = mismatch - l1;
      c.out(i, crr::kW) = consensus_rhs_sum(c, i, crr::kL1);
      c.out(i, crr::kZ) = consensus_rhs_sum(c, i, crr::kL2);
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
}

void System::phase2(Ctx& c, int i) const {
  const AgentView& v = views_[static_cast<size_t>(i)];
  switch (problem_.structure) {
    case Structure::RCC:
      break;  // single-phase
    case Structure::RRR: {
      auto yi = c.st(i, rrr::kY);
      auto xl = c.st(i, rrr::kXl);
      c.out(i, rrr::kL1) = (yi + c.d1(i, rrr::kY)) / n_ -
                           (xl + c.d1(i, rrr::kXl)) * v.b +
                           consensus_rhs_sum(c, i, rrr::kZ) -
                           consensus_rhs_sum(c, i, rrr::kL1);
      c.out(i, rrr::kL2) =
          consensus_rhs_sum(c, i, rrr::kY) + consensus_rate_sum(c, i, rrr::kY);
      break;
    }
    case Structure::CCR: {
      auto xi = c.st(i, ccr::kX);
      auto yv = c.st(i, ccr::kYv);
      auto ui = c.st(i, ccr::kU);
      const Mat& bc = b_embed_[static_cast<size_t>(i)];
      const Index off = problem_.part_r.offset(i);
      const Index len = problem_.part_r.size(i);

      c.out(i, ccr::kL2) = ui + c.d1(i, ccr::kU) - consensus_rhs_sum(c, i, ccr::kW) -
                           consensus_rhs_sum(c, i, ccr::kL2);
      Mat dl3 = -xi * bc - consensus_rhs_sum(c, i, ccr::kZ) -
                consensus_rhs_sum(c, i, ccr::kL3);
      dl3.middleRows(off, len) += yv + c.d1(i, ccr::kYv);
      c.out(i, ccr::kL3) = dl3;
      break;
    }
    case Structure::CRR: {
      auto xl = c.st(i, crr::kXl);
      auto yv = c.st(i, crr::kYv);
      auto ui = c.st(i, crr::kU);
      const Index off = problem_.part_r.offset(i);
      const Index len = problem_.part_r.size(i);

      c.out(i, crr::kL1) = ui + c.d1(i, crr::kU) - consensus_rhs_sum(c, i, crr::kW) -
                           consensus_rhs_sum(c, i, crr::kL1);
      Mat dl2 = -(xl + c.d1(i, crr::kXl)) * v.b - consensus_rhs_sum(c, i, crr::kZ) -
                consensus_rhs_sum(c, i, crr::kL2);
      dl2.middleRows(off, len) += yv + c.d1(i, crr::kYv);
      c.out(i, crr::kL2) = dl2;
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
}

Vec System::field(const Vec& s, AccessLog* log) const {
  if (s.size() != layout_.dim()) {
    throw std::invalid_argument("field: state vector has wrong length");
  }
  if (log) log->reads.assign(static_cast<size_t>(n_), {});
  Vec ds = Vec::Zero(layout_.dim());
  Ctx c{layout_, s, ds, log, -1};
  for (int i = 0; i < n_; ++i) {
    c.reader = i;
    phase1(c, i);
  }
  for (int i = 0; i < n_; ++i) {
    c.reader = i;
    phase2(c, i);
  }
  return ds;
}

double System::consensus_sq(const Vec& s, int field) const {
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) {
    auto pi = layout_.view(s, i, field);
    for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) {
      acc += w * (pi - layout_.view(s, j, field)).squaredNorm();
    }
  }
  return 0.5 * acc;
}

std::map<std::string, double> System::constraint_residuals(const Vec& s) const {
  if (s.size() != layout_.dim()) {
    throw std::invalid_argument("constraint_residuals: state vector has wrong length");
  }
  std::map<std::string, double> out;
  switch (problem_.structure) {
    case Structure::RCC: {
      out["consensus_x"] = std::sqrt(consensus_sq(s, rcc::kX));
      out["consensus_y"] = std::sqrt(consensus_sq(s, rcc::kY));
      double local = 0.0;
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        auto xi = layout_.view(s, i, rcc::kX);
        auto yi = layout_.view(s, i, rcc::kY);
        local += (v.a * xi -
                  yi.middleRows(problem_.part_m.offset(i), problem_.part_m.size(i)))
                     .squaredNorm();
      }
      out["local"] = std::sqrt(local);
      break;
    }
    case Structure::RRR: {
      out["consensus_y"] = std::sqrt(consensus_sq(s, rrr::kY));
      double coup = 0.0;
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        auto yi = layout_.view(s, i, rrr::kY);
        auto xl = layout_.view(s, i, rrr::kXl);
        auto zi = layout_.view(s, i, rrr::kZ);
        Mat g = yi / n_ - xl * v.b;
        for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) {
          g += w * (zi - layout_.view(s, j, rrr::kZ));
        }
        coup += g.squaredNorm();
      }
      out["coupling_x"] = std::sqrt(coup);
      break;
    }
    case Structure::CCR: {
      out["consensus_x"] = std::sqrt(consensus_sq(s, ccr::kX));
      double cu = 0.0, cy = 0.0;
      for (int i = 0; i < n_; ++i) {
        auto ui = layout_.view(s, i, ccr::kU);
        auto wi = layout_.view(s, i, ccr::kW);
        auto xi = layout_.view(s, i, ccr::kX);
        auto yv = layout_.view(s, i, ccr::kYv);
        auto zi = layout_.view(s, i, ccr::kZ);
        Mat gu = ui;
        Mat gy = -xi * b_embed_[static_cast<size_t>(i)];
        gy.middleRows(problem_.part_r.offset(i), problem_.part_r.size(i)) += yv;
        for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) {
          gu -= w * (wi - layout_.view(s, j, ccr::kW));
          gy -= w * (zi - layout_.view(s, j, ccr::kZ));
        }
        cu += gu.squaredNorm();
        cy += gy.squaredNorm();
      }
      out["coupling_u"] = std::sqrt(cu);
      out["coupling_y"] = std::sqrt(cy);
      break;
    }
    case Structure::CRR: {
      double cu = 0.0, cy = 0.0;
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        auto ui = layout_.view(s, i, crr::kU);
        auto wi = layout_.view(s, i, crr::kW);
        auto xl = layout_.view(s, i, crr::kXl);
        auto yv = layout_.view(s, i, crr::kYv);
        auto zi = layout_.view(s, i, crr::kZ);
        Mat gu = ui;
        Mat gy = -xl * v.b;
        gy.middleRows(problem_.part_r.offset(i), problem_.part_r.size(i)) += yv;
        for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) {
          gu -= w * (wi - layout_.view(s, j, crr::kW));
          gy -= w * (zi - layout_.view(s, j, crr::kZ));
        }
        cu += gu.squaredNorm();
        cy += gy.squaredNorm();
      }
      out["coupling_u"] = std::sqrt(cu);
      out["coupling_y"] = std::sqrt(cy);
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
  return out;
}

double System::constraint_total(const Vec& s) const {
  double acc = 0.0;
  for (const auto& [name, val] : constraint_residuals(s)) acc += val * val;
  return std::sqrt(acc);
}

Mat System::extract_solution(const Vec& s, std::optional<int> pick_agent) const {
  if (s.size() != layout_.dim()) {
    throw std::invalid_argument("extract_solution: state vector has wrong length");
  }
  if (pick_agent && (*pick_agent < 0 || *pick_agent >= n_)) {
    throw std::invalid_argument("extract_solution: agent index out of range");
  }
  switch (problem_.structure) {
    case Structure::RCC:
    case Structure::CCR: {
      const int fx = (problem_.structure == Structure::RCC) ? rcc::kX : ccr::kX;
      if (pick_agent) return layout_.view(s, *pick_agent, fx);
      Mat acc = Mat::Zero(problem_.A.cols(), problem_.B.rows());
      for (int i = 0; i < n_; ++i) acc += layout_.view(s, i, fx);
      return acc / n_;
    }
    case Structure::RRR:
    case Structure::CRR: {
      const int fx = (problem_.structure == Structure::RRR) ? rrr::kXl : crr::kXl;
      Mat x(problem_.A.cols(), problem_.B.rows());
      for (int i = 0; i < n_; ++i) {
        x.middleCols(problem_.part_p.offset(i), problem_.part_p.size(i)) =
            layout_.view(s, i, fx);
      }
      return x;
    }
    default:
      throw std::logic_error("unreachable");
  }
}

bool System::is_equilibrium(const Vec& s, double tol) const {
  return field(s).norm() <= tol * (1.0 + s.norm());
}

// Solves sum_j a_ij (P_i - P_j) = rhs_i for {P_i} via the Laplacian
// pseudoinverse; consistent exactly when the rhs blocks sum to zero.
std::vector<Mat> System::solve_consensus(const std::vector<Mat>& rhs) const {
  const Mat lap = laplacian(graph_);
  Eigen::JacobiSVD<Mat> svd(lap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double cut = n_ * std::numeric_limits<double>::epsilon() * sv(0);
  Mat pinv = Mat::Zero(n_, n_);
  for (int k = 0; k < n_; ++k) {
    if (sv(k) > cut) {
      pinv += (1.0 / sv(k)) * (svd.matrixV().col(k) * svd.matrixU().col(k).transpose());
    }
  }
  std::vector<Mat> out(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    Mat acc = Mat::Zero(rhs[0].rows(), rhs[0].cols());
    for (int j = 0; j < n_; ++j) acc += pinv(i, j) * rhs[static_cast<size_t>(j)];
    out[static_cast<size_t>(i)] = std::move(acc);
  }
  return out;
}

Vec System::kkt_state(const Mat& x_star) const {
  if (x_star.rows() != problem_.A.cols() || x_star.cols() != problem_.B.rows()) {
    throw std::invalid_argument("kkt_state: x_star has wrong shape");
  }
  Vec s = Vec::Zero(layout_.dim());
  switch (problem_.structure) {
    case Structure::RCC: {
      const Mat y_star = problem_.A * x_star;  // m x p
      const Mat l3_full = (y_star * problem_.B - problem_.F) * problem_.B.transpose();
      std::vector<Mat> h(static_cast<size_t>(n_)), k(static_cast<size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        const Mat l3 = block_row(l3_full, problem_.part_m, i);
        h[static_cast<size_t>(i)] = -v.a.transpose() * l3;
        Mat ki = -(y_star * v.b - v.f) * v.b.transpose();
        ki.middleRows(problem_.part_m.offset(i), problem_.part_m.size(i)) += l3;
        k[static_cast<size_t>(i)] = std::move(ki);
      }
      const std::vector<Mat> l1 = solve_consensus(h);
      const std::vector<Mat> l2 = solve_consensus(k);
      for (int i = 0; i < n_; ++i) {
        layout_.view(s, i, rcc::kX) = x_star;
        layout_.view(s, i, rcc::kY) = y_star;
        layout_.view(s, i, rcc::kL1) = l1[static_cast<size_t>(i)];
        layout_.view(s, i, rcc::kL2) = l2[static_cast<size_t>(i)];
        layout_.view(s, i, rcc::kL3) = block_row(l3_full, problem_.part_m, i);
      }
      break;
    }
    case Structure::RRR: {
      const Mat y_bar = x_star * problem_.B;  // r x q
      const Mat l1_bar =
          -problem_.A.transpose() * (problem_.A * y_bar - problem_.F);
      std::vector<Mat> k(static_cast<size_t>(n_)), g(static_cast<size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        const Mat xl = block_col(x_star, problem_.part_p, i);
        k[static_cast<size_t>(i)] =
            -v.a.transpose() * (v.a * y_bar - v.f) - l1_bar / n_;
        g[static_cast<size_t>(i)] = xl * v.b - y_bar / n_;
      }
      const std::vector<Mat> l2 = solve_consensus(k);
      const std::vector<Mat> z = solve_consensus(g);
      for (int i = 0; i < n_; ++i) {
        layout_.view(s, i, rrr::kXl) = block_col(x_star, problem_.part_p, i);
        layout_.view(s, i, rrr::kY) = y_bar;
        layout_.view(s, i, rrr::kZ) = z[static_cast<size_t>(i)];
        layout_.view(s, i, rrr::kL1) = l1_bar;
        layout_.view(s, i, rrr::kL2) = l2[static_cast<size_t>(i)];
      }
      break;
    }
    case Structure::CCR: {
      const Mat y_full = x_star * problem_.B;  // r x q
      const Mat l2_bar = (problem_.A * y_full - problem_.F) / n_;
      const Mat l3_bar = -problem_.A.transpose() * l2_bar;
      std::vector<Mat> u(static_cast<size_t>(n_)), g(static_cast<size_t>(n_)),
          h(static_cast<size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        const Mat yv = block_row(y_full, problem_.part_r, i);
        u[static_cast<size_t>(i)] = v.a * yv - f_embed_[static_cast<size_t>(i)] - l2_bar;
        Mat gi = -x_star * b_embed_[static_cast<size_t>(i)];
        gi.middleRows(problem_.part_r.offset(i), problem_.part_r.size(i)) += yv;
        g[static_cast<size_t>(i)] = std::move(gi);
        h[static_cast<size_t>(i)] = l3_bar * b_embed_[static_cast<size_t>(i)].transpose();
      }
      const std::vector<Mat> w = solve_consensus(u);
      const std::vector<Mat> z = solve_consensus(g);
      const std::vector<Mat> l1 = solve_consensus(h);
      for (int i = 0; i < n_; ++i) {
        layout_.view(s, i, ccr::kX) = x_star;
        layout_.view(s, i, ccr::kYv) = block_row(y_full, problem_.part_r, i);
        layout_.view(s, i, ccr::kU) = u[static_cast<size_t>(i)];
        layout_.view(s, i, ccr::kW) = w[static_cast<size_t>(i)];
        layout_.view(s, i, ccr::kZ) = z[static_cast<size_t>(i)];
        layout_.view(s, i, ccr::kL1) = l1[static_cast<size_t>(i)];
        layout_.view(s, i, ccr::kL2) = l2_bar;
        layout_.view(s, i, ccr::kL3) = l3_bar;
      }
      break;
    }
    case Structure::CRR: {
      const Mat y_full = x_star * problem_.B;  // r x q
      const Mat l1_bar = (problem_.A * y_full - problem_.F) / n_;
      const Mat l2_bar = -problem_.A.transpose() * l1_bar;
      std::vector<Mat> u(static_cast<size_t>(n_)), g(static_cast<size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        const Mat yv = block_row(y_full, problem_.part_r, i);
        const Mat xl = block_col(x_star, problem_.part_p, i);
        u[static_cast<size_t>(i)] = v.a * yv - f_embed_[static_cast<size_t>(i)] - l1_bar;
        Mat gi = -xl * v.b;
        gi.middleRows(problem_.part_r.offset(i), problem_.part_r.size(i)) += yv;
        g[static_cast<size_t>(i)] = std::move(gi);
      }
      const std::vector<Mat> w = solve_consensus(u);
      const std::vector<Mat> z = solve_consensus(g);
      for (int i = 0; i < n_; ++i) {
        layout_.view(s, i, crr::kXl) = block_col(x_star, problem_.part_p, i);
        layout_.view(s, i, crr::kYv) = block_row(y_full, problem_.part_r, i);
        layout_.view(s, i, crr::kU) = u[static_cast<size_t>(i)];
        layout_.view(s, i, crr::kW) = w[static_cast<size_t>(i)];
        layout_.view(s, i, crr::kZ) = z[static_cast<size_t>(i)];
        layout_.view(s, i, crr::kL1) = l1_bar;
        layout_.view(s, i, crr::kL2) = l2_bar;
      }
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
  return s;
}

double System::lyapunov(const Vec& s, const Vec& s_star) const {
  if (s.size() != layout_.dim() || s_star.size() != layout_.dim()) {
    throw std::invalid_argument("lyapunov: state vector has wrong length");
  }
  auto sq_dist_sum = [&](std::initializer_list<int> fields) {
    double acc = 0.0;
    for (int f : fields) {
      for (int i = 0; i < n_; ++i) {
        acc += (layout_.view(s, i, f) - layout_.view(s_star, i, f)).squaredNorm();
      }
    }
    return 0.5 * acc;
  };
  switch (problem_.structure) {
    case Structure::RCC:
      return sq_dist_sum({rcc::kX, rcc::kY, rcc::kL1, rcc::kL2, rcc::kL3});
    case Structure::RRR: {
      // Bregman-type gap of the local objective around the equilibrium plus
      // the consensus quadratic form of Y, plus squared distances.
      double v1 = 0.0;
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        auto yi = layout_.view(s, i, rrr::kY);
        auto ys = layout_.view(s_star, i, rrr::kY);
        const Mat ei = v.a * yi - v.f;
        const Mat es = v.a * ys - v.f;
        v1 += 0.5 * ei.squaredNorm() - 0.5 * es.squaredNorm() -
              frob_inner(v.a.transpose() * es, yi - ys);
        for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) {
          v1 += 0.5 * w * frob_inner(yi, yi - layout_.view(s, j, rrr::kY));
        }
      }
      return v1 + sq_dist_sum({rrr::kXl, rrr::kY, rrr::kZ, rrr::kL1, rrr::kL2});
    }
    case Structure::CCR: {
      double v1 = 0.0;
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        auto yv = layout_.view(s, i, ccr::kYv);
        auto yvs = layout_.view(s_star, i, ccr::kYv);
        auto ui = layout_.view(s, i, ccr::kU);
        auto uis = layout_.view(s_star, i, ccr::kU);
        auto xi = layout_.view(s, i, ccr::kX);
        const Mat& fr = f_embed_[static_cast<size_t>(i)];
        const Mat& bc = b_embed_[static_cast<size_t>(i)];
        v1 += 0.5 * (v.a * yv - fr - ui).squaredNorm() -
              0.5 * (v.a * yvs - fr - uis).squaredNorm();
        v1 += frob_inner(layout_.view(s_star, i, ccr::kL2), ui);
        Mat gy = -xi * bc;
        gy.middleRows(problem_.part_r.offset(i), problem_.part_r.size(i)) += yv;
        v1 += frob_inner(layout_.view(s_star, i, ccr::kL3), gy);
        auto l1s = layout_.view(s_star, i, ccr::kL1);
        for (auto [j, w] : nbrs_[static_cast<size_t>(i)]) {
          v1 += w * frob_inner(l1s, xi - layout_.view(s, j, ccr::kX));
        }
      }
      return v1 + sq_dist_sum({ccr::kX, ccr::kYv, ccr::kU, ccr::kW, ccr::kZ, ccr::kL1,
                               ccr::kL2, ccr::kL3});
    }
    case Structure::CRR: {
      double v1 = 0.0;
      for (int i = 0; i < n_; ++i) {
        const AgentView& v = views_[static_cast<size_t>(i)];
        auto yv = layout_.view(s, i, crr::kYv);
        auto yvs = layout_.view(s_star, i, crr::kYv);
        auto ui = layout_.view(s, i, crr::kU);
        auto uis = layout_.view(s_star, i, crr::kU);
        const Mat& fr = f_embed_[static_cast<size_t>(i)];
        v1 += 0.5 * (v.a * yv - fr - ui).squaredNorm() -
              0.5 * (v.a * yvs - fr - uis).squaredNorm();
        v1 += frob_inner(layout_.view(s_star, i, crr::kL1), ui);
        // the reference multiplier pairs with the row-embedded Y block alone
        auto l2s = layout_.view(s_star, i, crr::kL2);
        v1 += frob_inner(
            l2s.middleRows(problem_.part_r.offset(i), problem_.part_r.size(i)), yv);
      }
      return v1 + sq_dist_sum(
                      {crr::kXl, crr::kYv, crr::kU, crr::kW, crr::kZ, crr::kL1, crr::kL2});
    }
    default:
      throw std::logic_error("unreachable");
  }
}

namespace {

System make_system_checked(const ProblemInstance& p, const Network& g, Structure want) {
  if (p.structure != want) {
    throw std::invalid_argument("instance carries structure " + to_string(p.structure) +
                                ", expected " + to_string(want));
  }
  return System(p, g);
}

}  // namespace

Vec field_rcc(const ProblemInstance& p, const Network& g, const Vec& s) {
  return make_system_checked(p, g, Structure::RCC).field(s);
}
Vec field_rrr(const ProblemInstance& p, const Network& g, const Vec& s) {
  return make_system_checked(p, g, Structure::RRR).field(s);
}
Vec field_ccr(const ProblemInstance& p, const Network& g, const Vec& s) {
  return make_system_checked(p, g, Structure::CCR).field(s);
}
Vec field_crr(const ProblemInstance& p, const Network& g, const Vec& s) {
  return make_system_checked(p, g, Structure::CRR).field(s);
}

std::map<std::string, double> constraint_residuals(const ProblemInstance& p, const Network& g,
                                                   const Vec& s) {
  return System(p, g).constraint_residuals(s);
}

Mat extract_solution(const ProblemInstance& p, const Vec& s, std::optional<int> pick_agent) {
  const StateLayout ly(p);
  if (s.size() != ly.dim()) {
    throw std::invalid_argument("extract_solution: state vector has wrong length");
  }
  const int n = ly.agents();
  if (pick_agent && (*pick_agent < 0 || *pick_agent >= n)) {
    throw std::invalid_argument("extract_solution: agent index out of range");
  }
  switch (p.structure) {
    case Structure::RCC:
    case Structure::CCR: {
      if (pick_agent) return ly.view(s, *pick_agent, 0);
      Mat acc = Mat::Zero(p.A.cols(), p.B.rows());
      for (int i = 0; i < n; ++i) acc += ly.view(s, i, 0);
      return acc / n;
    }
    case Structure::RRR:
    case Structure::CRR: {
      Mat x(p.A.cols(), p.B.rows());
      for (int i = 0; i < n; ++i) {
        x.middleCols(p.part_p.offset(i), p.part_p.size(i)) = ly.view(s, i, 0);
      }
      return x;
    }
    default:
      throw std::logic_error("unreachable");
  }
}

bool is_equilibrium(const ProblemInstance& p, const Network& g, const Vec& s, double tol) {
  return System(p, g).is_equilibrium(s, tol);
}

}  // namespace axbnet
