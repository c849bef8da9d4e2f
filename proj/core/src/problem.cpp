#include "axbnet/problem.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace axbnet {

namespace {

// How each structure splits its matrices: true = row blocks, false = column
// blocks. A's rows follow {m_j} and columns {r_j}; B's rows follow {p_j} and
// columns {q_j}; F's rows follow {m_j} and columns {q_j}.
struct SplitSpec {
  bool a_rows, b_rows, f_rows;
};

SplitSpec split_of(Structure s) {
  switch (s) {
    case Structure::RCC: return {true, false, false};
    case Structure::RRR: return {true, true, true};
    case Structure::CCR: return {false, false, true};
    case Structure::CRR: return {false, true, true};
    case Structure::RCR: return {true, false, true};
    case Structure::CCC: return {false, false, false};
    case Structure::RRC: return {true, true, false};
    case Structure::CRC: return {false, true, false};
  }
  throw std::invalid_argument("unknown structure");
}

Index numerical_rank(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  const Vec diag = qr.matrixQR().diagonal().cwiseAbs();
  if (diag.size() == 0) return 0;
  double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
               std::numeric_limits<double>::epsilon() * diag.maxCoeff();
  Index rank = 0;
  for (Index i = 0; i < diag.size(); ++i)
    if (diag(i) > tol) ++rank;
  return rank;
}

}  // namespace

bool is_canonical(Structure s) {
  return s == Structure::RCC || s == Structure::RRR || s == Structure::CCR ||
         s == Structure::CRR;
}

Structure canonical_of(Structure s) {
  switch (s) {
    case Structure::RCR: return Structure::RCC;
    case Structure::CCC: return Structure::RRR;
    case Structure::RRC: return Structure::CCR;
    case Structure::CRC: return Structure::CRR;
    default: return s;
  }
}

Structure structure_from_string(std::string_view s) {
  if (s == "RCC") return Structure::RCC;
  if (s == "RRR") return Structure::RRR;
  if (s == "CCR") return Structure::CCR;
  if (s == "CRR") return Structure::CRR;
  if (s == "RCR") return Structure::RCR;
  if (s == "CCC") return Structure::CCC;
  if (s == "RRC") return Structure::RRC;
  if (s == "CRC") return Structure::CRC;
  throw std::invalid_argument("unknown structure: " + std::string(s));
}

std::string to_string(Structure s) {
  switch (s) {
    case Structure::RCC: return "RCC";
    case Structure::RRR: return "RRR";
    case Structure::CCR: return "CCR";
    case Structure::CRR: return "CRR";
    case Structure::RCR: return "RCR";
    case Structure::CCC: return "CCC";
    case Structure::RRC: return "RRC";
    case Structure::CRC: return "CRC";
  }
  return "?";
}

int block_count(const ProblemInstance& p) {
  for (const Partition* part : {&p.part_m, &p.part_r, &p.part_p, &p.part_q})
    if (!part->empty()) return part->count();
  throw std::invalid_argument("ProblemInstance: no partitions present");
}

void validate(const ProblemInstance& p) {
  const Index m = p.A.rows(), r = p.A.cols();
  const Index pp = p.B.rows(), q = p.B.cols();
  if (m < 1 || r < 1 || pp < 1 || q < 1)
    throw std::invalid_argument("ProblemInstance: A and B must be nonempty");
  if (p.F.rows() != m || p.F.cols() != q)
    throw std::invalid_argument("ProblemInstance: F must be A.rows x B.cols");
  if (!p.A.allFinite() || !p.B.allFinite() || !p.F.allFinite())
    throw std::invalid_argument("ProblemInstance: entries must be finite");

  SplitSpec sp = split_of(p.structure);
  const bool need_m = sp.a_rows || sp.f_rows;
  const bool need_r = !sp.a_rows;
  const bool need_p = sp.b_rows;
  const bool need_q = !sp.b_rows || !sp.f_rows;

  struct Req {
    const Partition* part;
    bool needed;
    Index dim;
    const char* name;
  };
  const Req reqs[] = {{&p.part_m, need_m, m, "m"},
                      {&p.part_r, need_r, r, "r"},
                      {&p.part_p, need_p, pp, "p"},
                      {&p.part_q, need_q, q, "q"}};
  int n = -1;
  for (const Req& req : reqs) {
    if (!req.needed) {
      if (!req.part->empty())
        throw std::invalid_argument(std::string("ProblemInstance: partition '") + req.name +
                                    "' is not used by structure " + to_string(p.structure));
      continue;
    }
    if (req.part->empty())
      throw std::invalid_argument(std::string("ProblemInstance: structure ") +
                                  to_string(p.structure) + " requires partition '" + req.name +
                                  "'");
    if (req.part->total() != req.dim)
      throw std::invalid_argument(std::string("ProblemInstance: partition '") + req.name +
                                  "' sums to " + std::to_string(req.part->total()) +
                                  " but the dimension is " + std::to_string(req.dim));
    if (n < 0) n = req.part->count();
    if (req.part->count() != n)
      throw std::invalid_argument("ProblemInstance: all partitions must have the same block count");
  }
}

std::vector<AgentView> partition_views(const ProblemInstance& p, const Network& g) {
  validate(p);
  const int n = block_count(p);
  if (g.n != n)
    throw std::invalid_argument("partition_views: network has " + std::to_string(g.n) +
                                " agents but the instance has " + std::to_string(n) + " blocks");
  SplitSpec sp = split_of(p.structure);
  std::vector<AgentView> views;
  views.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    AgentView v;
    v.a = sp.a_rows ? block_row(p.A, p.part_m, i) : block_col(p.A, p.part_r, i);
    v.b = sp.b_rows ? block_row(p.B, p.part_p, i) : block_col(p.B, p.part_q, i);
    v.f = sp.f_rows ? block_row(p.F, p.part_m, i) : block_col(p.F, p.part_q, i);
    views.push_back(std::move(v));
  }
  return views;
}

ProblemInstance to_canonical(const ProblemInstance& p) {
  validate(p);
  if (is_canonical(p.structure))
    throw std::invalid_argument("to_canonical: " + to_string(p.structure) +
                                " is already canonical");
  SplitSpec sp = split_of(p.structure);
  ProblemInstance out;
  out.structure = canonical_of(p.structure);
  out.A = p.B.transpose();
  out.B = p.A.transpose();
  out.F = p.F.transpose();
  // B', A', F' are transposes, so each split flips between rows and columns.
  if (sp.b_rows) out.part_r = p.part_p;
  else out.part_m = p.part_q;
  if (sp.a_rows) out.part_q = p.part_m;
  else out.part_p = p.part_r;
  if (sp.f_rows) out.part_q = p.part_m;
  else out.part_m = p.part_q;
  validate(out);
  return out;
}

Solvability solvability(const ProblemInstance& p) {
  Mat af(p.A.rows(), p.A.cols() + p.F.cols());
  af << p.A, p.F;
  Mat bf(p.B.rows() + p.F.rows(), p.B.cols());
  bf << p.B, p.F;
  const bool col_ok = numerical_rank(af) == numerical_rank(p.A);
  const bool row_ok = numerical_rank(bf) == numerical_rank(p.B);
  return (col_ok && row_ok) ? Solvability::exact : Solvability::least_squares_only;
}

std::string to_string(Solvability s) {
  return s == Solvability::exact ? "exact" : "least_squares_only";
}

}  // namespace axbnet
