#include "axbnet/oracle.hpp"

#include <Eigen/SVD>

#include <stdexcept>
#include <string>

#include "axbnet/errors.hpp"

namespace axbnet {

OracleResult solve_centralized(const ProblemInstance& p, Index unknown_cap) {
  validate(p);
  const Index m = p.A.rows(), r = p.A.cols();
  const Index pp = p.B.rows(), q = p.B.cols();
  if (r * pp > unknown_cap || m * q > unknown_cap)
    throw CapError("solve_centralized: problem has " + std::to_string(r * pp) + " unknowns and " +
                   std::to_string(m * q) + " equations; cap is " + std::to_string(unknown_cap));

  // Minimum-norm least-squares solve through a rank-revealing complete
  // orthogonal decomposition.
  Mat k = kron(Mat(p.B.transpose()), p.A);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod;
  cod.setThreshold(static_cast<double>(std::max(k.rows(), k.cols())) *
                   std::numeric_limits<double>::epsilon());
  cod.compute(k);
  Vec xv = cod.solve(Vec(vec(p.F)));

  // unvec: xv stacks the columns of X (r x p).
  Mat x(r, pp);
  for (Index j = 0; j < pp; ++j) x.col(j) = xv.segment(j * r, r);

  OracleResult res;
  res.x_star = std::move(x);
  res.min_residual = frob_norm(p.A * res.x_star * p.B - p.F);
  res.grad_norm = optimality_residual(p, res.x_star);
  return res;
}

double optimality_residual(const ProblemInstance& p, const Mat& x) {
  if (x.rows() != p.A.cols() || x.cols() != p.B.rows())
    throw std::invalid_argument("optimality_residual: x must be " + std::to_string(p.A.cols()) +
                                "x" + std::to_string(p.B.rows()) + ", got " +
                                std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  return frob_norm(p.A.transpose() * (p.A * x * p.B - p.F) * p.B.transpose());
}

double optimality_scale(const ProblemInstance& p, const Mat& x) {
  const double na = frob_norm(p.A), nb = frob_norm(p.B);
  return 1.0 + na * na * frob_norm(x) * nb * nb + na * frob_norm(p.F) * nb;
}

}  // namespace axbnet
