#pragma once

#include "axbnet/matcore.hpp"
#include "axbnet/problem.hpp"

namespace axbnet {

/// Default cap on r*p and m*q for the centralized solve (desk scale).
inline constexpr Index kOracleUnknownCap = 10000;

struct OracleResult {
  Mat x_star;           // minimum-norm least-squares solution, r x p
  double min_residual;  // ||A x_star B - F||_F, the attainable minimum
  double grad_norm;     // ||A^T (A x_star B - F) B^T||_F at x_star
};

/// Centralized ground truth: solves the vectorized equation
/// (B^T kron A) vec(X) = vec(F) by SVD pseudoinverse. Deterministic:
/// among all least-squares solutions, returns the minimum-norm one.
/// Throws CapError when r*p or m*q exceeds unknown_cap.
OracleResult solve_centralized(const ProblemInstance& p, Index unknown_cap = kOracleUnknownCap);

/// First-order optimality test value ||A^T (A x B - F) B^T||_F.
/// Zero (up to tolerance) exactly at least-squares solutions.
double optimality_residual(const ProblemInstance& p, const Mat& x);

/// Scale factor for relative optimality tolerances:
/// 1 + |A|^2 |x| |B|^2 + |A| |F| |B| (Frobenius norms).
double optimality_scale(const ProblemInstance& p, const Mat& x);

}  // namespace axbnet
