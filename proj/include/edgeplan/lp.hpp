#pragma once

#include <Eigen/Dense>

namespace edgeplan::lp {

/// Pivot magnitudes below this are treated as zero.
inline constexpr double kPivotTol = 1e-9;
/// Phase-one residual above which the program is declared infeasible. Rows
/// are scaled to unit max-norm of [a_i, b_i] first, so this is relative per row.
inline constexpr double kFeasTol = 1e-7;

/// optimize c'x subject to A x <= b, x >= 0.
struct LinearProgram {
  Eigen::VectorXd objective_coeffs;
  Eigen::MatrixXd constraint_matrix;
  Eigen::VectorXd rhs;
  bool maximize = true;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;  // empty unless optimal
  double value = 0.0;
  int pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule.
/// Throws std::invalid_argument on inconsistent dimensions or non-finite data.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace edgeplan::lp
