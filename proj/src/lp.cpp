#include "edgeplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace edgeplan::lp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Tableau in B^-1 [A | I | R | b] form; the last column holds the basic values.
struct Tableau {
  Eigen::MatrixXd t;
  std::vector<int> basis;
  std::vector<bool> row_active;
  int rhs_col = 0;
  int pivots = 0;

  void pivot(int row, int col) {
    const double p = t(row, col);
    t.row(row) /= p;
    for (int i = 0; i < t.rows(); ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[row] = col;
    ++pivots;
  }
};

enum class PhaseResult { optimal, unbounded };

// Maximizes cost' x over the current basis. Bland's rule: lowest-index entering
// column with positive reduced cost, ratio ties broken by lowest basic index.
PhaseResult run_phase(Tableau& tab, const Eigen::VectorXd& cost, int allowed_cols) {
  const int rows = static_cast<int>(tab.t.rows());
  const int max_pivots = 100000;
  while (true) {
    int entering = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      double reduced = cost(j);
      for (int i = 0; i < rows; ++i) {
        if (tab.row_active[i]) reduced -= cost(tab.basis[i]) * tab.t(i, j);
      }
      if (reduced > kPivotTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return PhaseResult::optimal;

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      if (!tab.row_active[i]) continue;
      const double a = tab.t(i, entering);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(tab.t(i, tab.rhs_col), 0.0) / a;
      if (leaving < 0) {
        leaving = i;
        best_ratio = ratio;
        continue;
      }
      const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
      if (ratio < best_ratio - tie) {
        leaving = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + tie && tab.basis[i] < tab.basis[leaving]) {
        leaving = i;
      }
    }
    if (leaving < 0) return PhaseResult::unbounded;
    tab.pivot(leaving, entering);
    if (tab.pivots > max_pivots) throw std::logic_error("simplex pivot limit exceeded");
  }
}

void check_input(const LinearProgram& lp) {
  const auto n = lp.objective_coeffs.size();
  const auto m = lp.rhs.size();
  if (lp.constraint_matrix.rows() != m || lp.constraint_matrix.cols() != n) {
    throw std::invalid_argument("LinearProgram dimensions are inconsistent");
  }
  if (!lp.objective_coeffs.allFinite() || !lp.constraint_matrix.allFinite() ||
      !lp.rhs.allFinite()) {
    throw std::invalid_argument("LinearProgram contains non-finite entries");
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  check_input(lp);
  const int n = static_cast<int>(lp.objective_coeffs.size());
  const int m = static_cast<int>(lp.rhs.size());

  // Scale each row to unit max-norm.
  Eigen::MatrixXd coef = lp.constraint_matrix;
  Eigen::VectorXd b = lp.rhs;
  for (int i = 0; i < m; ++i) {
    const double size = std::max(n > 0 ? coef.row(i).cwiseAbs().maxCoeff() : 0.0, std::abs(b(i)));
    if (size > 0.0) {
      coef.row(i) /= size;
      b(i) /= size;
    }
  }

  std::vector<int> artificial_rows;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) artificial_rows.push_back(i);
  }
  const int n_art = static_cast<int>(artificial_rows.size());
  const int slack0 = n;
  const int art0 = n + m;
  const int cols = n + m + n_art + 1;

  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m, cols);
  tab.basis.assign(m, -1);
  tab.row_active.assign(m, true);
  tab.rhs_col = cols - 1;
  for (int i = 0, a = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * coef.row(i);
    tab.t(i, slack0 + i) = sign;
    tab.t(i, tab.rhs_col) = sign * b(i);
    if (sign < 0.0) {
      tab.t(i, art0 + a) = 1.0;
      tab.basis[i] = art0 + a;
      ++a;
    } else {
      tab.basis[i] = slack0 + i;
    }
  }

  LpSolution out;
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.segment(art0, n_art).setConstant(-1.0);
    run_phase(tab, phase1, art0 + n_art);
    double residual = 0.0;
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= art0) residual += tab.t(i, tab.rhs_col);
    }
    if (residual > kFeasTol) {
      out.status = LpStatus::infeasible;
      out.pivots = tab.pivots;
      return out;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < art0) continue;
      int col = -1;
      for (int j = 0; j < art0; ++j) {
        if (std::abs(tab.t(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        tab.row_active[i] = false;  // redundant constraint
      }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  phase2.head(n) = lp.maximize ? lp.objective_coeffs : Eigen::VectorXd(-lp.objective_coeffs);
  if (run_phase(tab, phase2, art0) == PhaseResult::unbounded) {
    out.status = LpStatus::unbounded;
    out.pivots = tab.pivots;
    return out;
  }

  out.status = LpStatus::optimal;
  out.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (tab.row_active[i] && tab.basis[i] < n) out.x(tab.basis[i]) = tab.t(i, tab.rhs_col);
  }
  out.value = lp.objective_coeffs.dot(out.x);
  out.pivots = tab.pivots;
  return out;
}

}  // namespace edgeplan::lp
