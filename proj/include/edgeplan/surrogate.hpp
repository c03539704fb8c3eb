#pragma once

namespace edgeplan {

/// Curvature and gradient-envelope constants of the training loss.
struct ConvergenceParams {
  double mu = 1.0;        // strong convexity
  double lip = 1.0;       // gradient Lipschitz constant, >= mu
  double beta1 = 0.0;     // envelope offset
  double beta2 = 0.0;     // envelope slope on ||grad F||^2
  double init_gap = 0.0;  // F(x0) - F(x*)
};

void validate(const ConvergenceParams& params);

/// Weights of the surrogate I * ln(alpha + beta * missing^2).
struct SurrogateParams {
  double alpha = 0.5;
  double beta = 0.5;

  /// alpha = 1 - mu/L, beta = 4 beta2.
  static SurrogateParams from(const ConvergenceParams& params);
};

void validate(const SurrogateParams& params);

/// (M_total - collected) / M_total. Throws when collected is outside [0, M_total].
double missing_fraction(double collected, double m_total);

struct Contraction {
  double psi = 0.0;
  bool non_contractive = false;  // psi >= 1
};

Contraction contraction_factor(double collected, double m_total, const ConvergenceParams& params);

struct BoundValue {
  double value = 0.0;
  bool non_contractive = false;
};

/// Gap bound after `rounds` steps of 1/L descent on the collected set:
/// psi^I * gap0 + 2 missing^2 (beta1/L) (1 - psi^I)/(1 - psi).
BoundValue convergence_bound(double rounds, double collected, double m_total,
                             const ConvergenceParams& params);

struct ObjectiveValue {
  double value = 0.0;
  /// The log term is >= 0, so extra rounds do not tighten the bound.
  bool degenerate = false;
};

/// rounds * ln(alpha + beta * missing^2). Lower is better.
ObjectiveValue objective(double rounds, double collected, double m_total,
                         const SurrogateParams& sp);

/// ln(alpha + beta * missing^2), the per-round term of `objective`.
double log_contraction(double collected, double m_total, const SurrogateParams& sp);

}  // namespace edgeplan
