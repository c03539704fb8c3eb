#include "edgeplan/surrogate.hpp"

#include <cmath>
#include <stdexcept>

namespace edgeplan {

void validate(const ConvergenceParams& p) {
  if (!(p.mu > 0.0)) throw std::invalid_argument("ConvergenceParams.mu must be > 0");
  if (!(p.lip >= p.mu)) throw std::invalid_argument("ConvergenceParams.lip must be >= mu");
  if (!(p.beta1 >= 0.0)) throw std::invalid_argument("ConvergenceParams.beta1 must be >= 0");
  if (!(p.beta2 >= 0.0)) throw std::invalid_argument("ConvergenceParams.beta2 must be >= 0");
  if (!(p.init_gap >= 0.0)) throw std::invalid_argument("ConvergenceParams.init_gap must be >= 0");
}

SurrogateParams SurrogateParams::from(const ConvergenceParams& params) {
  return {1.0 - params.mu / params.lip, 4.0 * params.beta2};
}

void validate(const SurrogateParams& sp) {
  if (!(sp.alpha > 0.0) || !std::isfinite(sp.alpha)) {
    throw std::invalid_argument("SurrogateParams.alpha must be > 0");
  }
  if (!(sp.beta >= 0.0) || !std::isfinite(sp.beta)) {
    throw std::invalid_argument("SurrogateParams.beta must be >= 0");
  }
}

double missing_fraction(double collected, double m_total) {
  if (!(m_total > 0.0)) throw std::invalid_argument("m_total must be > 0");
  if (!(collected >= 0.0)) throw std::invalid_argument("collected must be >= 0");
  if (collected > m_total) throw std::invalid_argument("collected exceeds m_total");
  return (m_total - collected) / m_total;
}

Contraction contraction_factor(double collected, double m_total, const ConvergenceParams& params) {
  const double r = missing_fraction(collected, m_total);
  const double psi = (1.0 - params.mu / params.lip) + 4.0 * r * r * params.beta2;
  return {psi, psi >= 1.0};
}

BoundValue convergence_bound(double rounds, double collected, double m_total,
                             const ConvergenceParams& params) {
  if (!(rounds >= 0.0)) throw std::invalid_argument("rounds must be >= 0");
  const double r = missing_fraction(collected, m_total);
  const Contraction c = contraction_factor(collected, m_total, params);

  // sum_{j < I} psi^j, written to stay accurate as psi -> 1.
  double series = rounds;
  if (c.psi != 1.0) {
    if (c.psi > 0.0) {
      series = -std::expm1(rounds * std::log(c.psi)) / (1.0 - c.psi);
    } else {
      series = (1.0 - std::pow(c.psi, rounds)) / (1.0 - c.psi);
    }
  }
  const double decay = std::pow(c.psi, rounds);
  const double value = decay * params.init_gap + 2.0 * r * r * (params.beta1 / params.lip) * series;
  return {value, c.non_contractive};
}

double log_contraction(double collected, double m_total, const SurrogateParams& sp) {
  const double r = missing_fraction(collected, m_total);
  return std::log(sp.alpha + sp.beta * r * r);
}

ObjectiveValue objective(double rounds, double collected, double m_total,
                         const SurrogateParams& sp) {
  const double term = log_contraction(collected, m_total, sp);
  return {rounds * term, term >= 0.0};
}

}  // namespace edgeplan
