#include "edgeplan/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgeplan {

const char* to_string(BindingConstraint binding) {
  switch (binding) {
    case BindingConstraint::time: return "time";
    case BindingConstraint::energy: return "energy";
    case BindingConstraint::data_cap: return "data-cap";
  }
  return "unknown";
}

double max_rounds_time(double t_sens_s, const DeviceProfile& profile, const SystemBudget& budget) {
  if (!(t_sens_s >= 0.0)) throw std::invalid_argument("t_sens_s must be >= 0");
  const double per_round = comp_time_per_round(samples_continuous(t_sens_s, profile), profile) +
                           comm_cost_per_round(profile).seconds;
  return std::max(0.0, (budget.t_total_s - t_sens_s) / per_round);
}

double max_rounds_energy(double t_sens_s, const DeviceProfile& profile,
                         const SystemBudget& budget) {
  if (!(t_sens_s >= 0.0)) throw std::invalid_argument("t_sens_s must be >= 0");
  const double share = budget.e_total_j / static_cast<double>(budget.num_devices);
  const double per_round = comp_energy_per_round(samples_continuous(t_sens_s, profile), profile) +
                           comm_cost_per_round(profile).joules;
  return std::max(0.0, (share - sensing_energy(t_sens_s, profile)) / per_round);
}

HomogeneousSolution solve_homogeneous(const DeviceProfile& profile, const SystemBudget& budget,
                                      const SurrogateParams& sp,
                                      const HomogeneousOptions& options) {
  validate(profile);
  validate(budget);
  validate(sp);
  if (options.grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");

  const double m_total = static_cast<double>(budget.m_total);
  const double fleet_rate = static_cast<double>(budget.num_devices) * profile.sample_rate_hz;
  const double t_cap = m_total / fleet_rate;
  const int g = options.grid_points;

  HomogeneousSolution best;
  best.grid_resolution = t_cap / g;
  double best_value = 0.0;
  for (int j = 1; j <= g; ++j) {
    const double t = t_cap * (static_cast<double>(j) / g);
    const double collected = std::min(fleet_rate * t, m_total);
    const double log_term = log_contraction(collected, m_total, sp);
    if (log_term >= 0.0) continue;

    const double by_time = max_rounds_time(t, profile, budget);
    const double by_energy = max_rounds_energy(t, profile, budget);
    const double rounds = std::min(by_time, by_energy);
    const double floored = std::floor(rounds);
    const double used = options.rounds_mode == RoundsMode::continuous ? rounds : floored;
    if (used < 1.0) continue;

    const double value = used * log_term;
    // Strict comparison keeps the smallest sensing time among ties.
    if (!best.feasible || value < best_value) {
      best.feasible = true;
      best_value = value;
      best.t_sens_s = t;
      best.rounds_continuous = rounds;
      best.rounds = static_cast<std::int64_t>(floored);
      best.objective_value = rounds * log_term;
      best.objective_integer = floored * log_term;
      if (j == g) {
        best.binding_constraint = BindingConstraint::data_cap;
      } else {
        best.binding_constraint =
            by_time <= by_energy ? BindingConstraint::time : BindingConstraint::energy;
      }
    }
  }
  return best;
}

}  // namespace edgeplan
