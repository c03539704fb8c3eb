#pragma once

#include <cstdint>

#include "edgeplan/cost_model.hpp"
#include "edgeplan/surrogate.hpp"

namespace edgeplan {

enum class BindingConstraint { time, energy, data_cap };

const char* to_string(BindingConstraint binding);

/// Which round count the grid search minimizes over.
enum class RoundsMode {
  continuous,  // I = min(time bound, energy bound)
  integer,     // I = floor(min(...)), what a deployable plan can run
};

struct HomogeneousOptions {
  int grid_points = 100000;
  RoundsMode rounds_mode = RoundsMode::continuous;
};

struct HomogeneousSolution {
  bool feasible = false;
  double t_sens_s = 0.0;
  double rounds_continuous = 0.0;
  std::int64_t rounds = 0;
  double objective_value = 0.0;     // continuous rounds
  double objective_integer = 0.0;   // floored rounds at the same t_sens_s
  BindingConstraint binding_constraint = BindingConstraint::time;
  double grid_resolution = 0.0;     // spacing of the sensing-time grid (s)
};

/// Largest (continuous) round count the time budget admits at common
/// sensing time `t_sens_s`; clamped at 0.
double max_rounds_time(double t_sens_s, const DeviceProfile& profile, const SystemBudget& budget);

/// Largest round count the per-device share E_total/K admits; clamped at 0.
double max_rounds_energy(double t_sens_s, const DeviceProfile& profile, const SystemBudget& budget);

/// One-dimensional search over the common sensing time on
/// (0, M_total / (K f_s)] for a fleet of identical devices.
/// Returns feasible == false when no grid point admits at least one round.
HomogeneousSolution solve_homogeneous(const DeviceProfile& profile, const SystemBudget& budget,
                                      const SurrogateParams& sp,
                                      const HomogeneousOptions& options = {});

}  // namespace edgeplan
