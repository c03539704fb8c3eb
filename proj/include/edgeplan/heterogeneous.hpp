#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "edgeplan/cost_model.hpp"
#include "edgeplan/surrogate.hpp"

namespace edgeplan {

struct AoConfig {
  double epsilon = 1e-4;       // relative objective change that stops the loop
  int max_iters = 100;
  double init_fraction = 0.15; // share of M_total collected by the starting point
  /// After the alternating loop, search the round count directly with the
  /// sensing block re-solved exactly at each candidate.
  bool refine_rounds = true;
};

void validate(const AoConfig& cfg);

enum class AoStatus { converged, max_iters, infeasible };

const char* to_string(AoStatus status);

enum class AoStep { initial, alternating, round_search };

const char* to_string(AoStep step);

struct AoIterate {
  AoStep step = AoStep::alternating;
  double objective = 0.0;
  std::int64_t rounds = 0;
  double collected_samples = 0.0;  // continuous sum of f_s * t_sens
};

struct AoTrace {
  std::vector<AoIterate> iterations;
  AoStatus status = AoStatus::infeasible;
  int alternating_iters = 0;
  int lp_solves = 0;
};

struct HeterogeneousResult {
  AllocationPlan plan;
  AoTrace trace;
  double objective = 0.0;
  double collected_samples = 0.0;
  /// Uniform factor applied to the sensing times when a device with
  /// sense_exp > 1 broke the true energy budget; 1 when untouched.
  double safeguard_scale = 1.0;
};

/// Relative budget share withheld from the sensing-time LP.
inline constexpr double kBudgetBackoff = 1e-9;

enum class SensingEnergy {
  exact,       // eta * t^delta + zeta
  linearized,  // eta * t + zeta, the form the sensing LP can express
};

/// Largest continuous round count admitted by both budgets at fixed sensing
/// times (before flooring). Clamped at 0.
double round_bound_given_tsens(std::span<const double> t_sens,
                               std::span<const DeviceProfile> profiles,
                               const SystemBudget& budget,
                               SensingEnergy model = SensingEnergy::exact);

/// floor(round_bound_given_tsens(...)).
std::int64_t max_rounds_given_tsens(std::span<const double> t_sens,
                                    std::span<const DeviceProfile> profiles,
                                    const SystemBudget& budget,
                                    SensingEnergy model = SensingEnergy::exact);

/// Sensing times maximizing the collected volume at a fixed round count via
/// the epigraph LP over (t_1..t_K, u, v). Returns std::nullopt when no
/// sensing allocation admits `rounds` rounds.
std::optional<std::vector<double>> best_tsens_given_rounds(std::int64_t rounds,
                                                           std::span<const DeviceProfile> profiles,
                                                           const SystemBudget& budget);

/// Largest round count for which the sensing LP is feasible (t_sens = 0).
std::int64_t max_feasible_rounds(std::span<const DeviceProfile> profiles,
                                 const SystemBudget& budget);

/// Alternating optimization of rounds and sensing times. The status is
/// `infeasible` (and the plan empty) when no start admits a single round.
HeterogeneousResult solve_heterogeneous(std::span<const DeviceProfile> profiles,
                                        const SystemBudget& budget, const SurrogateParams& sp,
                                        const AoConfig& cfg = {});

/// Continuous sum of f_s,k * t_sens,k.
double collected_continuous(std::span<const double> t_sens,
                            std::span<const DeviceProfile> profiles);

}  // namespace edgeplan
