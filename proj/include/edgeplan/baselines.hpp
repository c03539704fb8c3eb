#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "edgeplan/cost_model.hpp"

namespace edgeplan {

/// Reference allocators used for comparison.
enum class BaselineKind {
  eas,  // sensing time proportional to the composite efficiency factor
  gss,  // every device senses until the whole environment is collected
  pss,  // common sensing time collecting a fixed fraction of M_total
  urs,  // full collection, fixed round cap, budgets ignored
};

const char* to_string(BaselineKind kind);
/// Throws std::invalid_argument on an unknown name.
BaselineKind parse_baseline_kind(std::string_view name);

struct BaselineOptions {
  double pss_fraction = 0.15;
  std::int64_t urs_round_cap = 1;
};

struct BaselinePlan {
  BaselineKind kind = BaselineKind::gss;
  AllocationPlan plan;
  /// Sensing alone leaves no room for a single round (rounds forced to 0).
  bool over_budget = false;
  /// URS plans ignore the budgets and are never checked against them.
  bool budget_exempt = false;
};

/// f_s f_c r / (C (eta + zeta + kappa + p)).
double efficiency_factor(const DeviceProfile& profile);

BaselinePlan allocate(BaselineKind kind, std::span<const DeviceProfile> profiles,
                      const SystemBudget& budget, const BaselineOptions& options = {});

}  // namespace edgeplan
