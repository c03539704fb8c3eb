#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeplan/cost_model.hpp"
#include "edgeplan/surrogate.hpp"

namespace edgeplan {

/// One line of results.csv.
struct ResultRow {
  std::string scenario_id;
  std::string method;  // proposed-homog | proposed-heterog | eas | gss | pss | urs
  double t_sens_min_s = 0.0;
  double t_sens_mean_s = 0.0;
  double t_sens_max_s = 0.0;
  std::int64_t rounds = 0;
  std::int64_t collected = 0;
  double objective = 0.0;
  double wall_clock_s = 0.0;
  double energy_j = 0.0;
  bool feasible = false;
};

/// Evaluates `plan` and fills a row. The objective uses the continuous
/// sample volume the optimizers see; collected/feasible come from the
/// floored evaluation.
ResultRow make_result_row(const std::string& scenario_id, const std::string& method,
                          const AllocationPlan& plan, std::span<const DeviceProfile> profiles,
                          const SystemBudget& budget, const SurrogateParams& sp);

/// Frozen column order of results.csv.
const std::vector<std::string>& result_columns();

std::string to_csv(std::span<const ResultRow> rows);

/// Column aggregates of `rows` (count, sums, feasible count).
nlohmann::json summarize(std::span<const ResultRow> rows);

}  // namespace edgeplan
