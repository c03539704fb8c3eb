#include "edgeplan/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "edgeplan/heterogeneous.hpp"

namespace edgeplan {

ResultRow make_result_row(const std::string& scenario_id, const std::string& method,
                          const AllocationPlan& plan, std::span<const DeviceProfile> profiles,
                          const SystemBudget& budget, const SurrogateParams& sp) {
  const CostReport cost = evaluate_plan(plan, profiles, budget);
  ResultRow row;
  row.scenario_id = scenario_id;
  row.method = method;
  if (!plan.t_sens_s.empty()) {
    const auto [lo, hi] = std::minmax_element(plan.t_sens_s.begin(), plan.t_sens_s.end());
    row.t_sens_min_s = *lo;
    row.t_sens_max_s = *hi;
    double sum = 0.0;
    for (double t : plan.t_sens_s) sum += t;
    row.t_sens_mean_s = sum / static_cast<double>(plan.t_sens_s.size());
  }
  row.rounds = plan.rounds;
  row.collected = cost.collected;
  const double m_total = static_cast<double>(budget.m_total);
  const double volume = std::min(collected_continuous(plan.t_sens_s, profiles), m_total);
  row.objective = objective(static_cast<double>(plan.rounds), volume, m_total, sp).value;
  row.wall_clock_s = cost.wall_clock_s;
  row.energy_j = cost.total_energy_j;
  row.feasible = cost.feasible;
  return row;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns{
      "scenario_id", "method",    "t_sens_min_s", "t_sens_mean_s", "t_sens_max_s", "rounds",
      "collected",   "objective", "wall_clock_s", "energy_j",      "feasible"};
  return columns;
}

std::string to_csv(std::span<const ResultRow> rows) {
  std::string out;
  for (std::size_t i = 0; i < result_columns().size(); ++i) {
    out += (i ? "," : "") + result_columns()[i];
  }
  out += '\n';
  for (const ResultRow& r : rows) {
    out += fmt::format("{},{},{:.10g},{:.10g},{:.10g},{},{},{:.10g},{:.10g},{:.10g},{}\n",
                       r.scenario_id, r.method, r.t_sens_min_s, r.t_sens_mean_s, r.t_sens_max_s,
                       r.rounds, r.collected, r.objective, r.wall_clock_s, r.energy_j,
                       r.feasible ? 1 : 0);
  }
  return out;
}

nlohmann::json summarize(std::span<const ResultRow> rows) {
  std::int64_t rounds = 0;
  std::int64_t collected = 0;
  std::int64_t feasible = 0;
  double objective_sum = 0.0;
  double wall_clock = 0.0;
  double energy = 0.0;
  for (const ResultRow& r : rows) {
    rounds += r.rounds;
    collected += r.collected;
    feasible += r.feasible ? 1 : 0;
    objective_sum += r.objective;
    wall_clock += r.wall_clock_s;
    energy += r.energy_j;
  }
  return {{"rows", rows.size()},
          {"rounds", rounds},
          {"collected", collected},
          {"feasible", feasible},
          {"objective", objective_sum},
          {"wall_clock_s", wall_clock},
          {"energy_j", energy}};
}

}  // namespace edgeplan
