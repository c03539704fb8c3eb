#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgeplan/baselines.hpp"
#include "edgeplan/heterogeneous.hpp"

using namespace edgeplan;

TEST_CASE("efficiency factor by hand") {
  const DeviceProfile d;
  const double expected = 10.0 * 200.0 * 45150.85 / (50.0 * (0.5 + 0.1 + 1e-11 + 0.5));
  CHECK(efficiency_factor(d) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("common sensing times") {
  const std::vector<DeviceProfile> fleet(20);
  const SystemBudget b;
  const BaselinePlan gss = allocate(BaselineKind::gss, fleet, b);
  const BaselinePlan pss = allocate(BaselineKind::pss, fleet, b);
  for (double t : gss.plan.t_sens_s) CHECK(t == doctest::Approx(100.0));
  for (double t : pss.plan.t_sens_s) CHECK(t == doctest::Approx(15.0));
  CHECK(gss.plan.rounds == max_rounds_given_tsens(gss.plan.t_sens_s, fleet, b));
  CHECK(pss.plan.rounds > gss.plan.rounds);
  CHECK_FALSE(gss.over_budget);
  CHECK(evaluate_plan(gss.plan, fleet, b).feasible);
  CHECK(evaluate_plan(pss.plan, fleet, b).feasible);
}

TEST_CASE("EAS collects the whole environment in proportion to efficiency") {
  std::vector<DeviceProfile> fleet(3);
  fleet[1].cpu_hz = 400.0;
  fleet[2].sample_rate_hz = 5.0;
  SystemBudget b;
  b.num_devices = 3;
  const BaselinePlan eas = allocate(BaselineKind::eas, fleet, b);
  const auto& t = eas.plan.t_sens_s;
  CHECK(t[1] / t[0] == doctest::Approx(efficiency_factor(fleet[1]) / efficiency_factor(fleet[0])));
  CHECK(t[2] / t[0] == doctest::Approx(efficiency_factor(fleet[2]) / efficiency_factor(fleet[0])));
  CHECK(collected_continuous(t, fleet) == doctest::Approx(20000.0));
  // The most efficient device senses for the full horizon.
  CHECK(*std::max_element(t.begin(), t.end()) == doctest::Approx(t[1]));
}

TEST_CASE("EAS on identical devices equals GSS") {
  const std::vector<DeviceProfile> fleet(20);
  const BaselinePlan eas = allocate(BaselineKind::eas, fleet, SystemBudget{});
  const BaselinePlan gss = allocate(BaselineKind::gss, fleet, SystemBudget{});
  for (std::size_t k = 0; k < fleet.size(); ++k) {
    CHECK(eas.plan.t_sens_s[k] == doctest::Approx(gss.plan.t_sens_s[k]));
  }
}

TEST_CASE("URS ignores the budgets") {
  const std::vector<DeviceProfile> fleet(20);
  BaselineOptions options;
  options.urs_round_cap = 5000;
  const BaselinePlan urs = allocate(BaselineKind::urs, fleet, SystemBudget{}, options);
  CHECK(urs.budget_exempt);
  CHECK(urs.plan.rounds == 5000);
  CHECK_FALSE(evaluate_plan(urs.plan, fleet, SystemBudget{}).feasible);
  options.urs_round_cap = 0;
  CHECK_THROWS_AS(allocate(BaselineKind::urs, fleet, SystemBudget{}, options), std::invalid_argument);
}

TEST_CASE("sensing alone exhausting the budget is flagged") {
  const std::vector<DeviceProfile> fleet(20);
  SystemBudget b;
  b.t_total_s = 50.0;
  const BaselinePlan gss = allocate(BaselineKind::gss, fleet, b);
  CHECK(gss.over_budget);
  CHECK(gss.plan.rounds == 0);
}

TEST_CASE("kind names round-trip") {
  for (BaselineKind k : {BaselineKind::eas, BaselineKind::gss, BaselineKind::pss, BaselineKind::urs}) {
    CHECK(parse_baseline_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_baseline_kind("xyz"), std::invalid_argument);
  CHECK_THROWS_AS(allocate(BaselineKind::gss, std::vector<DeviceProfile>{}, SystemBudget{}),
                  std::invalid_argument);
}
