// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "edgeplan/baselines.hpp"
#include "edgeplan/fl_sim.hpp"
#include "edgeplan/heterogeneous.hpp"
#include "edgeplan/homogeneous.hpp"
#include "edgeplan/lp.hpp"
#include "edgeplan/report.hpp"
#include "edgeplan/scenario.hpp"
#include "edgeplan/surrogate.hpp"
#include "lp_oracle.hpp"

using namespace edgeplan;

namespace {

const std::string kDir = EDGEPLAN_SCENARIO_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome table_one() {
  const int rounds[] = {20, 30, 50, 100, 150};
  const double expected[] = {-12.6505, -18.9757, -31.6261, -63.2523, -94.8784};
  const auto start = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double v = objective(rounds[i], 15000, 20000, {0.5, 0.5}).value;
    worst = std::max(worst, std::abs(v - expected[i]));
  }
  const double ms = 1e3 * seconds_since(start);
  return {worst <= 1e-3 && ms < 1.0,
          fmt::format("max |error| {:.2e} (tol 1e-3), {:.4f} ms (limit 1 ms)", worst, ms)};
}

Outcome table_two_optimizer() {
  const Scenario s = load_scenario(kDir + "/homogeneous_v_calibrated.toml");
  const auto start = Clock::now();
  const HomogeneousSolution a = solve_homogeneous(s.device_template, s.budget, {0.5, 0.5});
  const HomogeneousSolution b = solve_homogeneous(s.device_template, s.budget, {0.2, 0.8});
  const double elapsed = seconds_since(start) / 2.0;
  const bool ok = a.feasible && b.feasible && std::abs(a.t_sens_s - 25.0) <= 2.0 &&
                  std::abs(a.objective_value + 19.0408) <= 0.1 * 19.0408 &&
                  std::abs(b.t_sens_s - 66.0) <= 5.0 &&
                  std::abs(b.objective_value + 36.3213) <= 0.1 * 36.3213 && elapsed < 1.0;

  const Scenario literal = load_scenario(kDir + "/homogeneous_v.toml");
  const HomogeneousSolution la = solve_homogeneous(literal.device_template, literal.budget, {0.5, 0.5});
  return {ok, fmt::format("(0.5,0.5): t {:.2f} s obj {:.4f}; (0.2,0.8): t {:.2f} s obj {:.4f}; "
                          "{:.3f} s per solve (limit 1 s); 21880-bit payload gives t {:.2f} s "
                          "obj {:.4f}",
                          a.t_sens_s, a.objective_value, b.t_sens_s, b.objective_value, elapsed,
                          la.t_sens_s, la.objective_value)};
}

Outcome table_two_ordering() {
  const Scenario s = load_scenario(kDir + "/homogeneous_v_calibrated.toml");
  // Rows sorted by beta; the reference objectives are then strictly decreasing.
  const double betas[] = {0.2, 0.4, 0.5, 0.6, 0.8};
  std::vector<double> objs;
  std::vector<double> times;
  for (double beta : betas) {
    const HomogeneousSolution sol = solve_homogeneous(s.device_template, s.budget, {1.0 - beta, beta});
    objs.push_back(sol.objective_value);
    times.push_back(sol.t_sens_s);
  }
  bool ok = true;
  for (std::size_t i = 1; i < objs.size(); ++i) {
    ok = ok && objs[i] < objs[i - 1] && times[i] > times[i - 1];
  }
  return {ok, fmt::format("objectives [{:.2f}, {:.2f}, {:.2f}, {:.2f}, {:.2f}], t_sens [{:.1f}, "
                          "{:.1f}, {:.1f}, {:.1f}, {:.1f}] for beta 0.2..0.8",
                          objs[0], objs[1], objs[2], objs[3], objs[4], times[0], times[1],
                          times[2], times[3], times[4])};
}

Outcome ao_monotone() {
  const Scenario base = load_scenario(kDir + "/heterogeneous_v.toml");
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> spread(0.1, 0.5);
  int monotone = 0;
  int converged = 0;
  int max_iters = 0;
  const auto start = Clock::now();
  for (int i = 0; i < 100; ++i) {
    Scenario s = base;
    s.heterogeneity.std_scale = spread(rng);
    s.heterogeneity.seed = 1000 + i;
    const Fleet fleet = generate_fleet(s);
    const HeterogeneousResult r = solve_heterogeneous(fleet.devices, s.budget, s.surrogate, s.ao);
    bool mono = !r.trace.iterations.empty();
    for (std::size_t j = 1; j < r.trace.iterations.size(); ++j) {
      mono = mono && r.trace.iterations[j].objective <= r.trace.iterations[j - 1].objective + 1e-9;
    }
    monotone += mono;
    converged += r.trace.status == AoStatus::converged && r.trace.alternating_iters <= 100;
    max_iters = std::max(max_iters, r.trace.alternating_iters);
  }
  const double elapsed = seconds_since(start);
  return {monotone == 100 && converged >= 99 && elapsed < 10.0,
          fmt::format("{}/100 monotone, {}/100 converged (need 99), max {} iterations, {:.2f} s "
                      "(limit 10 s)",
                      monotone, converged, max_iters, elapsed)};
}

Outcome lp_oracle_check() {
  std::mt19937_64 rng(77);
  int value_ok = 0;
  int class_ok = 0;
  int counts[3] = {0, 0, 0};
  const auto start = Clock::now();
  for (int i = 0; i < 200; ++i) {
    const lp::LinearProgram prog = lp_oracle::random_program(rng);
    const lp::LpSolution s = lp::solve_lp(prog);
    const lp_oracle::Result ref =
        lp_oracle::solve(prog.objective_coeffs, prog.constraint_matrix, prog.rhs);
    ++counts[static_cast<int>(ref.kind)];
    const bool same_class =
        (ref.kind == lp_oracle::Kind::optimal && s.status == lp::LpStatus::optimal) ||
        (ref.kind == lp_oracle::Kind::infeasible && s.status == lp::LpStatus::infeasible) ||
        (ref.kind == lp_oracle::Kind::unbounded && s.status == lp::LpStatus::unbounded);
    class_ok += same_class;
    value_ok += same_class && (ref.kind != lp_oracle::Kind::optimal ||
                               std::abs(s.value - ref.value) <= 1e-6);
  }
  const double elapsed = seconds_since(start);
  return {class_ok == 200 && value_ok == 200 && elapsed < 5.0,
          fmt::format("{}/200 classified, {}/200 within 1e-6 ({} optimal, {} infeasible, {} "
                      "unbounded), {:.2f} s (limit 5 s)",
                      class_ok, value_ok, counts[0], counts[1], counts[2], elapsed)};
}

struct BoundRuns {
  int runs = 0;
  int contractive = 0;
  int unvalidated = 0;
  int bound = 0;
  int contraction = 0;
  int error_bound = 0;
  int recursion = 0;
  double seconds = 0.0;
};

const BoundRuns& bound_runs() {
  static const BoundRuns runs = [] {
    BoundRuns out;
    const Scenario s;
    const auto start = Clock::now();
    for (int seed = 0; seed < 50; ++seed) {
      const sim::QuadraticProblem problem =
          sim::generate_problem(s.sim.dim, s.sim.m_total, s.sim.ridge, seed);
      for (double fraction : {0.25, 0.5, 0.75, 1.0}) {
        const auto collected = static_cast<std::int64_t>(std::llround(fraction * s.sim.m_total));
        const sim::DataPartition part =
            sim::random_partition(s.sim.m_total, collected, s.sim.num_devices, seed);
        sim::DescentParams params;
        params.seed = seed;
        const sim::TrajectoryReport r = sim::run_descent(problem, part, s.sim.rounds, params);
        ++out.runs;
        out.contractive += r.psi_contractive;
        out.unvalidated += !r.envelope_validated;
        out.bound += r.psi_contractive && r.bound_violated;
        out.contraction += r.contraction_violated;
        out.error_bound += r.error_bound_violated;
        out.recursion += r.recursion_violated;
      }
    }
    out.seconds = seconds_since(start);
    return out;
  }();
  return runs;
}

Outcome theorem_bound() {
  const BoundRuns& r = bound_runs();
  return {r.unvalidated == 0 && r.bound == 0 && r.contraction == 0 && r.seconds < 30.0,
          fmt::format("{} runs ({} contractive), {} envelopes failing hold-out, {} bound "
                      "violations, {} full-data rate violations, {:.2f} s (limit 30 s)",
                      r.runs, r.contractive, r.unvalidated, r.bound, r.contraction, r.seconds)};
}

Outcome step_inequalities() {
  const BoundRuns& r = bound_runs();
  return {r.unvalidated == 0 && r.error_bound == 0 && r.recursion == 0,
          fmt::format("{} runs, {} gradient-error bound violations, {} recursion violations",
                      r.runs, r.error_bound, r.recursion)};
}

Outcome cross_optimizer() {
  std::mt19937_64 rng(8080);
  std::uniform_real_distribution<double> u(0.7, 1.3);
  std::uniform_real_distribution<double> w(0.2, 0.8);
  double worst = 0.0;
  int feasible = 0;
  for (int i = 0; i < 20; ++i) {
    Scenario s = load_scenario(kDir + "/homogeneous_v_calibrated.toml");
    DeviceProfile& d = s.device_template;
    d.sample_rate_hz *= u(rng);
    d.cycles_per_sample *= u(rng);
    d.cpu_hz *= u(rng);
    d.sense_eff *= u(rng);
    d.bandwidth_hz *= u(rng);
    d.payload_bits *= u(rng);
    s.budget.e_total_j *= u(rng);
    const double alpha = w(rng);
    const SurrogateParams sp{alpha, 1.0 - alpha};
    const std::vector<DeviceProfile> fleet(s.budget.num_devices, d);
    const HomogeneousSolution one_d =
        solve_homogeneous(d, s.budget, sp, {100000, RoundsMode::integer});
    const HeterogeneousResult ao = solve_heterogeneous(fleet, s.budget, sp, s.ao);
    if (!one_d.feasible || ao.trace.status == AoStatus::infeasible) {
      worst = INFINITY;
      continue;
    }
    ++feasible;
    worst = std::max(worst, std::abs(ao.objective - one_d.objective_integer) /
                                std::abs(one_d.objective_integer));
  }
  return {feasible == 20 && worst <= 1e-3,
          fmt::format("{}/20 solved, worst relative gap {:.2e} (tol 1e-3)", feasible, worst)};
}

Outcome baseline_dominance() {
  const Scenario base = load_scenario(kDir + "/heterogeneous_v.toml");
  int wins[3] = {0, 0, 0};
  int pss_beats = 0;
  for (int i = 0; i < 100; ++i) {
    Scenario s = base;
    s.heterogeneity.seed = 5000 + i;
    const Fleet fleet = generate_fleet(s);
    const HeterogeneousResult h = solve_heterogeneous(fleet.devices, s.budget, s.surrogate, s.ao);
    const double proposed =
        make_result_row(s.id, "proposed-heterog", h.plan, fleet.devices, s.budget, s.surrogate)
            .objective;
    int j = 0;
    for (BaselineKind kind : {BaselineKind::eas, BaselineKind::gss, BaselineKind::pss}) {
      const BaselinePlan bp = allocate(kind, fleet.devices, s.budget);
      const double other =
          make_result_row(s.id, to_string(kind), bp.plan, fleet.devices, s.budget, s.surrogate)
              .objective;
      wins[j] += proposed <= other;
      if (kind == BaselineKind::pss) pss_beats += other < proposed;
      ++j;
    }
  }
  return {wins[0] >= 95 && wins[1] >= 95 && wins[2] >= 95 && pss_beats == 0,
          fmt::format("proposed <= EAS {}/100, GSS {}/100, PSS {}/100 (need 95); PSS better in {}",
                      wins[0], wins[1], wins[2], pss_beats)};
}

Outcome heterogeneity_trend() {
  const Scenario base = load_scenario(kDir + "/heterogeneous_v.toml");
  std::vector<double> means;
  for (double sd : {0.1, 0.3, 0.5}) {
    double sum = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
      Scenario s = base;
      s.heterogeneity.std_scale = sd;
      s.heterogeneity.seed = seed;
      const Fleet fleet = generate_fleet(s);
      sum += static_cast<double>(
          solve_heterogeneous(fleet.devices, s.budget, s.surrogate, s.ao).plan.rounds);
    }
    means.push_back(sum / 20.0);
  }
  return {means[0] > means[1] && means[1] > means[2],
          fmt::format("mean rounds over 20 fleets: std 0.1 {:.2f}, 0.3 {:.2f}, 0.5 {:.2f} "
                      "(reference trend 74, 27, 4)",
                      means[0], means[1], means[2])};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"objective table values", table_one},
      {"homogeneous optimizer", table_two_optimizer},
      {"ordering across weights", table_two_ordering},
      {"alternating monotonicity", ao_monotone},
      {"LP oracle equivalence", lp_oracle_check},
      {"convergence bound validity", theorem_bound},
      {"per-step inequalities", step_inequalities},
      {"cross-optimizer consistency", cross_optimizer},
      {"baseline dominance", baseline_dominance},
      {"heterogeneity degradation", heterogeneity_trend},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    fmt::print("{} {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
