#include "edgeplan/heterogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "edgeplan/lp.hpp"

namespace edgeplan {

void validate(const AoConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("AoConfig.epsilon must be > 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("AoConfig.max_iters must be >= 1");
  if (!(cfg.init_fraction > 0.0 && cfg.init_fraction <= 1.0)) {
    throw std::invalid_argument("AoConfig.init_fraction must be in (0, 1]");
  }
}

const char* to_string(AoStatus status) {
  switch (status) {
    case AoStatus::converged: return "converged";
    case AoStatus::max_iters: return "max_iters";
    case AoStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

const char* to_string(AoStep step) {
  switch (step) {
    case AoStep::initial: return "initial";
    case AoStep::alternating: return "alternating";
    case AoStep::round_search: return "round_search";
  }
  return "unknown";
}

double collected_continuous(std::span<const double> t_sens,
                            std::span<const DeviceProfile> profiles) {
  double total = 0.0;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    total += samples_continuous(t_sens[k], profiles[k]);
  }
  return total;
}

namespace {

void check_fleet(std::span<const double> t_sens, std::span<const DeviceProfile> profiles) {
  if (t_sens.size() != profiles.size()) {
    throw std::invalid_argument("sensing-time vector and fleet differ in length");
  }
}

double sensing_energy_model(double t, const DeviceProfile& p, SensingEnergy model) {
  if (model == SensingEnergy::linearized) return p.sense_eff * t + p.sense_offset_j;
  return sensing_energy(t, p);
}

}  // namespace

double round_bound_given_tsens(std::span<const double> t_sens,
                               std::span<const DeviceProfile> profiles,
                               const SystemBudget& budget, SensingEnergy model) {
  check_fleet(t_sens, profiles);
  double max_sense = 0.0;
  double max_round_time = 0.0;
  double sense_energy = 0.0;
  double round_energy = 0.0;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const DeviceProfile& p = profiles[k];
    const double samples = samples_continuous(t_sens[k], p);
    const CommCost comm = comm_cost_per_round(p);
    max_sense = std::max(max_sense, t_sens[k]);
    max_round_time = std::max(max_round_time, comp_time_per_round(samples, p) + comm.seconds);
    sense_energy += sensing_energy_model(t_sens[k], p, model);
    round_energy += comp_energy_per_round(samples, p) + comm.joules;
  }
  const double by_time = (budget.t_total_s - max_sense) / max_round_time;
  const double by_energy = (budget.e_total_j - sense_energy) / round_energy;
  return std::max(0.0, std::min(by_time, by_energy));
}

std::int64_t max_rounds_given_tsens(std::span<const double> t_sens,
                                    std::span<const DeviceProfile> profiles,
                                    const SystemBudget& budget, SensingEnergy model) {
  return static_cast<std::int64_t>(
      std::floor(round_bound_given_tsens(t_sens, profiles, budget, model)));
}

std::int64_t max_feasible_rounds(std::span<const DeviceProfile> profiles,
                                 const SystemBudget& budget) {
  double max_comm = 0.0;
  double comm_energy = 0.0;
  double offsets = 0.0;
  for (const DeviceProfile& p : profiles) {
    const CommCost comm = comm_cost_per_round(p);
    max_comm = std::max(max_comm, comm.seconds);
    comm_energy += comm.joules;
    offsets += p.sense_offset_j;
  }
  const double time_share = budget.t_total_s * (1.0 - kBudgetBackoff);
  const double energy_share = budget.e_total_j * (1.0 - kBudgetBackoff) - offsets;
  const double bound = std::min(time_share / max_comm, energy_share / comm_energy);
  return bound < 0.0 ? 0 : static_cast<std::int64_t>(std::floor(bound));
}

std::optional<std::vector<double>> best_tsens_given_rounds(std::int64_t rounds,
                                                           std::span<const DeviceProfile> profiles,
                                                           const SystemBudget& budget) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  const int k_dev = static_cast<int>(profiles.size());
  const int u = k_dev;
  const int v = k_dev + 1;
  const double r = static_cast<double>(rounds);

  lp::LinearProgram prog;
  prog.maximize = true;
  prog.objective_coeffs = Eigen::VectorXd::Zero(k_dev + 2);
  prog.constraint_matrix = Eigen::MatrixXd::Zero(2 * k_dev + 3, k_dev + 2);
  prog.rhs = Eigen::VectorXd::Zero(2 * k_dev + 3);

  const int row_time = 2 * k_dev;
  const int row_energy = 2 * k_dev + 1;
  const int row_data = 2 * k_dev + 2;
  double energy_rhs = budget.e_total_j * (1.0 - kBudgetBackoff);
  for (int k = 0; k < k_dev; ++k) {
    const DeviceProfile& p = profiles[k];
    const CommCost comm = comm_cost_per_round(p);
    prog.objective_coeffs(k) = p.sample_rate_hz;
    // t_k <= u
    prog.constraint_matrix(k, k) = 1.0;
    prog.constraint_matrix(k, u) = -1.0;
    // comp_k(t_k) + comm_k <= v
    prog.constraint_matrix(k_dev + k, k) = comp_time_per_round(p.sample_rate_hz, p);
    prog.constraint_matrix(k_dev + k, v) = -1.0;
    prog.rhs(k_dev + k) = -comm.seconds;
    // linear sensing energy plus I rounds of compute and uplink energy
    prog.constraint_matrix(row_energy, k) =
        p.sense_eff + r * comp_energy_per_round(p.sample_rate_hz, p);
    energy_rhs -= p.sense_offset_j + r * comm.joules;
    prog.constraint_matrix(row_data, k) = p.sample_rate_hz;
  }
  prog.constraint_matrix(row_time, u) = 1.0;
  prog.constraint_matrix(row_time, v) = r;
  prog.rhs(row_time) = budget.t_total_s * (1.0 - kBudgetBackoff);
  prog.rhs(row_energy) = energy_rhs;
  prog.rhs(row_data) = static_cast<double>(budget.m_total);

  const lp::LpSolution sol = lp::solve_lp(prog);
  if (sol.status != lp::LpStatus::optimal) return std::nullopt;
  std::vector<double> t(k_dev);
  for (int k = 0; k < k_dev; ++k) t[k] = std::max(0.0, sol.x(k));
  return t;
}

namespace {

struct Point {
  std::vector<double> t;
  std::int64_t rounds = 0;
  double objective = 0.0;
  double collected = 0.0;
};

class Solver {
 public:
  Solver(std::span<const DeviceProfile> profiles, const SystemBudget& budget,
         const SurrogateParams& sp, const AoConfig& cfg)
      : profiles_(profiles), budget_(budget), sp_(sp), cfg_(cfg) {}

  HeterogeneousResult run() {
    HeterogeneousResult result;
    std::optional<Point> start = initial_point();
    if (!start) {
      result.trace.status = AoStatus::infeasible;
      return result;
    }
    record(AoStep::initial, *start);
    best_ = *start;

    AoStatus status = alternate(*start);
    if (cfg_.refine_rounds) {
      if (std::optional<Point> refined = search_rounds(); refined &&
          refined->objective < best_.objective) {
        record(AoStep::round_search, *refined);
        best_ = *refined;
        status = alternate(*refined);
      }
    }

    result.trace = std::move(trace_);
    result.trace.status = status;
    result.plan.t_sens_s = best_.t;
    result.plan.rounds = best_.rounds;
    result.objective = best_.objective;
    result.collected_samples = best_.collected;
    safeguard(result);
    return result;
  }

 private:
  Point make_point(std::vector<double> t, std::int64_t rounds) const {
    Point pt;
    pt.collected = std::min(collected_continuous(t, profiles_),
                            static_cast<double>(budget_.m_total));
    pt.objective =
        objective(static_cast<double>(rounds), pt.collected, static_cast<double>(budget_.m_total),
                  sp_)
            .value;
    pt.rounds = rounds;
    pt.t = std::move(t);
    return pt;
  }

  std::int64_t rounds_for(const std::vector<double>& t) const {
    return max_rounds_given_tsens(t, profiles_, budget_, SensingEnergy::linearized);
  }

  std::optional<Point> initial_point() const {
    double fleet_rate = 0.0;
    for (const DeviceProfile& p : profiles_) fleet_rate += p.sample_rate_hz;
    double t0 = cfg_.init_fraction * static_cast<double>(budget_.m_total) / fleet_rate;
    for (int halvings = 0; halvings < 64; ++halvings, t0 *= 0.5) {
      std::vector<double> t(profiles_.size(), t0);
      const std::int64_t rounds = rounds_for(t);
      if (rounds >= 1) return make_point(std::move(t), rounds);
    }
    return std::nullopt;
  }

  std::optional<std::vector<double>> lp_tsens(std::int64_t rounds) {
    ++trace_.lp_solves;
    return best_tsens_given_rounds(rounds, profiles_, budget_);
  }

  void record(AoStep step, const Point& pt) {
    trace_.iterations.push_back({step, pt.objective, pt.rounds, pt.collected});
  }

  // Alternates the round update and the sensing LP from `from` until the
  // relative objective change drops below epsilon.
  AoStatus alternate(Point current) {
    for (int iter = 0; iter < cfg_.max_iters; ++iter) {
      const std::int64_t rounds = std::max<std::int64_t>(current.rounds, rounds_for(current.t));
      std::optional<std::vector<double>> t = lp_tsens(rounds);
      Point next = t ? make_point(std::move(*t), rounds) : make_point(current.t, rounds);
      ++trace_.alternating_iters;
      record(AoStep::alternating, next);
      if (next.objective < best_.objective) best_ = next;

      const double prev = current.objective;
      const double change = prev != 0.0 ? std::abs((next.objective - prev) / prev)
                                        : std::abs(next.objective - prev);
      current = std::move(next);
      if (change <= cfg_.epsilon) return AoStatus::converged;
    }
    return AoStatus::max_iters;
  }

  // Objective of the best sensing allocation at a fixed round count.
  double reduced(std::int64_t rounds) {
    if (auto it = cache_.find(rounds); it != cache_.end()) return it->second.objective;
    std::optional<std::vector<double>> t = lp_tsens(rounds);
    Point pt;
    if (t) {
      pt = make_point(std::move(*t), rounds);
    } else {
      pt.rounds = rounds;
      pt.objective = std::numeric_limits<double>::infinity();
    }
    const double value = pt.objective;
    cache_.emplace(rounds, std::move(pt));
    return value;
  }

  // Minimizes the reduced objective over integer round counts: a geometric
  // ladder locates the basin, then an integer ternary search and a short
  // neighbourhood scan refine it.
  std::optional<Point> search_rounds() {
    const std::int64_t hi = max_feasible_rounds(profiles_, budget_);
    if (hi < 1) return std::nullopt;

    std::vector<std::int64_t> ladder;
    const int steps = 64;
    for (int i = 0; i <= steps; ++i) {
      const double r = std::pow(static_cast<double>(hi), static_cast<double>(i) / steps);
      ladder.push_back(std::clamp<std::int64_t>(std::llround(r), 1, hi));
    }
    ladder.push_back(best_.rounds);
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

    std::size_t arg = 0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (reduced(ladder[i]) < reduced(ladder[arg])) arg = i;
    }
    std::int64_t lo = ladder[arg > 0 ? arg - 1 : 0];
    std::int64_t up = ladder[std::min(arg + 1, ladder.size() - 1)];
    while (up - lo > 2) {
      const std::int64_t m1 = lo + (up - lo) / 3;
      const std::int64_t m2 = up - (up - lo) / 3;
      if (reduced(m1) <= reduced(m2)) {
        up = m2;
      } else {
        lo = m1;
      }
    }
    std::int64_t best_rounds = ladder[arg];
    for (std::int64_t r = std::max<std::int64_t>(1, lo - 3); r <= std::min(hi, up + 3); ++r) {
      if (reduced(r) < reduced(best_rounds)) best_rounds = r;
    }
    reduced(best_rounds);
    const Point& pt = cache_.at(best_rounds);
    if (!std::isfinite(pt.objective)) return std::nullopt;
    return pt;
  }

  // The LP sees sensing energy as eta * t + zeta. When some device has
  // sense_exp > 1 the true energy can exceed the budget; shrink all sensing
  // times by a common factor until it fits.
  void safeguard(HeterogeneousResult& result) const {
    bool nonlinear = false;
    for (const DeviceProfile& p : profiles_) nonlinear = nonlinear || p.sense_exp > 1.0;
    if (!nonlinear) return;

    const std::vector<double> base = result.plan.t_sens_s;
    auto fits = [&](double scale) {
      AllocationPlan plan{base, result.plan.rounds};
      for (double& t : plan.t_sens_s) t *= scale;
      return evaluate_plan(plan, profiles_, budget_).feasible;
    };
    if (fits(1.0)) return;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? lo : hi) = mid;
    }
    std::vector<double> t = base;
    for (double& x : t) x *= lo;
    const Point pt = make_point(std::move(t), result.plan.rounds);
    result.plan.t_sens_s = pt.t;
    result.objective = pt.objective;
    result.collected_samples = pt.collected;
    result.safeguard_scale = lo;
  }

  std::span<const DeviceProfile> profiles_;
  const SystemBudget& budget_;
  const SurrogateParams& sp_;
  const AoConfig& cfg_;
  AoTrace trace_;
  Point best_;
  std::map<std::int64_t, Point> cache_;
};

}  // namespace

HeterogeneousResult solve_heterogeneous(std::span<const DeviceProfile> profiles,
                                        const SystemBudget& budget, const SurrogateParams& sp,
                                        const AoConfig& cfg) {
  if (profiles.empty()) throw std::invalid_argument("fleet must contain at least one device");
  if (static_cast<std::size_t>(budget.num_devices) != profiles.size()) {
    throw std::invalid_argument("SystemBudget.num_devices does not match the fleet size");
  }
  for (const DeviceProfile& p : profiles) validate(p);
  validate(budget);
  validate(sp);
  validate(cfg);
  return Solver(profiles, budget, sp, cfg).run();
}

}  // namespace edgeplan
