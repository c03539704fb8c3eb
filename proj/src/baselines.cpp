#include "edgeplan/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "edgeplan/heterogeneous.hpp"

namespace edgeplan {

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::eas: return "eas";
    case BaselineKind::gss: return "gss";
    case BaselineKind::pss: return "pss";
    case BaselineKind::urs: return "urs";
  }
  return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "eas") return BaselineKind::eas;
  if (name == "gss") return BaselineKind::gss;
  if (name == "pss") return BaselineKind::pss;
  if (name == "urs") return BaselineKind::urs;
  throw std::invalid_argument("unknown baseline kind '" + std::string(name) + "'");
}

double efficiency_factor(const DeviceProfile& p) {
  const double cost = p.cycles_per_sample *
                      (p.sense_eff + p.sense_offset_j + p.switch_cap + p.tx_power_w);
  return p.sample_rate_hz * p.cpu_hz * link_rate(p) / cost;
}

BaselinePlan allocate(BaselineKind kind, std::span<const DeviceProfile> profiles,
                      const SystemBudget& budget, const BaselineOptions& options) {
  if (profiles.empty()) throw std::invalid_argument("fleet must contain at least one device");
  for (const DeviceProfile& p : profiles) validate(p);
  validate(budget);
  if (!(options.pss_fraction > 0.0 && options.pss_fraction <= 1.0)) {
    throw std::invalid_argument("pss_fraction must be in (0, 1]");
  }
  if (kind == BaselineKind::urs && options.urs_round_cap < 1) {
    throw std::invalid_argument("urs_round_cap must be >= 1");
  }

  double fleet_rate = 0.0;
  for (const DeviceProfile& p : profiles) fleet_rate += p.sample_rate_hz;
  if (!(fleet_rate > 0.0)) throw std::invalid_argument("fleet sampling rate must be > 0");
  const double m_total = static_cast<double>(budget.m_total);

  BaselinePlan out;
  out.kind = kind;
  std::vector<double>& t = out.plan.t_sens_s;
  switch (kind) {
    case BaselineKind::eas: {
      std::vector<double> phi;
      phi.reserve(profiles.size());
      for (const DeviceProfile& p : profiles) phi.push_back(efficiency_factor(p));
      const double phi_max = *std::max_element(phi.begin(), phi.end());
      double weighted_rate = 0.0;
      for (std::size_t k = 0; k < profiles.size(); ++k) {
        weighted_rate += phi[k] / phi_max * profiles[k].sample_rate_hz;
      }
      const double horizon = m_total / weighted_rate;
      for (double f : phi) t.push_back(horizon * f / phi_max);
      break;
    }
    case BaselineKind::gss:
    case BaselineKind::urs:
      t.assign(profiles.size(), m_total / fleet_rate);
      break;
    case BaselineKind::pss:
      t.assign(profiles.size(), options.pss_fraction * m_total / fleet_rate);
      break;
  }

  if (kind == BaselineKind::urs) {
    out.plan.rounds = options.urs_round_cap;
    out.budget_exempt = true;
    return out;
  }
  out.plan.rounds = max_rounds_given_tsens(t, profiles, budget);
  out.over_budget = out.plan.rounds < 1;
  return out;
}

}  // namespace edgeplan
