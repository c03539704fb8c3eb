#include "edgeplan/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgeplan {

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("DeviceProfile.") + field +
                                " must be finite and > 0");
  }
}

}  // namespace

void validate(const DeviceProfile& p) {
  require_positive(p.sample_rate_hz, "sample_rate_hz");
  require_positive(p.sense_eff, "sense_eff");
  require_positive(p.sense_exp, "sense_exp");
  if (p.sense_exp < 1.0) {
    throw std::invalid_argument("DeviceProfile.sense_exp must be >= 1");
  }
  if (!(p.sense_offset_j >= 0.0) || !std::isfinite(p.sense_offset_j)) {
    throw std::invalid_argument("DeviceProfile.sense_offset_j must be >= 0");
  }
  require_positive(p.cycles_per_sample, "cycles_per_sample");
  require_positive(p.cpu_hz, "cpu_hz");
  require_positive(p.switch_cap, "switch_cap");
  require_positive(p.bandwidth_hz, "bandwidth_hz");
  require_positive(p.tx_power_w, "tx_power_w");
  require_positive(p.path_gain, "path_gain");
  require_positive(p.channel_quality, "channel_quality");
  require_positive(p.noise_psd, "noise_psd");
  require_positive(p.payload_bits, "payload_bits");
  if (p.distance_m) require_positive(*p.distance_m, "distance_m");
}

void validate(const SystemBudget& b) {
  if (!(b.t_total_s > 0.0) || !std::isfinite(b.t_total_s)) {
    throw std::invalid_argument("SystemBudget.t_total_s must be > 0");
  }
  if (!(b.e_total_j > 0.0) || !std::isfinite(b.e_total_j)) {
    throw std::invalid_argument("SystemBudget.e_total_j must be > 0");
  }
  if (b.m_total <= 0) throw std::invalid_argument("SystemBudget.m_total must be > 0");
  if (b.num_devices <= 0) throw std::invalid_argument("SystemBudget.num_devices must be > 0");
}

std::int64_t samples_collected(double t_sens_s, const DeviceProfile& profile) {
  return static_cast<std::int64_t>(std::floor(samples_continuous(t_sens_s, profile)));
}

double samples_continuous(double t_sens_s, const DeviceProfile& profile) {
  return t_sens_s * profile.sample_rate_hz;
}

double sensing_energy(double t_sens_s, const DeviceProfile& profile) {
  if (t_sens_s <= 0.0) return profile.sense_offset_j;
  return profile.sense_eff * std::pow(t_sens_s, profile.sense_exp) + profile.sense_offset_j;
}

double comp_time_per_round(double samples, const DeviceProfile& profile) {
  return profile.cycles_per_sample * samples / profile.cpu_hz;
}

double comp_energy_per_round(double samples, const DeviceProfile& profile) {
  return profile.switch_cap * profile.cycles_per_sample * samples * profile.cpu_hz *
         profile.cpu_hz;
}

double link_rate(const DeviceProfile& p) {
  const double snr = p.tx_power_w * p.path_gain * p.channel_quality / (p.noise_psd * p.bandwidth_hz);
  return p.bandwidth_hz * std::log2(1.0 + snr);
}

CommCost comm_cost_per_round(const DeviceProfile& profile) {
  const double seconds = profile.payload_bits / link_rate(profile);
  return {seconds, seconds * profile.tx_power_w};
}

double path_gain_from_distance(double distance_m) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("distance_m must be > 0");
  const double loss_db = 40.0 + 30.0 * std::log10(distance_m);
  return std::pow(10.0, -loss_db / 10.0);
}

CostReport evaluate_plan(const AllocationPlan& plan, std::span<const DeviceProfile> profiles,
                         const SystemBudget& budget) {
  if (plan.t_sens_s.size() != profiles.size()) {
    throw std::invalid_argument("plan has " + std::to_string(plan.t_sens_s.size()) +
                                " sensing times for " + std::to_string(profiles.size()) +
                                " devices");
  }
  if (plan.rounds < 0) throw std::invalid_argument("plan.rounds must be >= 0");

  CostReport report;
  report.devices.reserve(profiles.size());
  const double rounds = static_cast<double>(plan.rounds);
  double max_sense = 0.0;
  double max_round = 0.0;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const DeviceProfile& p = profiles[k];
    const double t = plan.t_sens_s[k];
    if (!(t >= 0.0)) throw std::invalid_argument("sensing times must be >= 0");
    DeviceCost c;
    c.samples = samples_collected(t, p);
    c.sense_time_s = t;
    c.sense_energy_j = sensing_energy(t, p);
    c.comp_time_per_round_s = comp_time_per_round(static_cast<double>(c.samples), p);
    c.comp_energy_per_round_j = comp_energy_per_round(static_cast<double>(c.samples), p);
    const CommCost comm = comm_cost_per_round(p);
    c.comm_time_per_round_s = comm.seconds;
    c.comm_energy_per_round_j = comm.joules;

    max_sense = std::max(max_sense, t);
    max_round = std::max(max_round, c.comp_time_per_round_s + c.comm_time_per_round_s);
    report.total_energy_j +=
        c.sense_energy_j + rounds * (c.comp_energy_per_round_j + c.comm_energy_per_round_j);
    report.collected += c.samples;
    report.devices.push_back(c);
  }
  // With no rounds the per-round maximum does not contribute.
  report.wall_clock_s = max_sense + (plan.rounds > 0 ? rounds * max_round : 0.0);
  report.time_slack_s = budget.t_total_s - report.wall_clock_s;
  report.energy_slack_j = budget.e_total_j - report.total_energy_j;
  report.within_data_cap = report.collected <= budget.m_total;
  report.feasible = report.time_slack_s >= 0.0 && report.energy_slack_j >= 0.0;
  return report;
}

}  // namespace edgeplan
