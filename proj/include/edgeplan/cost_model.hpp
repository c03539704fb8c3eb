#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace edgeplan {

/// Physical constants of one edge device: sensor, processor and radio.
///
/// Defaults are the homogeneous reference configuration (K = 20 devices,
/// 10 Hz sampling, 200 cycles/s CPU, 2 kHz channel at 0.5 W).
struct DeviceProfile {
  double sample_rate_hz = 10.0;     // samples per second of sensing
  double sense_eff = 0.5;           // J / s^sense_exp
  double sense_exp = 1.0;           // >= 1, convex sensing energy
  double sense_offset_j = 0.1;      // fixed boot cost of the sensor
  double cycles_per_sample = 50.0;  // CPU cycles per sample per round
  double cpu_hz = 200.0;            // CPU cycles per second
  double switch_cap = 1e-11;        // effective switched capacitance
  double bandwidth_hz = 2000.0;
  double tx_power_w = 0.5;
  double path_gain = 1.0;           // linear large-scale gain
  double channel_quality = 1.0;     // deterministic fading factor
  double noise_psd = 4e-11;         // W/Hz
  double payload_bits = 21880.0;    // uplink payload per round
  std::optional<double> distance_m; // only used by path_gain_from_distance
};

/// Throws std::invalid_argument naming the first offending field.
void validate(const DeviceProfile& profile);

struct SystemBudget {
  double t_total_s = 5000.0;
  double e_total_j = 12000.0;
  std::int64_t m_total = 20000;
  int num_devices = 20;
};

void validate(const SystemBudget& budget);

/// Decision variables: per-device sensing durations and the round count.
struct AllocationPlan {
  std::vector<double> t_sens_s;
  std::int64_t rounds = 0;
};

struct DeviceCost {
  double sense_time_s = 0.0;
  double sense_energy_j = 0.0;
  double comp_time_per_round_s = 0.0;
  double comp_energy_per_round_j = 0.0;
  double comm_time_per_round_s = 0.0;
  double comm_energy_per_round_j = 0.0;
  std::int64_t samples = 0;
};

struct CostReport {
  std::vector<DeviceCost> devices;
  double wall_clock_s = 0.0;
  double total_energy_j = 0.0;
  double time_slack_s = 0.0;
  double energy_slack_j = 0.0;
  std::int64_t collected = 0;
  bool within_data_cap = true;
  bool feasible = false;  // time_slack_s >= 0 && energy_slack_j >= 0
};

struct CommCost {
  double seconds = 0.0;
  double joules = 0.0;
};

/// Samples gathered in `t_sens_s` seconds, floored to whole samples.
std::int64_t samples_collected(double t_sens_s, const DeviceProfile& profile);
/// Continuous relaxation used by the optimizers.
double samples_continuous(double t_sens_s, const DeviceProfile& profile);

/// eta * t^delta + zeta.
double sensing_energy(double t_sens_s, const DeviceProfile& profile);

double comp_time_per_round(double samples, const DeviceProfile& profile);
double comp_energy_per_round(double samples, const DeviceProfile& profile);

/// Shannon rate b * log2(1 + p g theta / (N0 b)) in bit/s.
double link_rate(const DeviceProfile& profile);

CommCost comm_cost_per_round(const DeviceProfile& profile);

/// Linear gain for the 40 + 30 log10(distance) dB path-loss law.
double path_gain_from_distance(double distance_m);

/// Time and energy accounting of a plan. Sample counts are floored here.
/// Throws std::invalid_argument when plan and fleet sizes differ.
CostReport evaluate_plan(const AllocationPlan& plan,
                         std::span<const DeviceProfile> profiles,
                         const SystemBudget& budget);

}  // namespace edgeplan
