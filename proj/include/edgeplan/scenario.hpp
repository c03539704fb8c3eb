#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgeplan/cost_model.hpp"
#include "edgeplan/heterogeneous.hpp"
#include "edgeplan/surrogate.hpp"

namespace edgeplan {

/// Scenario file problem: malformed TOML (line is 1-based) or an invalid
/// field value (line 0 when the field came from defaults).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, int line = 0)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class HeterogeneityMode { homogeneous, gaussian };

struct Heterogeneity {
  HeterogeneityMode mode = HeterogeneityMode::homogeneous;
  double std_scale = 0.5;  // std of each field as a multiple of its template value
  std::uint64_t seed = 1;
};

/// Settings of the desk-scale descent simulation.
struct SimSettings {
  int dim = 5;
  double ridge = 1.0;
  std::int64_t m_total = 200;
  int num_devices = 20;
  int rounds = 40;
  int seeds = 10;
  std::vector<double> data_fraction_ladder{0.25, 0.5, 0.75, 1.0};
};

struct Scenario {
  std::string id = "scenario";
  SystemBudget budget;
  DeviceProfile device_template;
  bool path_gain_from_distance = false;
  Heterogeneity heterogeneity;
  SurrogateParams surrogate;
  AoConfig ao;
  SimSettings sim;
};

/// Throws ScenarioError naming the offending field.
void validate(const Scenario& scenario);

/// Parses TOML text; keys missing from the text keep their defaults.
/// `source` is used in error messages.
Scenario parse_scenario(std::string_view text, std::string_view source = "<memory>");

/// Reads and parses a scenario file. The scenario id defaults to the file stem.
Scenario load_scenario(const std::filesystem::path& path);

/// Floor applied to Gaussian draws, relative to the template value.
inline constexpr double kGaussianFloor = 1e-3;

struct Fleet {
  std::vector<DeviceProfile> devices;
  int clamped_draws = 0;  // Gaussian draws lifted to the positive floor
};

/// Homogeneous mode copies the template; Gaussian mode redraws each physical
/// field independently per device. Deterministic per heterogeneity seed.
Fleet generate_fleet(const Scenario& scenario);

}  // namespace edgeplan
