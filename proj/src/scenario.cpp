#include "edgeplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace edgeplan {

namespace {

int line_of(const toml::node& node) { return static_cast<int>(node.source().begin.line); }

[[noreturn]] void fail_field(const std::string& field, const toml::node& node, const char* what) {
  throw ScenarioError(fmt::format("line {}: {} {}", line_of(node), field, what), line_of(node));
}

double as_double(const toml::node& node, const std::string& field) {
  if (auto v = node.value<double>(); v && (node.is_floating_point() || node.is_integer())) {
    return *v;
  }
  fail_field(field, node, "must be a number");
}

std::int64_t as_int(const toml::node& node, const std::string& field) {
  if (!node.is_integer()) fail_field(field, node, "must be an integer");
  return *node.value<std::int64_t>();
}

bool as_bool(const toml::node& node, const std::string& field) {
  if (!node.is_boolean()) fail_field(field, node, "must be a boolean");
  return *node.value<bool>();
}

std::string as_string(const toml::node& node, const std::string& field) {
  if (!node.is_string()) fail_field(field, node, "must be a string");
  return *node.value<std::string>();
}

using Setter = std::function<void(const toml::node&, const std::string&)>;

// Applies `setters` to every key of `section`; unknown keys are rejected so
// that typos in unit suffixes do not silently fall back to defaults.
void apply(const toml::table& root, const std::string& name,
           const std::map<std::string, Setter>& setters) {
  const toml::node* node = root.get(name);
  if (!node) return;
  const toml::table* section = node->as_table();
  if (!section) fail_field(name, *node, "must be a table");
  for (const auto& [key, value] : *section) {
    const std::string field = name + "." + std::string(key.str());
    auto it = setters.find(std::string(key.str()));
    if (it == setters.end()) fail_field(field, value, "is not a recognised key");
    it->second(value, field);
  }
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ScenarioError(message);
}

}  // namespace

void validate(const Scenario& s) {
  try {
    validate(s.budget);
    DeviceProfile probe = s.device_template;
    if (s.path_gain_from_distance) {
      check(probe.distance_m.has_value(),
            "device.path_loss_from_distance requires device.distance_m");
      probe.path_gain = path_gain_from_distance(*probe.distance_m);
    }
    validate(probe);
    validate(s.surrogate);
    validate(s.ao);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  check(s.heterogeneity.std_scale >= 0.0 && std::isfinite(s.heterogeneity.std_scale),
        "heterogeneity.std_scale must be >= 0");
  check(s.sim.dim >= 1, "sim.dim must be >= 1");
  check(s.sim.ridge > 0.0, "sim.ridge must be > 0");
  check(s.sim.m_total >= 1, "sim.m_total must be >= 1");
  check(s.sim.num_devices >= 1, "sim.num_devices must be >= 1");
  check(s.sim.rounds >= 0, "sim.rounds must be >= 0");
  check(s.sim.seeds >= 1, "sim.seeds must be >= 1");
  check(!s.sim.data_fraction_ladder.empty(), "sim.data_fraction_ladder must not be empty");
  for (double f : s.sim.data_fraction_ladder) {
    check(f > 0.0 && f <= 1.0, "sim.data_fraction_ladder entries must be in (0, 1]");
  }
}

namespace {

Scenario parse_impl(std::string_view text, std::string_view source, std::string default_id) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const int line = static_cast<int>(e.source().begin.line);
    throw ScenarioError(fmt::format("{}:{}: {}", source, line, e.description()), line);
  }

  Scenario s;
  s.id = std::move(default_id);
  for (const auto& [key, value] : root) {
    static const char* known[] = {"id", "budget", "device", "heterogeneity", "surrogate", "ao",
                                  "sim"};
    bool ok = false;
    for (const char* k : known) ok = ok || key.str() == k;
    if (!ok) fail_field(std::string(key.str()), value, "is not a recognised section");
  }
  if (const toml::node* id = root.get("id")) s.id = as_string(*id, "id");

  SystemBudget& b = s.budget;
  apply(root, "budget",
        {{"t_total_s", [&](auto& n, auto& f) { b.t_total_s = as_double(n, f); }},
         {"e_total_j", [&](auto& n, auto& f) { b.e_total_j = as_double(n, f); }},
         {"m_total", [&](auto& n, auto& f) { b.m_total = as_int(n, f); }},
         {"num_devices", [&](auto& n, auto& f) { b.num_devices = static_cast<int>(as_int(n, f)); }}});

  DeviceProfile& d = s.device_template;
  apply(root, "device",
        {{"sample_rate_hz", [&](auto& n, auto& f) { d.sample_rate_hz = as_double(n, f); }},
         {"sense_eff_j_per_s", [&](auto& n, auto& f) { d.sense_eff = as_double(n, f); }},
         {"sense_exp", [&](auto& n, auto& f) { d.sense_exp = as_double(n, f); }},
         {"sense_offset_j", [&](auto& n, auto& f) { d.sense_offset_j = as_double(n, f); }},
         {"cycles_per_sample", [&](auto& n, auto& f) { d.cycles_per_sample = as_double(n, f); }},
         {"cpu_hz", [&](auto& n, auto& f) { d.cpu_hz = as_double(n, f); }},
         {"switch_cap", [&](auto& n, auto& f) { d.switch_cap = as_double(n, f); }},
         {"bandwidth_hz", [&](auto& n, auto& f) { d.bandwidth_hz = as_double(n, f); }},
         {"tx_power_w", [&](auto& n, auto& f) { d.tx_power_w = as_double(n, f); }},
         {"path_gain", [&](auto& n, auto& f) { d.path_gain = as_double(n, f); }},
         {"channel_quality", [&](auto& n, auto& f) { d.channel_quality = as_double(n, f); }},
         {"noise_psd_w_per_hz", [&](auto& n, auto& f) { d.noise_psd = as_double(n, f); }},
         {"payload_bits", [&](auto& n, auto& f) { d.payload_bits = as_double(n, f); }},
         {"distance_m", [&](auto& n, auto& f) { d.distance_m = as_double(n, f); }},
         {"path_loss_from_distance",
          [&](auto& n, auto& f) { s.path_gain_from_distance = as_bool(n, f); }}});

  Heterogeneity& h = s.heterogeneity;
  apply(root, "heterogeneity",
        {{"mode",
          [&](auto& n, auto& f) {
            const std::string mode = as_string(n, f);
            if (mode == "homogeneous") {
              h.mode = HeterogeneityMode::homogeneous;
            } else if (mode == "gaussian") {
              h.mode = HeterogeneityMode::gaussian;
            } else {
              fail_field(f, n, "must be \"homogeneous\" or \"gaussian\"");
            }
          }},
         {"std_scale", [&](auto& n, auto& f) { h.std_scale = as_double(n, f); }},
         {"seed", [&](auto& n, auto& f) {
            const std::int64_t seed = as_int(n, f);
            if (seed < 0) fail_field(f, n, "must be >= 0");
            h.seed = static_cast<std::uint64_t>(seed);
          }}});

  apply(root, "surrogate",
        {{"alpha", [&](auto& n, auto& f) { s.surrogate.alpha = as_double(n, f); }},
         {"beta", [&](auto& n, auto& f) { s.surrogate.beta = as_double(n, f); }}});

  apply(root, "ao",
        {{"epsilon", [&](auto& n, auto& f) { s.ao.epsilon = as_double(n, f); }},
         {"max_iters", [&](auto& n, auto& f) { s.ao.max_iters = static_cast<int>(as_int(n, f)); }},
         {"init_fraction", [&](auto& n, auto& f) { s.ao.init_fraction = as_double(n, f); }},
         {"refine_rounds", [&](auto& n, auto& f) { s.ao.refine_rounds = as_bool(n, f); }}});

  SimSettings& sim = s.sim;
  apply(root, "sim",
        {{"dim", [&](auto& n, auto& f) { sim.dim = static_cast<int>(as_int(n, f)); }},
         {"ridge", [&](auto& n, auto& f) { sim.ridge = as_double(n, f); }},
         {"m_total", [&](auto& n, auto& f) { sim.m_total = as_int(n, f); }},
         {"num_devices", [&](auto& n, auto& f) { sim.num_devices = static_cast<int>(as_int(n, f)); }},
         {"rounds", [&](auto& n, auto& f) { sim.rounds = static_cast<int>(as_int(n, f)); }},
         {"seeds", [&](auto& n, auto& f) { sim.seeds = static_cast<int>(as_int(n, f)); }},
         {"data_fraction_ladder", [&](auto& n, auto& f) {
            const toml::array* arr = n.as_array();
            if (!arr) fail_field(f, n, "must be an array of numbers");
            sim.data_fraction_ladder.clear();
            for (const toml::node& item : *arr) sim.data_fraction_ladder.push_back(as_double(item, f));
          }}});

  if (s.path_gain_from_distance && d.distance_m) {
    d.path_gain = path_gain_from_distance(*d.distance_m);
  }
  validate(s);
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
  return parse_impl(text, source, "scenario");
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_impl(buffer.str(), path.string(), path.stem().string());
}

Fleet generate_fleet(const Scenario& scenario) {
  Fleet fleet;
  const int k = scenario.budget.num_devices;
  const DeviceProfile& base = scenario.device_template;
  if (scenario.heterogeneity.mode == HeterogeneityMode::homogeneous ||
      scenario.heterogeneity.std_scale == 0.0) {
    fleet.devices.assign(k, base);
    return fleet;
  }

  std::mt19937_64 rng(scenario.heterogeneity.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = scenario.heterogeneity.std_scale;
  auto draw = [&](double mean) {
    const double v = mean + scale * mean * normal(rng);
    const double floor = kGaussianFloor * mean;
    if (v < floor) {
      ++fleet.clamped_draws;
      return floor;
    }
    return v;
  };
  // Device-level physical constants. sense_exp selects the sensing model,
  // and noise_psd and payload_bits are shared by the whole system.
  for (int i = 0; i < k; ++i) {
    DeviceProfile p = base;
    p.sample_rate_hz = draw(base.sample_rate_hz);
    p.sense_eff = draw(base.sense_eff);
    p.sense_offset_j = draw(base.sense_offset_j);
    p.cycles_per_sample = draw(base.cycles_per_sample);
    p.cpu_hz = draw(base.cpu_hz);
    p.switch_cap = draw(base.switch_cap);
    p.bandwidth_hz = draw(base.bandwidth_hz);
    p.tx_power_w = draw(base.tx_power_w);
    p.path_gain = draw(base.path_gain);
    p.channel_quality = draw(base.channel_quality);
    fleet.devices.push_back(p);
  }
  return fleet;
}

}  // namespace edgeplan
