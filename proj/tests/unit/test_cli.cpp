#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "edgeplan/report.hpp"

namespace fs = std::filesystem;
using edgeplan::cli::run;

namespace {

const std::string kDir = EDGEPLAN_SCENARIO_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("edgeplan_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path write_scenario(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / (name + ".toml");
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("optimize writes the frozen columns") {
  const fs::path out = fresh_dir("optimize");
  REQUIRE(run({"optimize", "--mode", "homog", "--scenario", kDir + "/homogeneous_v_calibrated.toml",
               "--out", out.string()}) == 0);
  const auto rows = read_csv(out / "results.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == edgeplan::result_columns());
  CHECK(rows[1][0] == "homogeneous_v_calibrated");
  CHECK(rows[1][1] == "proposed-homog");
  CHECK(rows[1][10] == "1");
  CHECK(std::abs(std::stod(rows[1][3]) - 25.0) <= 2.0);
}

TEST_CASE("heterogeneous mode on an identical fleet agrees with the 1-D search") {
  const fs::path a = fresh_dir("homog");
  const fs::path b = fresh_dir("heterog");
  const std::string scenario = kDir + "/homogeneous_v_calibrated.toml";
  REQUIRE(run({"optimize", "--mode", "homog", "--rounds-mode", "integer", "--scenario", scenario,
               "--out", a.string()}) == 0);
  REQUIRE(run({"optimize", "--mode", "heterog", "--scenario", scenario, "--out", b.string()}) == 0);
  const auto ja = nlohmann::json::parse(slurp(a / "summary.json"));
  const auto jb = nlohmann::json::parse(slurp(b / "summary.json"));
  const double homog = ja["solution"]["objective_integer"];
  const double heterog = jb["trace"]["iterations"].back()["objective"];
  CHECK(std::abs(homog - heterog) <= 1e-3 * std::abs(homog));
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
  const fs::path a = fresh_dir("sweep_a");
  const fs::path b = fresh_dir("sweep_b");
  const std::vector<std::string> base{"sweep", "--std-dev", "0.1,0.5", "--fleets", "3",
                                      "--scenario", kDir + "/heterogeneous_v.toml", "--out"};
  auto args_a = base;
  args_a.push_back(a.string());
  auto args_b = base;
  args_b.push_back(b.string());
  setenv("EDGEPLAN_THREADS", "1", 1);
  CHECK(edgeplan::cli::worker_count() == 1);
  REQUIRE(run(args_a) == 0);
  setenv("EDGEPLAN_THREADS", "4", 1);
  REQUIRE(run(args_b) == 0);
  unsetenv("EDGEPLAN_THREADS");
  CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("summary totals equal the column aggregates") {
  const fs::path out = fresh_dir("totals");
  REQUIRE(run({"sweep", "--alpha-beta", "--scenario", kDir + "/homogeneous_v_calibrated.toml",
               "--out", out.string()}) == 0);
  const auto rows = read_csv(out / "results.csv");
  REQUIRE(rows.size() == 6);
  double rounds = 0, collected = 0, objective = 0, wall = 0, energy = 0, feasible = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    rounds += std::stod(rows[i][5]);
    collected += std::stod(rows[i][6]);
    objective += std::stod(rows[i][7]);
    wall += std::stod(rows[i][8]);
    energy += std::stod(rows[i][9]);
    feasible += std::stod(rows[i][10]);
  }
  const auto totals = nlohmann::json::parse(slurp(out / "summary.json"))["totals"];
  CHECK(totals["rows"] == 5);
  CHECK(totals["rounds"].get<double>() == rounds);
  CHECK(totals["collected"].get<double>() == collected);
  CHECK(totals["feasible"].get<double>() == feasible);
  CHECK(totals["objective"].get<double>() == doctest::Approx(objective).epsilon(1e-9));
  CHECK(totals["wall_clock_s"].get<double>() == doctest::Approx(wall).epsilon(1e-9));
  CHECK(totals["energy_j"].get<double>() == doctest::Approx(energy).epsilon(1e-9));
}

TEST_CASE("URS rows are flagged as budget exempt") {
  const fs::path out = fresh_dir("urs");
  REQUIRE(run({"baseline", "--kind", "urs", "--scenario", kDir + "/homogeneous_v_calibrated.toml",
               "--out", out.string()}) == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["budget_exempt"] == true);
  CHECK(summary["urs_round_cap"].get<int>() > 100);
  const auto rows = read_csv(out / "results.csv");
  CHECK(rows[1][1] == "urs");
  CHECK(rows[1][10] == "0");
}

TEST_CASE("each baseline kind runs") {
  for (const char* kind : {"eas", "gss", "pss"}) {
    const fs::path out = fresh_dir(std::string("baseline_") + kind);
    CHECK(run({"baseline", "--kind", kind, "--scenario", kDir + "/heterogeneous_v.toml", "--out",
               out.string()}) == 0);
    CHECK(read_csv(out / "results.csv")[1][1] == kind);
  }
}

TEST_CASE("exit codes") {
  const fs::path out = fresh_dir("exit");
  CHECK(run({"optimize", "--bogus"}) == 1);
  CHECK(run({}) == 1);
  CHECK(run({"optimize", "--mode", "sideways"}) == 1);
  CHECK(run({"optimize", "--scenario", "/nonexistent.toml", "--out", out.string()}) == 1);
  const fs::path bad = write_scenario("edgeplan_bad", "[device]\nsample_rate_hz = -1.0\n");
  CHECK(run({"optimize", "--scenario", bad.string(), "--out", out.string()}) == 1);
  const fs::path tight = write_scenario("edgeplan_tight", "[budget]\nt_total_s = 0.3\n");
  CHECK(run({"optimize", "--scenario", tight.string(), "--out", out.string()}) == 2);
  CHECK(run({"optimize", "--mode", "heterog", "--scenario", tight.string(), "--out",
             out.string()}) == 2);
  CHECK(run({"sweep", "--out", out.string()}) == 1);
  CHECK(run({"sweep", "--std-dev", "0.1,x", "--out", out.string()}) == 1);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("seed override changes the fleet") {
  const fs::path a = fresh_dir("seed_a");
  const fs::path b = fresh_dir("seed_b");
  const std::string scenario = kDir + "/heterogeneous_v.toml";
  REQUIRE(run({"optimize", "--mode", "heterog", "--scenario", scenario, "--seed", "7", "--out",
               a.string()}) == 0);
  REQUIRE(run({"optimize", "--mode", "heterog", "--scenario", scenario, "--seed", "8", "--out",
               b.string()}) == 0);
  CHECK(slurp(a / "results.csv") != slurp(b / "results.csv"));
  CHECK(nlohmann::json::parse(slurp(a / "summary.json"))["scenario"]["seed"] == 7);
}

TEST_CASE("reproduce-tables passes on the calibrated scenario") {
  const fs::path out = fresh_dir("tables");
  CHECK(run({"reproduce-tables", "--scenario", kDir + "/homogeneous_v_calibrated.toml", "--out",
             out.string()}) == 0);
}

TEST_CASE("validate-bound and simulate on a small ladder") {
  const fs::path out = fresh_dir("bound");
  const fs::path small = write_scenario(
      "edgeplan_small_sim", "[sim]\nm_total = 80\nnum_devices = 4\nrounds = 15\nseeds = 2\n");
  CHECK(run({"validate-bound", "--instances", "3", "--scenario", small.string(), "--out",
             out.string()}) == 0);
  CHECK(run({"simulate", "--scenario", small.string(), "--out", out.string()}) == 0);
  const std::string traj = slurp(out / "trajectory.csv");
  CHECK(traj.rfind("fraction,seed,iteration,gap", 0) == 0);
  // 4 fractions x 2 seeds x 16 iterates + header.
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 4 * 2 * 16 + 1);
}
