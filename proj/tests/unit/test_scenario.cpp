#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "bohm/error.hpp"
#include "bohm/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bohmlab_scenario_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json ring_config() {
  return json::parse(R"({
    "schema": "bohmlab-scenario/1",
    "scenario": "ring_state",
    "seed": 7,
    "grid": {"points": [64], "extent": [6.283185307179586]},
    "solver": {"method": "split_spectral", "dt": 0.001, "T": 0.003},
    "params": {"windings": [1, 2]}
  })");
}

json free_config() {
  return json::parse(R"({
    "schema": "bohmlab-scenario/1",
    "scenario": "free_gaussian",
    "seed": 11,
    "grid": {"points": [256], "extent": [40.0]},
    "solver": {"dt": 0.01, "T": 0.2, "snapshot_stride": 2},
    "trajectory": {"n": 300, "dt_traj": 0.02},
    "output": {"csv_trajectories": 5},
    "params": {"newton_trajectories": 5, "newton_dt": 0.01, "drift_steps": 10}
  })");
}

// Runs a config expected to be rejected and returns the error.
bohm::Error rejected(const json& cfg, const fs::path& out, bool strict = false) {
  bohm::RunOptions o;
  o.out = out;
  o.strict = strict;
  try {
    bohm::run_config_text(cfg.dump(), "case", o);
  } catch (const bohm::Error& e) {
    return e;
  }
  FAIL("config was accepted");
  return bohm::Error(bohm::ErrorKind::io, "unreachable");
}

}  // namespace

TEST_CASE("registry lists the ten scenarios once each") {
  const auto& reg = bohm::scenario_registry();
  CHECK(reg.size() == 10);
  std::set<std::string> names;
  for (const auto& s : reg) {
    names.insert(s.name);
    CHECK(!s.summary.empty());
    CHECK(!s.description.empty());
    CHECK(json::parse(s.params_json).is_object());
  }
  CHECK(names == std::set<std::string>{"free_gaussian", "boosted_gaussian", "harmonic", "two_gaussian_interference",
                                       "ring_state", "stern_gerlach", "pointer_measurement", "two_fermion",
                                       "two_boson", "qtm_free_gaussian"});
  const auto listing = json::parse(bohm::registry_json());
  REQUIRE(listing.is_array());
  CHECK(listing.size() == 10);
  CHECK(listing[0]["name"] == reg[0].name);
}

TEST_CASE("describe explains ring phase jumps and rejects unknown names") {
  const auto& ring = bohm::describe_scenario("ring_state");
  CHECK(ring.description.find("integer multiple of 2 pi hbar") != std::string::npos);
  CHECK(ring.description.find("winding number") != std::string::npos);
  try {
    bohm::describe_scenario("free_gausian");
    FAIL("unknown name accepted");
  } catch (const bohm::Error& e) {
    CHECK(e.kind() == bohm::ErrorKind::validation);
    const std::string msg = e.what();
    for (const auto& s : bohm::scenario_registry()) CHECK(msg.find(s.name) != std::string::npos);
  }
}

TEST_CASE("missing seed is a validation error and writes nothing") {
  const fs::path out = scratch("noseed");
  json cfg = ring_config();
  cfg.erase("seed");
  const auto e = rejected(cfg, out);
  CHECK(e.kind() == bohm::ErrorKind::validation);
  CHECK(std::string(e.what()).find("seed") != std::string::npos);
  CHECK(!fs::exists(out));
}

TEST_CASE("validation names the offending field") {
  const fs::path out = scratch("invalid");
  struct Case {
    const char* what;
    json cfg;
    const char* field;
  };
  std::vector<Case> cases;
  auto with = [](json j, auto&& edit) {
    edit(j);
    return j;
  };
  cases.push_back({"unknown top-level key", with(ring_config(), [](json& j) { j["sede"] = 1; }), "sede"});
  cases.push_back({"unknown grid key", with(ring_config(), [](json& j) { j["grid"]["pointz"] = 3; }), "grid.pointz"});
  cases.push_back({"unknown param", with(ring_config(), [](json& j) { j["params"]["m"] = 1; }), "params.m"});
  cases.push_back({"param type", with(ring_config(), [](json& j) { j["params"]["windings"] = "one"; }),
                   "params.windings"});
  cases.push_back({"bad schema", with(ring_config(), [](json& j) { j["schema"] = "v2"; }), "schema"});
  cases.push_back({"negative seed", with(ring_config(), [](json& j) { j["seed"] = -3; }), "seed"});
  cases.push_back({"unknown scenario", with(ring_config(), [](json& j) { j["scenario"] = "ring"; }), "ring_state"});
  cases.push_back({"missing block", with(free_config(), [](json& j) { j.erase("trajectory"); }), "trajectory"});
  cases.push_back({"unused block", with(ring_config(), [](json& j) { j["qtm"] = json::object(); }), "qtm"});
  cases.push_back({"axis count", with(ring_config(), [](json& j) { j["grid"]["points"] = {64, 64}; }),
                   "grid.points"});
  cases.push_back({"power of two", with(ring_config(), [](json& j) { j["grid"]["points"] = {60}; }),
                   "grid.points"});
  cases.push_back({"boundary", with(ring_config(), [](json& j) { j["grid"]["boundary"] = "open"; }),
                   "grid.boundary"});
  cases.push_back({"dt multiple", with(ring_config(), [](json& j) { j["solver"]["T"] = 0.0035; }), "solver.T"});
  cases.push_back({"negative dt", with(ring_config(), [](json& j) { j["solver"]["dt"] = -0.1; }), "solver.dt"});
  cases.push_back({"method", with(ring_config(), [](json& j) { j["solver"]["method"] = "euler"; }),
                   "solver.method"});
  cases.push_back({"dt_traj beyond snapshots",
                   with(free_config(), [](json& j) { j["trajectory"]["dt_traj"] = 0.05; }), "trajectory.dt_traj"});
  cases.push_back({"output format", with(ring_config(), [](json& j) { j["output"]["formats"] = {"xml"}; }),
                   "output.formats"});
  for (const auto& c : cases) {
    CAPTURE(c.what);
    const auto e = rejected(c.cfg, out);
    CHECK(e.kind() == bohm::ErrorKind::validation);
    CHECK(std::string(e.what()).find(c.field) != std::string::npos);
    CHECK(!fs::exists(out));
  }
  const auto e = [&] {
    try {
      bohm::run_config_text("{ not json", "case", {});
    } catch (const bohm::Error& err) {
      return err;
    }
    return bohm::Error(bohm::ErrorKind::io, "accepted");
  }();
  CHECK(e.kind() == bohm::ErrorKind::validation);
}

TEST_CASE("ring run writes summary, ledgers and identical bytes on rerun") {
  const fs::path a = scratch("ring_a"), b = scratch("ring_b");
  bohm::RunOptions o;
  o.out = a;
  const auto r1 = bohm::run_config_text(ring_config().dump(), "ring", o);
  o.out = b;
  const auto r2 = bohm::run_config_text(ring_config().dump(), "ring", o);
  CHECK(r1.passed());
  CHECK(r1.directory == a / "ring");
  CHECK(r1.files == r2.files);
  for (const auto& f : r1.files) {
    CAPTURE(f);
    CHECK(slurp(a / "ring" / f) == slurp(b / "ring" / f));
  }
  const auto summary = json::parse(slurp(a / "ring" / "summary.json"));
  CHECK(summary["scenario"] == "ring_state");
  CHECK(summary["seed"] == 7);
  CHECK(summary["passed"] == true);
  bool found = false;
  for (const auto& c : summary["checks"]) {
    if (c["name"] == "winding_number_m2") {
      found = true;
      CHECK(c["value"] == 2.0);
    }
  }
  CHECK(found);
  const auto ledger = json::parse(slurp(a / "ring" / "jumps_m2.json"));
  REQUIRE(ledger.size() == 1);
  CHECK(ledger[0]["multiple"] == 2);
}

TEST_CASE("trajectory CSV layout, seed override and format selection") {
  const fs::path out = scratch("free");
  bohm::RunOptions o;
  o.out = out;
  o.seed = 99;
  json cfg = free_config();
  cfg["output"]["formats"] = {"csv", "json"};
  const auto r = bohm::run_config_text(cfg.dump(), "free", o);
  CHECK(r.seed == 99);
  const fs::path dir = out / "free";
  CHECK(json::parse(slurp(dir / "summary.json"))["seed"] == 99);
  CHECK(!fs::exists(dir / "psi_0.bin"));
  std::ifstream csv(dir / "trajectories.csv");
  std::string header, row;
  std::getline(csv, header);
  CHECK(header == "t,Q_1,flag,id");
  std::size_t rows = 0;
  while (std::getline(csv, row)) ++rows;
  CHECK(rows == 5 * 11);  // 5 members, t = 0, 0.02, ..., 0.2
  const auto manifest = json::parse(slurp(dir / "trajectories.json"));
  CHECK(manifest["ensemble_size"] == 300);
  CHECK(manifest["trajectories_written"] == 5);
  const auto eq = json::parse(slurp(dir / "equivariance.json"));
  CHECK(eq["t"].size() == 11);  // every snapshot lies on the trajectory time base
}

TEST_CASE("strict mode turns accuracy warnings into errors") {
  const fs::path out = scratch("strict");
  json cfg = free_config();
  cfg["params"]["sigma0"] = 9.0;  // tails wrap around the 40-wide box
  const auto e = rejected(cfg, out, true);
  CHECK(e.kind() == bohm::ErrorKind::accuracy);
  CHECK(!fs::exists(out));
}
