// bohmlab: run scenario configs, list and describe the registry.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input
// (validation, configuration, io, strict-mode accuracy), 3 runtime failure
// (numerical instability and anything else). With several configs the
// highest code wins.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "bohm/error.hpp"
#include "bohm/scenario.hpp"

namespace {

using json = nlohmann::ordered_json;

int exit_code(bohm::ErrorKind k) {
  switch (k) {
    case bohm::ErrorKind::validation:
    case bohm::ErrorKind::configuration:
    case bohm::ErrorKind::io:
    case bohm::ErrorKind::accuracy:
      return 2;
    default:
      return 3;
  }
}

struct Outcome {
  std::string config;
  std::optional<bohm::RunReport> report;
  std::string error;
  std::string kind;
  int code = 0;
};

Outcome run_one(const std::string& path, const bohm::RunOptions& opts) {
  Outcome o;
  o.config = path;
  try {
    o.report = bohm::run_config(path, opts);
    o.code = o.report->passed() ? 0 : 1;
  } catch (const bohm::Error& e) {
    o.error = e.what();
    o.kind = std::string(bohm::to_string(e.kind()));
    o.code = exit_code(e.kind());
  } catch (const std::exception& e) {
    o.error = e.what();
    o.kind = "runtime";
    o.code = 3;
  }
  return o;
}

json outcome_json(const Outcome& o) {
  json j;
  j["config"] = o.config;
  if (!o.report) {
    j["error"] = {{"kind", o.kind}, {"message", o.error}};
    j["exit_code"] = o.code;
    return j;
  }
  const auto& r = *o.report;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["directory"] = r.directory.string();
  j["passed"] = r.passed();
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"passed", c.passed}});
  }
  j["exit_code"] = o.code;
  return j;
}

void print_outcome(const Outcome& o) {
  if (!o.report) {
    std::cerr << o.config << ": error [" << o.kind << "]: " << o.error << "\n";
    return;
  }
  const auto& r = *o.report;
  std::size_t failed = 0;
  for (const auto& c : r.checks) failed += c.passed ? 0 : 1;
  std::printf("%s  %s (%s, seed %llu): %zu/%zu checks -> %s\n", r.passed() ? "PASS" : "FAIL", r.label.c_str(),
              r.scenario.c_str(), static_cast<unsigned long long>(r.seed), r.checks.size() - failed, r.checks.size(),
              r.directory.string().c_str());
  for (const auto& c : r.checks) {
    if (c.passed) continue;
    if (c.relation == "in") {
      std::printf("    failed %s = %.6g, wanted in [%.6g, %.6g]\n", c.name.c_str(), c.value, c.threshold, c.upper);
    } else {
      std::printf("    failed %s = %.6g, wanted %s %.6g\n", c.name.c_str(), c.value, c.relation.c_str(), c.threshold);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot-wave simulation harness"};
  app.require_subcommand(1);

  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  auto* run = app.add_subcommand("run", "Run one or more scenario configs");
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool parallel = false, strict = false;
  int threads = 1;
  run->add_option("configs", configs, "Config files")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Write outputs under DIR/<config name>");
  run->add_flag("--parallel", parallel, "Run configs as concurrent jobs");
  run->add_flag("--strict", strict, "Treat accuracy warnings as errors");
  run->add_option("--threads", threads, "Worker threads per run (0 = all cores)")->check(CLI::NonNegativeNumber);
  run->add_flag("--json", as_json, "Machine-readable output");

  auto* list = app.add_subcommand("list", "List registered scenarios");
  list->add_flag("--json", as_json, "Machine-readable output");

  auto* describe = app.add_subcommand("describe", "Describe one scenario");
  std::string name;
  describe->add_option("name", name, "Scenario name")->required();
  describe->add_flag("--json", as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*list) {
    if (as_json) {
      std::cout << bohm::registry_json() << "\n";
    } else {
      for (const auto& s : bohm::scenario_registry()) std::printf("%-26s %s\n", s.name.c_str(), s.summary.c_str());
    }
    return 0;
  }

  if (*describe) {
    try {
      const auto& s = bohm::describe_scenario(name);
      if (as_json) {
        json j;
        j["name"] = s.name;
        j["summary"] = s.summary;
        j["description"] = s.description;
        j["blocks"] = s.blocks;
        j["params"] = json::parse(s.params_json);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << s.name << "\n  " << s.summary << "\n\n" << s.description << "\n\nblocks:";
        for (const auto& b : s.blocks) std::cout << " " << b;
        std::cout << "\nparams (defaults): " << json::parse(s.params_json).dump() << "\n";
      }
      return 0;
    } catch (const bohm::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code(e.kind());
    }
  }

  bohm::RunOptions opts;
  opts.seed = seed;
  if (!out.empty()) opts.out = out;
  opts.strict = strict;
  opts.threads = threads;

  std::vector<Outcome> outcomes;
  if (parallel && configs.size() > 1) {
    std::vector<std::future<Outcome>> jobs;
    for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, run_one, c, opts));
    for (auto& j : jobs) outcomes.push_back(j.get());
  } else {
    for (const auto& c : configs) {
      outcomes.push_back(run_one(c, opts));
      if (!as_json) print_outcome(outcomes.back());
    }
  }

  int code = 0;
  json all = json::array();
  for (const auto& o : outcomes) {
    code = std::max(code, o.code);
    if (as_json) {
      all.push_back(outcome_json(o));
    } else if (parallel && configs.size() > 1) {
      print_outcome(o);
    }
  }
  if (as_json) std::cout << all.dump(2) << "\n";
  return code;
}
