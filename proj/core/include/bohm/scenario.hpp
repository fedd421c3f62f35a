#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bohm {

/// One registered pass/fail comparison. `relation` is one of
/// "<", "<=", ">", ">=", "==" or "in" (upper set, closed interval).
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  double upper = 0.0;
  std::string relation;
  bool passed = false;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::string description;
  std::vector<std::string> blocks;  // config blocks the scenario requires
  std::string params_json;          // parameter defaults
};

/// The fixed list of runnable scenarios, in registry order.
const std::vector<ScenarioInfo>& scenario_registry();

/// Throws a validation error listing the valid names when `name` is unknown.
const ScenarioInfo& describe_scenario(std::string_view name);

/// Machine-readable listing: [{name, summary, blocks}, ...].
std::string registry_json();

struct RunOptions {
  std::optional<std::uint64_t> seed;         // overrides the config seed
  std::optional<std::filesystem::path> out;  // outputs go to <out>/<config stem>
  bool strict = false;  // warnings become accuracy errors
  int threads = 1;      // 0 picks the hardware concurrency
};

struct RunReport {
  std::string scenario;
  std::string label;
  std::uint64_t seed = 0;
  std::filesystem::path directory;
  std::vector<Check> checks;
  std::vector<std::string> files;  // written, relative to `directory`

  bool passed() const;
};

/// Parses, validates, executes and writes outputs. Nothing is written unless
/// the whole run completes; validation failures leave no files behind.
RunReport run_config(const std::filesystem::path& path, const RunOptions& options = {});

/// Same with in-memory config text; `label` names the output subdirectory.
RunReport run_config_text(const std::string& text, const std::string& label, const RunOptions& options = {});

}  // namespace bohm
