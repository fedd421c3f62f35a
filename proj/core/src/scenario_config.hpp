#pragma once

// Internal to the scenario layer: parsed config blocks, the in-memory output
// bundle and the per-run context handed to each scenario.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bohm/eulerian.hpp"
#include "bohm/guidance.hpp"
#include "bohm/scenario.hpp"

namespace bohm::scenario {

using json = nlohmann::ordered_json;

struct GridBlock {
  std::vector<int> points;
  std::vector<double> extent;
  Boundary boundary = Boundary::periodic;
};

struct SolverBlock {
  Method method = Method::split_spectral;
  double dt = 1e-3;
  double total_time = 1.0;
  int snapshot_stride = 1;
};

struct TrajectoryBlock {
  std::size_t n = 1000;
  double dt_traj = 1e-2;
  int output_stride = 1;
  Interpolation interpolation = Interpolation::trilinear;
  double node_epsilon = kDefaultNodeEpsilon;
};

struct QtmBlock {
  std::size_t n = 4000;
  double dt = 1e-2;
  double total_time = 0.5;
  double bandwidth_scale = 1.0;
  bool variance_preserving = true;
  double kernel_cutoff = 8.0;
  double density_floor = 1e-6;
  double force_cap = 1e3;
  double reconstruct_floor = 1e-6;
  int neighbours = 8;
};

struct OutputBlock {
  std::optional<std::string> directory;
  bool csv = true;
  bool json = true;
  bool dump = true;
  std::size_t csv_trajectories = 200;
};

struct Config {
  std::string scenario;
  std::uint64_t seed = 0;
  std::optional<GridBlock> grid;
  std::optional<SolverBlock> solver;
  std::optional<TrajectoryBlock> trajectory;
  std::optional<QtmBlock> qtm;
  OutputBlock output;
  json params;  // defaults merged in
};

/// Throws ErrorKind::validation naming the offending field.
Config parse_config(const std::string& text);

/// Output files held in memory until the run has finished.
class Bundle {
 public:
  void text(const std::string& name, std::string content);
  void json_file(const std::string& name, const json& j);
  /// Deferred writer for binary dumps; it receives the target path stem.
  void deferred(const std::string& name, std::function<void(const std::filesystem::path&)> writer,
                std::vector<std::string> produces);

  /// Creates `dir` and writes everything; returns the relative file names.
  std::vector<std::string> commit(const std::filesystem::path& dir) const;

 private:
  struct Entry {
    std::string name;
    std::string content;
    std::function<void(const std::filesystem::path&)> writer;
    std::vector<std::string> produces;
  };
  std::vector<Entry> entries_;
};

struct Context {
  const Config& cfg;
  std::uint64_t seed;
  int threads;
  bool strict;
  std::vector<Check> checks;
  json metrics = json::object();
  Bundle out;

  // every check records value and bound; a NaN value never passes
  void below(const std::string& name, double value, double bound);
  void at_most(const std::string& name, double value, double bound);
  void above(const std::string& name, double value, double bound);
  void at_least(const std::string& name, double value, double bound);
  void equal(const std::string& name, double value, double expected);
  void within(const std::string& name, double value, double lo, double hi);

  double num(const char* key) const;
  long integer(const char* key) const;
  std::vector<double> nums(const char* key) const;

  const GridBlock& grid() const { return *cfg.grid; }
  const SolverBlock& solver() const { return *cfg.solver; }
  const TrajectoryBlock& trajectory() const { return *cfg.trajectory; }
  const QtmBlock& qtm() const { return *cfg.qtm; }
};

using Runner = void (*)(Context&);

struct Entry {
  ScenarioInfo info;
  Runner run;
  int dimension;  // configuration dimension the grid block must have; 0 if no grid
};

const std::vector<Entry>& entries();

// scenario bodies, defined in scenario_runs.cpp
void run_free_gaussian(Context& ctx);
void run_boosted_gaussian(Context& ctx);
void run_harmonic(Context& ctx);
void run_two_gaussian_interference(Context& ctx);
void run_ring_state(Context& ctx);
void run_stern_gerlach(Context& ctx);
void run_pointer_measurement(Context& ctx);
void run_two_fermion(Context& ctx);
void run_two_boson(Context& ctx);
void run_qtm_free_gaussian(Context& ctx);

/// %.17g, the format every CSV number goes through.
std::string fmt(double x);

}  // namespace bohm::scenario
