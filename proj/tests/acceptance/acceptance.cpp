// Runs every shipped config and prints one PASS/FAIL line per acceptance
// criterion. Each criterion is a set of named checks from the run summaries;
// the last one reruns everything into a second directory and compares bytes.
//
//   acceptance [--out DIR] [--configs DIR] [--threads N]

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bohm/error.hpp"
#include "bohm/scenario.hpp"

#ifndef BOHMLAB_CONFIG_DIR
#define BOHMLAB_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace {

struct Selector {
  std::string config;
  std::string prefix;  // check names starting with this; a trailing '*' is implied
};

struct Criterion {
  int number;
  std::string title;
  std::vector<Selector> checks;
};

const std::vector<Criterion> kCriteria{
    {1, "equivariance through interference",
     {{"two_gaussian_interference", "tv_max"}, {"two_gaussian_interference", "control_tv_min"}}},
    {2, "solver width law, norm drift and splitting order",
     {{"free_gaussian", "width_relative_error_at_T"}, {"free_gaussian", "norm_drift"},
      {"harmonic", "splitting_halving_ratio"}}},
    {3, "second-order law consistency",
     {{"free_gaussian", "newton_residual_max"}, {"free_gaussian", "newton_residual_halving_ratio"},
      {"boosted_gaussian", "newton_tracks_guidance"}, {"boosted_gaussian", "perturbed_start_diverges"}}},
    {4, "Lagrangian QTM reconstruction and refinement",
     {{"qtm_free_gaussian", "modulus_l2_at_T"}, {"qtm_free_gaussian", "wave_l2_gauge_aligned_at_T"},
      {"qtm_free_gaussian", "refinement_monotonicity_violations"}}},
    {5, "phase quantisation and stationary R/S residuals",
     {{"ring_state", "winding_number_"}, {"ring_state", "branch_jump_"}, {"ring_state", "continuity_residual_"},
      {"ring_state", "hamilton_jacobi_residual_"}, {"harmonic", "continuity_residual"},
      {"harmonic", "hamilton_jacobi_residual"}}},
    {6, "Born frequencies from pointer positions", {{"pointer_measurement", "sector0_frequency_"}}},
    {7, "POVM algebra", {{"pointer_measurement", "povm_"}, {"pointer_measurement", "cnot_"}}},
    {8, "Stern-Gerlach up-fractions", {{"stern_gerlach", "up_fraction_"}, {"stern_gerlach", "trajectory_spin_fields"}}},
    {9, "identical particles",
     {{"two_fermion", "velocity_exchange_violation"}, {"two_fermion", "flow_equivariance"},
      {"two_fermion", "min_pair_separation"}, {"two_fermion", "canonicalisation_failures"},
      {"two_boson", "velocity_exchange_violation"}, {"two_boson", "flow_equivariance"},
      {"two_boson", "canonicalisation_failures"}}},
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Run {
  std::optional<bohm::RunReport> report;
  std::string error;
};

std::map<std::string, Run> run_all(const std::vector<fs::path>& configs, const fs::path& out, int threads) {
  std::map<std::string, Run> runs;
  bohm::RunOptions o;
  o.out = out;
  o.threads = threads;
  for (const auto& c : configs) {
    Run r;
    try {
      r.report = bohm::run_config(c, o);
      std::printf("  ran %-28s %s\n", c.stem().string().c_str(), r.report->passed() ? "all checks passed" : "has failing checks");
    } catch (const std::exception& e) {
      r.error = e.what();
      std::printf("  ran %-28s error: %s\n", c.stem().string().c_str(), e.what());
    }
    std::fflush(stdout);
    runs[c.stem().string()] = std::move(r);
  }
  return runs;
}

std::string describe(const bohm::Check& c) {
  char buf[160];
  if (c.relation == "in") {
    std::snprintf(buf, sizeof buf, "%s=%.4g in [%.4g, %.4g]", c.name.c_str(), c.value, c.threshold, c.upper);
  } else {
    std::snprintf(buf, sizeof buf, "%s=%.4g %s %.4g", c.name.c_str(), c.value, c.relation.c_str(), c.threshold);
  }
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_runs";
  fs::path config_dir = BOHMLAB_CONFIG_DIR;
  int threads = 1;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--out")) {
      out = argv[i + 1];
    } else if (!std::strcmp(argv[i], "--configs")) {
      config_dir = argv[i + 1];
    } else if (!std::strcmp(argv[i], "--threads")) {
      threads = std::atoi(argv[i + 1]);
    } else {
      std::fprintf(stderr, "unknown argument %s\n", argv[i]);
      return 2;
    }
  }

  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(config_dir)) {
    if (e.path().extension() == ".json") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  fs::remove_all(out);

  std::printf("first pass into %s\n", (out / "a").string().c_str());
  const auto first = run_all(configs, out / "a", threads);

  int failures = 0;
  std::vector<std::string> lines;
  for (const auto& crit : kCriteria) {
    bool ok = true;
    std::vector<std::string> notes;
    for (const auto& sel : crit.checks) {
      auto it = first.find(sel.config);
      if (it == first.end() || !it->second.report) {
        ok = false;
        notes.push_back(sel.config + ": " + (it == first.end() ? "no config" : it->second.error));
        continue;
      }
      int matched = 0;
      for (const auto& c : it->second.report->checks) {
        if (c.name.rfind(sel.prefix, 0) != 0) continue;
        ++matched;
        if (!c.passed) {
          ok = false;
          notes.push_back(sel.config + ": " + describe(c));
        }
      }
      if (matched == 0) {
        ok = false;
        notes.push_back(sel.config + ": no check named " + sel.prefix);
      }
    }
    std::string line = std::string(ok ? "PASS" : "FAIL") + " criterion " + std::to_string(crit.number) + ": " +
                       crit.title;
    for (const auto& n : notes) line += "\n       " + n;
    lines.push_back(line);
    failures += ok ? 0 : 1;
  }

  std::printf("second pass into %s\n", (out / "b").string().c_str());
  const auto second = run_all(configs, out / "b", threads);
  std::size_t compared = 0;
  std::vector<std::string> diffs;
  for (const auto& [name, run] : first) {
    auto jt = second.find(name);
    if (!run.report || jt == second.end() || !jt->second.report) {
      diffs.push_back(name + ": run did not complete");
      continue;
    }
    for (const auto& f : run.report->files) {
      const auto ext = fs::path(f).extension();
      if (ext != ".csv" && ext != ".json") continue;
      ++compared;
      if (slurp(out / "a" / name / f) != slurp(out / "b" / name / f)) diffs.push_back(name + "/" + f + " differs");
    }
  }
  std::string line10 = std::string(diffs.empty() && compared > 0 ? "PASS" : "FAIL") +
                       " criterion 10: byte-identical CSV/JSON on rerun (" + std::to_string(compared) + " files)";
  for (const auto& d : diffs) line10 += "\n       " + d;
  lines.push_back(line10);
  failures += diffs.empty() && compared > 0 ? 0 : 1;

  std::printf("\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("\n%d of %zu criteria failed\n", failures, kCriteria.size() + 1);
  return failures == 0 ? 0 : 1;
}
