#include "bohm/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "bohm/error.hpp"
#include "scenario_config.hpp"

namespace bohm {
namespace scenario {
namespace {

constexpr const char* kSchema = "bohmlab-scenario/1";

const std::vector<std::string> kEulerianBlocks{"grid", "solver", "trajectory"};

std::vector<Entry> build_entries() {
  std::vector<Entry> e;
  e.push_back({{"free_gaussian",
                "Spreading free packet: width law, norm drift, equivariance, Newton-form residual.",
                "A Gaussian packet evolves under V = 0 with the split-step solver. The run checks the\n"
                "closed-form width sigma^2(t) = sigma0^2 + (hbar t / 2 m sigma0)^2, the norm drift over\n"
                "drift_steps solver steps, the total-variation distance between the guided ensemble and\n"
                "|psi_t|^2 at every snapshot, the closed-form trajectories, and the residual of the\n"
                "second-order law m Q'' = -grad(V + V_qu) along newton_trajectories members at\n"
                "newton_dt and newton_dt / 2.",
                kEulerianBlocks,
                R"({"center": 0.0, "sigma0": 1.0, "wavevector": 0.0, "mass": 1.0,
                    "newton_trajectories": 100, "newton_dt": 0.001, "drift_steps": 10000,
                    "oracle_trajectories": 1000})"},
               run_free_gaussian, 1});
  e.push_back({{"boosted_gaussian",
                "Moving packet: initial velocity, and guidance versus second-order integration.",
                "A Gaussian packet with mean momentum hbar k drifts across the box. Trajectories are\n"
                "compared with the closed form. The second-order law is integrated from (Q0, v(Q0)) and\n"
                "must track the guided trajectory and keep dQ/dt = v along the way; starting it from\n"
                "perturbation * v(Q0) instead must visibly leave the guided path.",
                kEulerianBlocks,
                R"({"center": -4.0, "sigma0": 1.0, "wavevector": 2.0, "mass": 1.0,
                    "newton_trajectories": 20, "newton_dt": 0.001, "perturbation": 1.1,
                    "oracle_trajectories": 1000})"},
               run_boosted_gaussian, 1});
  e.push_back({{"harmonic",
                "Oscillator ground state and breathing packet: stationarity, R/S residuals, splitting order.",
                "The ground state of V = m omega^2 x^2 / 2 is stationary: V + V_qu equals hbar omega / 2\n"
                "on the unmasked lattice, the quantum force cancels the classical one, trajectories stand\n"
                "still, and the continuity and Hamilton-Jacobi residuals of the real R/S pair vanish.\n"
                "A separate breathing packet (width breathing_sigma0 on its own grid) measures the\n"
                "error ratio of the split-step solver under dt halving against the closed form.",
                kEulerianBlocks,
                R"({"omega": 1.0, "mass": 1.0, "breathing_extent": 24.0, "breathing_points": 256,
                    "breathing_sigma0": 0.5, "breathing_time": 1.0, "breathing_dt": 0.01})"},
               run_harmonic, 1});
  e.push_back({{"two_gaussian_interference",
                "Two colliding packets: ensemble stays |psi_t|^2-distributed through the fringes.",
                "Packets at -separation/2 and +separation/2 move toward each other and interfere.\n"
                "An ensemble drawn from |psi_0|^2 is guided through the collision and its marginal\n"
                "total-variation distance from |psi_t|^2 is recorded at every snapshot. A control\n"
                "ensemble started uniformly over the packet support must stay far from |psi_t|^2.\n"
                "One-dimensional trajectories may not cross.",
                kEulerianBlocks,
                R"({"separation": 6.0, "sigma": 0.7, "wavevector": 3.0, "mass": 1.0,
                    "control_halfwidth": 6.0})"},
               run_two_gaussian_interference, 1});
  e.push_back({{"ring_state",
                "Angular-momentum states on a ring: phase jumps, winding numbers, stationarity.",
                "psi = exp(i m x) / sqrt(L) on a periodic lattice of length L = 2 pi. Unwrapping the\n"
                "phase S = hbar arg psi from an anchor leaves a single branch jump on the seam, and\n"
                "the jump must be an integer multiple of 2 pi hbar: S itself is multivalued, only\n"
                "psi is single-valued. The loop sum of wrapped phase differences around the ring gives\n"
                "the winding number m. The state is stationary, so the continuity and Hamilton-Jacobi\n"
                "residuals of the R/S pair must vanish, with energy hbar^2 m^2 / 2 mass.",
                {"grid", "solver"},
                R"({"windings": [-1, 1, 2], "mass": 1.0})"},
               run_ring_state, 1});
  e.push_back({{"stern_gerlach",
                "Spin-1/2 packet in a field gradient: Born up-fractions from trajectory positions.",
                "A spinor (cos(theta/2), sin(theta/2)) times a Gaussian enters B_z = gradient * z.\n"
                "The Pauli step splits the packet into two branches. The up result is read off the\n"
                "final position of each trajectory (z > 0), so the only random variable is the\n"
                "configuration. The up-fraction must lie within three binomial standard deviations of\n"
                "cos^2(theta/2).",
                kEulerianBlocks,
                R"({"theta_degrees": [90.0, 120.0], "gradient": 2.0, "moment": 1.0, "sigma": 1.0,
                    "mass": 1.0})"},
               run_stern_gerlach, 1});
  e.push_back({{"pointer_measurement",
                "Object plus pointer: Born frequencies from pointer positions, and POVM algebra.",
                "The object (mass object_mass) is in a superposition of two packets at\n"
                "-object_separation/2 and +object_separation/2. The interaction -coupling tanh(x/w) y\n"
                "kicks the pointer up or down according to the object branch. Sector 0 is y > 0.\n"
                "For each weight |c0|^2 the empirical sector frequency must be within three binomial\n"
                "standard deviations. The finite-dimensional suite checks completeness, positivity,\n"
                "Hermiticity and Born agreement of POVMs for random measurement models, and that the\n"
                "CNOT model is projective.",
                kEulerianBlocks,
                R"({"object_mass": 10.0, "object_sigma": 0.6, "object_separation": 6.0,
                    "pointer_mass": 1.0, "pointer_sigma": 1.0, "coupling": 2.5, "coupling_width": 0.5,
                    "weights": [0.5, 0.8, 1.0], "povm_models": 25, "povm_states": 100,
                    "povm_max_dim": 64})"},
               run_pointer_measurement, 2});
  e.push_back({{"two_fermion",
                "Antisymmetric two-particle state: exchange symmetry, flow equivariance, exclusion.",
                "Two one-dimensional particles in an antisymmetrised pair of packets. The velocity\n"
                "field must be exchange symmetric, the flow must commute with the swap, the two\n"
                "coordinates never meet, and unordered configurations canonicalise consistently.",
                kEulerianBlocks,
                R"({"separation": 5.0, "sigma": 1.0, "wavevector": 1.5, "mass": 1.0,
                    "canonical_trials": 200})"},
               run_two_fermion, 2});
  e.push_back({{"two_boson",
                "Symmetric two-particle state: exchange symmetry and flow equivariance.",
                "Bosonic counterpart of two_fermion with the symmetrised pair of packets.",
                kEulerianBlocks,
                R"({"separation": 5.0, "sigma": 1.0, "wavevector": 1.5, "mass": 1.0,
                    "canonical_trials": 200})"},
               run_two_boson, 2});
  e.push_back({{"qtm_free_gaussian",
                "Lagrangian quantum-trajectory method against the Eulerian solution.",
                "An ensemble with guidance-law velocities is moved by the quantum force computed\n"
                "from its own kernel density estimate. At T the reconstructed modulus and the\n"
                "gauge-aligned wave function are compared with the split-step solution, and the\n"
                "endpoint error against closed-form trajectories is tabulated on a refinement\n"
                "lattice of ensemble sizes and time steps.",
                {"grid", "solver", "qtm"},
                R"({"center": 0.0, "sigma0": 1.0, "wavevector": 1.0, "mass": 1.0,
                    "refinement_n": [1000, 4000, 16000], "refinement_dt": [0.02, 0.01, 0.005],
                    "refinement_seeds": 4})"},
               run_qtm_free_gaussian, 1});
  return e;
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorKind::validation, field + ": " + why);
}

// Reads one JSON object, remembering which keys were consumed.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) invalid(where_, "must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const char* key, std::optional<double> def = std::nullopt) {
    const json* v = raw(key);
    if (!v) return need(key, def);
    if (!v->is_number()) invalid(path(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) invalid(path(key), "must be finite");
    return x;
  }

  double positive(const char* key, std::optional<double> def = std::nullopt) {
    const double x = number(key, def);
    if (!(x > 0.0)) invalid(path(key), "must be > 0");
    return x;
  }

  long integer(const char* key, std::optional<long> def = std::nullopt, long lo = 1) {
    const json* v = raw(key);
    long x = 0;
    if (!v) {
      if (!def) invalid(path(key), "missing");
      x = *def;
    } else {
      if (!v->is_number_integer()) invalid(path(key), "expected an integer");
      x = v->get<long>();
    }
    if (x < lo) invalid(path(key), "must be >= " + std::to_string(lo));
    return x;
  }

  bool flag(const char* key, bool def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_boolean()) invalid(path(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const char* key, std::optional<std::string> def = std::nullopt) {
    const json* v = raw(key);
    if (!v) {
      if (!def) invalid(path(key), "missing");
      return *def;
    }
    if (!v->is_string()) invalid(path(key), "expected a string");
    return v->get<std::string>();
  }

  std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(path(it.key().c_str()), "unknown key");
    }
  }

 private:
  double need(const char* key, std::optional<double> def) const {
    if (!def) invalid(path(key), "missing");
    return *def;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class E>
E parse_enum(Fields& f, const char* key, E def, E (*from)(std::string_view), std::string_view (*name)(E)) {
  const std::string s = f.text(key, std::string(name(def)));
  try {
    return from(s);
  } catch (const Error&) {
    invalid(f.path(key), "unrecognised value '" + s + "'");
  }
}

GridBlock parse_grid(const json& j, int dimension) {
  Fields f(j, "grid");
  GridBlock g;
  const json* pts = f.raw("points");
  const json* ext = f.raw("extent");
  if (!pts) invalid("grid.points", "missing");
  if (!ext) invalid("grid.extent", "missing");
  if (!pts->is_array() || pts->size() != static_cast<std::size_t>(dimension)) {
    invalid("grid.points", "expected an array of " + std::to_string(dimension) + " integers");
  }
  if (!ext->is_array() || ext->size() != static_cast<std::size_t>(dimension)) {
    invalid("grid.extent", "expected an array of " + std::to_string(dimension) + " numbers");
  }
  for (const auto& p : *pts) {
    if (!p.is_number_integer() || p.get<long>() < 4 || p.get<long>() > (1 << 16)) {
      invalid("grid.points", "entries must be integers in [4, 65536]");
    }
    g.points.push_back(p.get<int>());
  }
  for (const auto& x : *ext) {
    if (!x.is_number() || !(x.get<double>() > 0.0) || !std::isfinite(x.get<double>())) {
      invalid("grid.extent", "entries must be positive numbers");
    }
    g.extent.push_back(x.get<double>());
  }
  g.boundary = parse_enum<Boundary>(f, "boundary", Boundary::periodic, boundary_from_string,
                                    static_cast<std::string_view (*)(Boundary)>(to_string));
  f.finish();
  return g;
}

SolverBlock parse_solver(const json& j) {
  Fields f(j, "solver");
  SolverBlock s;
  s.method = parse_enum<Method>(f, "method", Method::split_spectral, method_from_string,
                                static_cast<std::string_view (*)(Method)>(to_string));
  s.dt = f.positive("dt");
  s.total_time = f.positive("T");
  s.snapshot_stride = static_cast<int>(f.integer("snapshot_stride", 1));
  const double steps = s.total_time / s.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    invalid("solver.T", "must be an integer multiple of solver.dt");
  }
  f.finish();
  return s;
}

TrajectoryBlock parse_trajectory(const json& j) {
  Fields f(j, "trajectory");
  TrajectoryBlock t;
  t.n = static_cast<std::size_t>(f.integer("n"));
  t.dt_traj = f.positive("dt_traj");
  t.output_stride = static_cast<int>(f.integer("output_stride", 1));
  t.interpolation = parse_enum<Interpolation>(f, "interpolation", Interpolation::trilinear,
                                              interpolation_from_string,
                                              static_cast<std::string_view (*)(Interpolation)>(to_string));
  t.node_epsilon = f.positive("node_epsilon", kDefaultNodeEpsilon);
  if (t.node_epsilon >= 1.0) invalid("trajectory.node_epsilon", "must be < 1");
  f.finish();
  return t;
}

QtmBlock parse_qtm(const json& j) {
  Fields f(j, "qtm");
  QtmBlock q;
  q.n = static_cast<std::size_t>(f.integer("n", std::nullopt, 2));
  q.dt = f.positive("dt");
  q.total_time = f.positive("T");
  q.bandwidth_scale = f.positive("bandwidth_scale", 1.0);
  q.variance_preserving = f.flag("variance_preserving", true);
  q.kernel_cutoff = f.positive("kernel_cutoff", 8.0);
  q.density_floor = f.positive("density_floor", 1e-6);
  q.force_cap = f.positive("force_cap", 1e3);
  q.reconstruct_floor = f.positive("reconstruct_floor", 1e-6);
  q.neighbours = static_cast<int>(f.integer("neighbours", 8));
  f.finish();
  return q;
}

OutputBlock parse_output(const json& j) {
  Fields f(j, "output");
  OutputBlock o;
  if (f.has("directory")) o.directory = f.text("directory");
  if (const json* fm = f.raw("formats")) {
    if (!fm->is_array()) invalid("output.formats", "expected an array of strings");
    o.csv = o.json = o.dump = false;
    for (const auto& x : *fm) {
      const std::string s = x.is_string() ? x.get<std::string>() : std::string();
      if (s == "csv") {
        o.csv = true;
      } else if (s == "json") {
        o.json = true;
      } else if (s == "dump") {
        o.dump = true;
      } else {
        invalid("output.formats", "entries must be \"csv\", \"json\" or \"dump\"");
      }
    }
  }
  o.csv_trajectories = static_cast<std::size_t>(f.integer("csv_trajectories", 200, 0));
  f.finish();
  return o;
}

// Each supplied parameter must exist in the defaults and share its JSON type.
json merge_params(const json& defaults, const json* given) {
  json out = defaults;
  if (!given) return out;
  if (!given->is_object()) invalid("params", "must be an object");
  for (auto it = given->begin(); it != given->end(); ++it) {
    const std::string field = "params." + it.key();
    if (!defaults.contains(it.key())) invalid(field, "unknown key");
    const json& def = defaults[it.key()];
    const json& v = it.value();
    if (def.is_number_integer()) {
      if (!v.is_number_integer() || v.get<long>() < 1) invalid(field, "expected a positive integer");
    } else if (def.is_number()) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) invalid(field, "expected a number");
    } else if (def.is_array()) {
      if (!v.is_array() || v.empty()) invalid(field, "expected a non-empty array of numbers");
      for (const auto& x : v) {
        if (!x.is_number()) invalid(field, "expected a non-empty array of numbers");
      }
    }
    out[it.key()] = v;
  }
  return out;
}

const Entry& entry_for(std::string_view name) {
  for (const auto& e : entries()) {
    if (e.info.name == name) return e;
  }
  std::string valid;
  for (const auto& e : entries()) valid += (valid.empty() ? "" : ", ") + e.info.name;
  fail(ErrorKind::validation, "unknown scenario '" + std::string(name) + "'; valid names: " + valid);
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Strict runs share one process-wide handler; the count keeps concurrent jobs
// from resetting it under each other.
struct HandlerGuard {
  explicit HandlerGuard(bool strict) : active(strict) {
    if (!active) return;
    std::lock_guard lock(mutex());
    if (depth()++ == 0) {
      set_warning_handler([](std::string_view m) { fail(ErrorKind::accuracy, "strict mode: " + std::string(m)); });
    }
  }
  ~HandlerGuard() {
    if (!active) return;
    std::lock_guard lock(mutex());
    if (--depth() == 0) set_warning_handler(nullptr);
  }
  HandlerGuard(const HandlerGuard&) = delete;
  HandlerGuard& operator=(const HandlerGuard&) = delete;

  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
  static int& depth() {
    static int d = 0;
    return d;
  }
  bool active;
};

json check_json(const Check& c) {
  json j;
  j["name"] = c.name;
  j["value"] = c.value;
  if (c.relation == "in") {
    j["threshold"] = json::array({c.threshold, c.upper});
  } else {
    j["threshold"] = c.threshold;
  }
  j["relation"] = c.relation;
  j["passed"] = c.passed;
  return j;
}

}  // namespace

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = build_entries();
  return e;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::validation, std::string("config: not valid JSON (") + e.what() + ")");
  }
  Fields top(j, "");
  Config c;
  const std::string schema = top.text("schema");
  if (schema != kSchema) invalid("schema", "expected \"" + std::string(kSchema) + "\"");
  c.scenario = top.text("scenario");
  const Entry& e = entry_for(c.scenario);
  const json* seed = top.raw("seed");
  if (!seed) invalid("seed", "missing (every config must fix its seed)");
  if (!seed->is_number_unsigned()) invalid("seed", "expected a non-negative integer");
  c.seed = seed->get<std::uint64_t>();
  top.text("description", std::string());

  const std::set<std::string> needed(e.info.blocks.begin(), e.info.blocks.end());
  for (const char* block : {"grid", "solver", "trajectory", "qtm"}) {
    const bool want = needed.count(block) > 0;
    const json* b = top.raw(block);
    if (want && !b) invalid(block, "required by scenario " + c.scenario);
    if (!want && b) invalid(block, "not used by scenario " + c.scenario);
  }
  if (const json* b = top.raw("grid")) c.grid = parse_grid(*b, e.dimension);
  if (const json* b = top.raw("solver")) c.solver = parse_solver(*b);
  if (const json* b = top.raw("trajectory")) c.trajectory = parse_trajectory(*b);
  if (const json* b = top.raw("qtm")) c.qtm = parse_qtm(*b);
  if (const json* b = top.raw("output")) c.output = parse_output(*b);
  c.params = merge_params(json::parse(e.info.params_json), top.raw("params"));
  top.finish();

  if (c.grid && c.solver && c.solver->method == Method::split_spectral) {
    for (int p : c.grid->points) {
      if (!power_of_two(p)) invalid("grid.points", "split_spectral needs power-of-two axis lengths");
    }
  }
  if (c.solver && c.trajectory) {
    const double interval = c.solver->dt * c.solver->snapshot_stride;
    if (c.trajectory->dt_traj > interval * (1.0 + 1e-12)) {
      invalid("trajectory.dt_traj", "must not exceed the snapshot interval solver.dt * solver.snapshot_stride");
    }
    const double steps = c.solver->total_time / c.trajectory->dt_traj;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      invalid("trajectory.dt_traj", "must divide solver.T");
    }
  }
  if (c.qtm) {
    const double steps = c.qtm->total_time / c.qtm->dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      invalid("qtm.T", "must be an integer multiple of qtm.dt");
    }
  }
  return c;
}

void Bundle::text(const std::string& name, std::string content) {
  entries_.push_back({name, std::move(content), {}, {name}});
}

void Bundle::json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

void Bundle::deferred(const std::string& name, std::function<void(const std::filesystem::path&)> writer,
                      std::vector<std::string> produces) {
  entries_.push_back({name, {}, std::move(writer), std::move(produces)});
}

std::vector<std::string> Bundle::commit(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> files;
  for (const auto& e : entries_) {
    if (e.writer) {
      e.writer(dir / e.name);
    } else {
      std::ofstream os(dir / e.name, std::ios::binary);
      os << e.content;
      if (!os) fail(ErrorKind::io, "cannot write " + (dir / e.name).string());
    }
    files.insert(files.end(), e.produces.begin(), e.produces.end());
  }
  return files;
}

namespace {
void record(Context& ctx, const std::string& name, double value, double lo, double hi, const char* rel, bool ok) {
  ctx.checks.push_back({name, value, lo, hi, rel, ok && !std::isnan(value)});
}
}  // namespace

void Context::below(const std::string& name, double value, double bound) {
  record(*this, name, value, bound, 0.0, "<", value < bound);
}
void Context::at_most(const std::string& name, double value, double bound) {
  record(*this, name, value, bound, 0.0, "<=", value <= bound);
}
void Context::above(const std::string& name, double value, double bound) {
  record(*this, name, value, bound, 0.0, ">", value > bound);
}
void Context::at_least(const std::string& name, double value, double bound) {
  record(*this, name, value, bound, 0.0, ">=", value >= bound);
}
void Context::equal(const std::string& name, double value, double expected) {
  record(*this, name, value, expected, 0.0, "==", value == expected);
}
void Context::within(const std::string& name, double value, double lo, double hi) {
  record(*this, name, value, lo, hi, "in", value >= lo && value <= hi);
}

double Context::num(const char* key) const { return cfg.params.at(key).get<double>(); }
long Context::integer(const char* key) const { return cfg.params.at(key).get<long>(); }
std::vector<double> Context::nums(const char* key) const {
  return cfg.params.at(key).get<std::vector<double>>();
}

}  // namespace scenario

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> v;
    for (const auto& e : scenario::entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ScenarioInfo& describe_scenario(std::string_view name) { return scenario::entry_for(name).info; }

std::string registry_json() {
  scenario::json arr = scenario::json::array();
  for (const auto& e : scenario::entries()) {
    scenario::json j;
    j["name"] = e.info.name;
    j["summary"] = e.info.summary;
    j["blocks"] = e.info.blocks;
    j["params"] = scenario::json::parse(e.info.params_json);
    arr.push_back(j);
  }
  return arr.dump(2);
}

bool RunReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

RunReport run_config_text(const std::string& text, const std::string& label, const RunOptions& options) {
  using namespace scenario;
  const Config cfg = parse_config(text);
  const Entry& entry = entry_for(cfg.scenario);

  std::filesystem::path dir;
  if (options.out) {
    dir = *options.out / label;
  } else if (cfg.output.directory) {
    dir = *cfg.output.directory;
  } else {
    dir = std::filesystem::path("runs") / label;
  }

  HandlerGuard guard(options.strict);
  Context ctx{cfg, options.seed.value_or(cfg.seed), options.threads, options.strict, {}, json::object(), {}};
  entry.run(ctx);

  RunReport report;
  report.scenario = cfg.scenario;
  report.label = label;
  report.seed = ctx.seed;
  report.directory = dir;
  report.checks = ctx.checks;

  json summary;
  summary["schema"] = "bohmlab-summary/1";
  summary["scenario"] = cfg.scenario;
  summary["label"] = label;
  summary["seed"] = ctx.seed;
  summary["passed"] = report.passed();
  summary["checks"] = json::array();
  for (const auto& c : ctx.checks) summary["checks"].push_back(check_json(c));
  ctx.out.json_file("summary.json", summary);
  if (cfg.output.json) ctx.out.json_file("metrics.json", ctx.metrics);

  report.files = ctx.out.commit(dir);
  return report;
}

RunReport run_config(const std::filesystem::path& path, const RunOptions& options) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return run_config_text(ss.str(), path.stem().string(), options);
}

}  // namespace bohm
