#include "nemaflow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "nemaflow/errors.hpp"

namespace nemaflow {

namespace {

// A mapping node whose keys are consumed one by one; finish() rejects the
// keys nobody asked for.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(path_, node_, "expected a mapping");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return node_ && node_.IsMap() && node_[key];
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(qualified(key), v, "malformed value");
    }
  }

  void get_vec3(const std::string& key, Vec3& out) {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (!v.IsSequence() || v.size() != 3) fail(qualified(key), v, "expected three numbers");
    try {
      out = Vec3{v[0].as<double>(), v[1].as<double>(), v[2].as<double>()};
    } catch (const YAML::Exception&) {
      fail(qualified(key), v, "expected three numbers");
    }
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (!v.IsSequence()) fail(qualified(key), v, "expected a list");
    out.clear();
    try {
      for (const auto& item : v) out.push_back(item.as<T>());
    } catch (const YAML::Exception&) {
      fail(qualified(key), v, "malformed list entry");
    }
  }

  Section child(const std::string& key) {
    used_.insert(key);
    return Section(node_ && node_.IsMap() ? node_[key] : YAML::Node(), qualified(key));
  }

  // Key/value pairs of a free-form map (thresholds).
  std::map<std::string, std::pair<double, int>> numbers() {
    std::map<std::string, std::pair<double, int>> out;
    if (!node_ || node_.IsNull()) return out;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      try {
        out[key] = {kv.second.as<double>(), kv.first.Mark().line + 1};
      } catch (const YAML::Exception&) {
        fail(qualified(key), kv.second, "expected a number");
      }
    }
    return out;
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigParseError(qualified(key), kv.first.Mark().line + 1, "unknown key");
    }
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  int line(const std::string& key) const { return node_[key].Mark().line + 1; }

  [[noreturn]] static void fail(const std::string& key, const YAML::Node& node, const std::string& what) {
    throw ConfigParseError(key, node.Mark().line + 1, what);
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

void read_shape(Section& s, BumpShape& shape) {
  s.get("width", shape.width);
  if (s.has("center")) {
    Vec3 c{};
    s.get_vec3("center", c);
    shape.center = c;
  }
}

DecoupleMode parse_decouple(const std::string& name, int line) {
  if (name == "full") return DecoupleMode::full;
  if (name == "director_only") return DecoupleMode::director_only;
  if (name == "fluid_only") return DecoupleMode::fluid_only;
  throw ConfigParseError("solver.decouple", line, "expected full, director_only or fluid_only");
}

std::string decouple_name(DecoupleMode m) {
  switch (m) {
    case DecoupleMode::full:
      return "full";
    case DecoupleMode::director_only:
      return "director_only";
    case DecoupleMode::fluid_only:
      return "fluid_only";
  }
  return "full";
}

void check_choice(Section& s, const std::string& key, const std::string& value, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (value == o) return;
  }
  std::string list;
  for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
  throw ConfigParseError(s.qualified(key), s.has(key) ? s.line(key) : 0, "expected one of " + list);
}

ExperimentSpec parse_node(const YAML::Node& root) {
  ExperimentSpec spec;
  Section top(root, "");

  Section grid = top.child("grid");
  grid.get("n", spec.solver.n);
  grid.get("box_length", spec.solver.box_length);
  grid.finish();

  Section solver = top.child("solver");
  solver.get("epsilon", spec.solver.epsilon);
  solver.get("dt", spec.solver.dt);
  solver.get("t_end", spec.solver.t_end);
  solver.get("renormalize_every", spec.solver.renormalize_every);
  if (solver.has("decouple")) {
    std::string mode;
    solver.get("decouple", mode);
    spec.solver.decouple = parse_decouple(mode, solver.line("decouple"));
  }
  solver.get("rho_tolerance", spec.solver.rho_tolerance);
  solver.get("pressure_tolerance", spec.solver.pressure_tolerance);
  solver.get("pressure_max_iterations", spec.solver.pressure_max_iterations);
  solver.finish();

  Section init = top.child("initial_data");
  init.get("mollify_epsilon", spec.initial.mollify_epsilon);
  {
    Section s = init.child("density");
    auto& d = spec.initial.density;
    s.get("mode", d.mode);
    check_choice(s, "mode", d.mode, {"random_modes", "bump", "constant"});
    s.get("lower", d.lower);
    s.get("upper", d.upper);
    s.get("max_mode", d.max_mode);
    if (s.has("peak")) {
      double p = 0;
      s.get("peak", p);
      d.peak = p;
    }
    read_shape(s, d.shape);
    s.finish();
  }
  {
    Section s = init.child("velocity");
    auto& v = spec.initial.velocity;
    s.get("mode", v.mode);
    check_choice(s, "mode", v.mode, {"random_modes", "taylor_green", "random_bump", "zero"});
    s.get("amplitude", v.amplitude);
    s.get("max_mode", v.max_mode);
    read_shape(s, v.shape);
    s.finish();
  }
  {
    Section s = init.child("director");
    auto& d = spec.initial.director;
    s.get("mode", d.mode);
    check_choice(s, "mode", d.mode, {"random_modes", "tilt", "constant"});
    s.get_vec3("d_star", d.d_star);
    s.get("amplitude", d.amplitude);
    s.get("max_mode", d.max_mode);
    s.get_vec3("axis", d.axis);
    s.get("angle", d.angle);
    read_shape(s, d.shape);
    s.finish();
  }
  init.finish();

  Section out = top.child("output");
  std::string dir = spec.output.directory.string();
  out.get("directory", dir);
  spec.output.directory = dir;
  out.get("snapshot_every", spec.output.snapshot_every);
  out.get("plots", spec.output.plots);
  out.finish();

  Section ex = top.child("experiment");
  if (ex.has("kind")) {
    std::string kind;
    ex.get("kind", kind);
    try {
      spec.kind = parse_experiment_kind(kind);
    } catch (const ConfigurationError& e) {
      throw ConfigParseError("experiment.kind", ex.line("kind"), e.what());
    }
  }
  ex.get_list("epsilons", spec.epsilons);
  ex.get_list("dts", spec.dts);
  ex.get_list("ns", spec.ns);
  ex.get("delta", spec.delta);
  ex.get("seed", spec.seed);
  ex.get("oracle", spec.oracle);
  check_choice(ex, "oracle", spec.oracle, {"tg", "transport", "heatflow", "none"});
  if (ex.has("amplitude")) {
    double a = 0;
    ex.get("amplitude", a);
    spec.oracle_amplitude = a;
  }
  ex.get("reference_epsilon", spec.reference_epsilon);
  ex.get("check_dt_halving", spec.check_dt_halving);
  {
    Section th = ex.child("thresholds");
    for (const auto& [key, value] : th.numbers()) {
      if (!default_thresholds().count(key)) throw ConfigParseError("experiment.thresholds." + key, value.second, "unknown threshold");
      spec.thresholds[key] = value.first;
    }
  }
  ex.finish();

  top.finish();
  return spec;
}

void fnv1a(std::uint64_t& h, const std::string& text) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string vec(const Vec3& v) { return "[" + num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]) + "]"; }

void emit_shape(std::ostringstream& os, const BumpShape& s) {
  os << "    width: " << num(s.width) << '\n';
  if (s.center) os << "    center: " << vec(*s.center) << '\n';
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::oracle_tg:
      return "oracle_tg";
    case ExperimentKind::oracle_transport:
      return "oracle_transport";
    case ExperimentKind::oracle_heatflow:
      return "oracle_heatflow";
    case ExperimentKind::eps_sweep:
      return "eps_sweep";
    case ExperimentKind::refinement:
      return "refinement";
    case ExperimentKind::stability:
      return "stability";
    case ExperimentKind::single_run:
      return "single_run";
  }
  return "single_run";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::oracle_tg, ExperimentKind::oracle_transport, ExperimentKind::oracle_heatflow,
                 ExperimentKind::eps_sweep, ExperimentKind::refinement, ExperimentKind::stability,
                 ExperimentKind::single_run}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigurationError("unknown experiment kind '" + name + "'");
}

const std::map<std::string, double>& default_thresholds() {
  static const std::map<std::string, double> table{
      {"velocity_error", 1e-6},      // oracle_tg
      {"director_deviation", 1e-10},  // oracle_tg
      {"density_error", 1e-9},        // oracle_transport
      {"director_error", 1e-8},       // oracle_heatflow
      {"balance_residual", 1e-3},     // single_run
      {"identity_residual", 1e-8},    // single_run
      {"f_eps_ratio", 2.0},           // eps_sweep
      {"ratio_low", 3.5},             // stability
      {"ratio_high", 4.6},
      {"lambda_drift", 0.1},
      {"order_low", 1.7},  // refinement
      {"order_high", 2.3},
      {"floor_n", 32},
      {"floor_tolerance", 0.05},
  };
  return table;
}

double threshold(const ExperimentSpec& spec, const std::string& name) {
  if (auto it = spec.thresholds.find(name); it != spec.thresholds.end()) return it->second;
  return default_thresholds().at(name);
}

ExperimentSpec parse_spec(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigParseError("<document>", e.mark.line + 1, e.msg);
  }
  return parse_node(root);
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

void validate(const ExperimentSpec& spec) {
  validate(spec.solver);
  const auto& d = spec.initial.density;
  if (!(d.lower > 0.0) || !(d.upper >= d.lower)) throw ConfigurationError("density bounds need 0 < lower <= upper");
  if (d.max_mode < 1 || spec.initial.velocity.max_mode < 1 || spec.initial.director.max_mode < 1)
    throw ConfigurationError("max_mode must be at least 1");
  if (spec.initial.mollify_epsilon < 0.0 || spec.initial.mollify_epsilon >= 1.0)
    throw ConfigurationError("mollify_epsilon must lie in [0, 1)");
  if (spec.output.snapshot_every < 0) throw ConfigurationError("snapshot_every must be non-negative");
  switch (spec.kind) {
    case ExperimentKind::eps_sweep:
      if (spec.epsilons.empty()) throw ConfigurationError("eps_sweep needs a nonempty epsilons list");
      for (std::size_t i = 0; i < spec.epsilons.size(); ++i) {
        if (spec.epsilons[i] < 0.0 || spec.epsilons[i] >= 1.0) throw ConfigurationError("epsilons must lie in [0, 1)");
        if (i > 0 && !(spec.epsilons[i] < spec.epsilons[i - 1]))
          throw ConfigurationError("epsilons must be listed in decreasing order");
      }
      break;
    case ExperimentKind::stability:
      if (!(spec.delta > 0.0)) throw ConfigurationError("stability needs delta > 0");
      break;
    case ExperimentKind::refinement:
      if (spec.dts.empty() && spec.ns.empty()) throw ConfigurationError("refinement needs a dts or ns list");
      if (!spec.dts.empty() && !spec.ns.empty()) throw ConfigurationError("refinement takes either dts or ns, not both");
      if (spec.dts.size() + spec.ns.size() < 3) throw UsageError("refinement needs at least 3 levels");
      for (std::size_t i = 1; i < spec.dts.size(); ++i) {
        if (std::abs(spec.dts[i] - 0.5 * spec.dts[i - 1]) > 1e-12 * spec.dts[i - 1])
          throw ConfigurationError("dts must halve from one level to the next");
      }
      for (std::size_t i = 1; i < spec.ns.size(); ++i) {
        if (spec.ns[i] != 2 * spec.ns[i - 1]) throw ConfigurationError("ns must double from one level to the next");
      }
      break;
    default:
      break;
  }
}

std::string to_yaml(const ExperimentSpec& spec) {
  std::ostringstream os;
  const auto& s = spec.solver;
  os << "grid:\n  n: " << s.n << "\n  box_length: " << num(s.box_length) << '\n';
  os << "solver:\n  epsilon: " << num(s.epsilon) << "\n  dt: " << num(s.dt) << "\n  t_end: " << num(s.t_end)
     << "\n  renormalize_every: " << s.renormalize_every << "\n  decouple: " << decouple_name(s.decouple)
     << "\n  rho_tolerance: " << num(s.rho_tolerance) << "\n  pressure_tolerance: " << num(s.pressure_tolerance)
     << "\n  pressure_max_iterations: " << s.pressure_max_iterations << '\n';
  const auto& in = spec.initial;
  os << "initial_data:\n  mollify_epsilon: " << num(in.mollify_epsilon) << '\n';
  os << "  density:\n    mode: " << in.density.mode << "\n    lower: " << num(in.density.lower)
     << "\n    upper: " << num(in.density.upper) << "\n    max_mode: " << in.density.max_mode << '\n';
  if (in.density.peak) os << "    peak: " << num(*in.density.peak) << '\n';
  emit_shape(os, in.density.shape);
  os << "  velocity:\n    mode: " << in.velocity.mode << "\n    amplitude: " << num(in.velocity.amplitude)
     << "\n    max_mode: " << in.velocity.max_mode << '\n';
  emit_shape(os, in.velocity.shape);
  os << "  director:\n    mode: " << in.director.mode << "\n    d_star: " << vec(in.director.d_star)
     << "\n    amplitude: " << num(in.director.amplitude) << "\n    max_mode: " << in.director.max_mode
     << "\n    axis: " << vec(in.director.axis) << "\n    angle: " << num(in.director.angle) << '\n';
  emit_shape(os, in.director.shape);
  os << "output:\n  directory: \"" << spec.output.directory.string() << "\"\n  snapshot_every: "
     << spec.output.snapshot_every << "\n  plots: " << (spec.output.plots ? "true" : "false") << '\n';
  os << "experiment:\n  kind: " << to_string(spec.kind) << "\n  epsilons: [";
  for (std::size_t i = 0; i < spec.epsilons.size(); ++i) os << (i ? ", " : "") << num(spec.epsilons[i]);
  os << "]\n  dts: [";
  for (std::size_t i = 0; i < spec.dts.size(); ++i) os << (i ? ", " : "") << num(spec.dts[i]);
  os << "]\n  ns: [";
  for (std::size_t i = 0; i < spec.ns.size(); ++i) os << (i ? ", " : "") << spec.ns[i];
  os << "]\n  delta: " << num(spec.delta) << "\n  seed: " << spec.seed << "\n  oracle: " << spec.oracle << '\n';
  if (spec.oracle_amplitude) os << "  amplitude: " << num(*spec.oracle_amplitude) << '\n';
  os << "  reference_epsilon: " << num(spec.reference_epsilon)
     << "\n  check_dt_halving: " << (spec.check_dt_halving ? "true" : "false") << '\n';
  if (!spec.thresholds.empty()) {
    os << "  thresholds:\n";
    for (const auto& [k, v] : spec.thresholds) os << "    " << k << ": " << num(v) << '\n';
  }
  return os.str();
}

std::string config_hash(const ExperimentSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv1a(h, to_yaml(spec));
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int thread_count() {
  const char* env = std::getenv("NEMAFLOW_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigurationError("NEMAFLOW_THREADS must be a positive integer");
  return static_cast<int>(std::min(v, 64L));
}

}  // namespace nemaflow
