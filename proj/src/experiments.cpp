#include "nemaflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/output.hpp"
#include "nemaflow/spectral.hpp"

namespace nemaflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Grid grid_of(const SolverConfig& c) { return make_grid(c.n, c.box_length); }

bool same_bits(const ScalarField& a, const ScalarField& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(const VectorField& a, const VectorField& b) {
  return same_bits(a[0], b[0]) && same_bits(a[1], b[1]) && same_bits(a[2], b[2]);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string csv(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double max_balance(const std::vector<DiagnosticsRecord>& records) {
  if (records.size() < 3) return kNaN;
  double m = 0.0;
  for (const auto& r : energy_balance_residual(records)) m = std::max(m, r.relative);
  return m;
}

double max_drift(const std::vector<DiagnosticsRecord>& records) {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.unit_drift);
  return m;
}

std::vector<double> log2_ratios(const std::vector<double>& e) {
  std::vector<double> out;
  for (std::size_t i = 1; i < e.size(); ++i) out.push_back(std::log2(e[i - 1] / e[i]));
  return out;
}

InitialData uniform_data(ScalarField rho, VectorField u, VectorField d, const Vec3& d_star) {
  const double lo = rho.min();
  const double hi = rho.max();
  return {std::move(rho), std::move(u), std::move(d), d_star, lo, hi};
}

}  // namespace

InitialData build_initial_data(const ExperimentSpec& spec, const Grid& grid) {
  const auto& in = spec.initial;
  std::mt19937_64 rng(spec.seed);

  const auto& ds = in.density;
  ScalarField rho(grid, ds.lower);
  if (ds.mode == "random_modes" && ds.upper > ds.lower) {
    ScalarField phi = random_trig_field(grid, rng, ds.max_mode);
    phi *= 0.5 * (ds.upper - ds.lower) / max_abs(phi);
    rho = phi;
    rho += 0.5 * (ds.upper + ds.lower);
  } else if (ds.mode == "bump") {
    rho = gen_density(grid, ds.lower, ds.upper, DensityBump{ds.shape, std::nullopt, ds.peak});
  }

  const auto& vs = in.velocity;
  VectorField u(grid);
  if (vs.mode == "random_modes") {
    u = random_solenoidal_field(grid, rng, vs.max_mode, vs.amplitude);
  } else if (vs.mode == "taylor_green") {
    u = gen_velocity(grid, VelocityRecipe{VelocityMode::taylor_green, vs.amplitude, vs.shape, spec.seed});
  } else if (vs.mode == "random_bump") {
    u = gen_velocity(grid, VelocityRecipe{VelocityMode::random_bump, vs.amplitude, vs.shape, spec.seed});
  }

  const auto& dr = in.director;
  const double len = std::sqrt(dot(dr.d_star, dr.d_star));
  if (!(len > 0.0)) throw ConfigurationError("d_star must be nonzero");
  const Vec3 d_star{dr.d_star[0] / len, dr.d_star[1] / len, dr.d_star[2] / len};
  VectorField d(grid, d_star);
  if (dr.mode == "random_modes") {
    d = random_unit_director(grid, rng, dr.max_mode, dr.amplitude);
  } else if (dr.mode == "tilt") {
    d = gen_director(grid, d_star, DirectorTilt{dr.axis, dr.angle, dr.shape});
  }

  InitialData data{std::move(rho), std::move(u), std::move(d), d_star, ds.lower, ds.upper};
  validate(data);
  if (in.mollify_epsilon > 0.0) return mollify_initial_data(data, in.mollify_epsilon).data;
  return data;
}

InitialData standard_smooth_datum(const Grid& grid, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.seed = seed;
  return build_initial_data(spec, grid);
}

OracleResult oracle_taylor_green(const SolverConfig& config, double amplitude, long record_every) {
  const Grid g = grid_of(config);
  const Vec3 e3{0.0, 0.0, 1.0};
  InitialData data{ScalarField(g, 1.0), gen_velocity(g, VelocityRecipe{VelocityMode::taylor_green, amplitude, {}, 0}),
                   VectorField(g, e3), e3, 1.0, 1.0};
  RunOptions opts;
  opts.solver = config;
  opts.record_every = record_every;
  OracleResult res{0.0, 0.0, run(data, opts)};
  const State& s = res.trajectory.final_state;
  const double k2 = std::pow(g.wavenumber_unit(), 2);
  const double rate = 2.0 * k2 + config.epsilon * 4.0 * k2 * k2;
  VectorField exact = data.u0;
  exact *= std::exp(-rate * s.t);
  res.error = max_abs(s.u - exact);
  res.secondary = max_abs(s.d - data.d0);
  return res;
}

OracleResult oracle_transport(const SolverConfig& config, double speed, long record_every) {
  const Grid g = grid_of(config);
  const double k = g.wavenumber_unit();
  auto profile = [k](double shift) {
    return [k, shift](double x, double y, double z) {
      const double xs = x - shift;
      return 1.0 + 0.2 * std::sin(k * xs) + 0.1 * std::cos(2 * k * y) * std::sin(k * z) + 0.05 * std::cos(k * (xs + y));
    };
  };
  const Vec3 e3{0.0, 0.0, 1.0};
  InitialData data = uniform_data(ScalarField::from_function(g, profile(0.0)), VectorField(g, {speed, 0.0, 0.0}),
                                  VectorField(g, e3), e3);
  RunOptions opts;
  opts.solver = config;
  opts.record_every = record_every;
  OracleResult res{0.0, 0.0, run(data, opts)};
  const State& s = res.trajectory.final_state;
  res.error = max_abs(s.rho - ScalarField::from_function(g, profile(speed * s.t)));
  return res;
}

OracleResult oracle_heatflow(const SolverConfig& config, double amplitude, long record_every) {
  const Grid g = grid_of(config);
  const double k = g.wavenumber_unit();
  auto director = [&](double t) {
    return VectorField::from_function(g, [&](double x, double, double) {
      const double th = amplitude * (std::exp(-k * k * t) * std::sin(k * x) + 0.4 * std::exp(-4 * k * k * t) * std::sin(2 * k * x));
      return Vec3{std::cos(th), std::sin(th), 0.0};
    });
  };
  SolverConfig cfg = config;
  cfg.decouple = DecoupleMode::director_only;
  InitialData data{ScalarField(g, 1.0), VectorField(g), director(0.0), Vec3{1.0, 0.0, 0.0}, 1.0, 1.0};
  RunOptions opts;
  opts.solver = cfg;
  opts.record_every = record_every;
  OracleResult res{0.0, 0.0, run(data, opts)};
  const State& s = res.trajectory.final_state;
  res.error = max_abs(s.d - director(s.t));
  return res;
}

SweepTable eps_sweep(const InitialData& data, const SolverConfig& base, const std::vector<double>& epsilons,
                     double reference_epsilon, int threads,
                     const std::function<void(std::size_t, const Trajectory&)>& member_done) {
  if (epsilons.empty()) throw UsageError("eps_sweep needs at least one epsilon");
  SweepTable table;
  table.members.resize(epsilons.size());
  std::vector<std::exception_ptr> errors(epsilons.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < epsilons.size(); i = next++) {
      try {
        SweepMember& m = table.members[i];
        m.epsilon = epsilons[i];
        SolverConfig cfg = base;
        cfg.epsilon = m.epsilon;
        InitialData member = data;
        if (m.epsilon > 0.0) {
          MollifiedData moll = mollify_initial_data(data, m.epsilon);
          member = std::move(moll.data);
          m.mollification_delta = moll.delta;
        }
        RunOptions opts;
        opts.solver = cfg;
        opts.warn = [](const std::string&) {};
        Trajectory tr = run(member, opts);
        m.termination = tr.termination;
        m.message = tr.message;
        for (const auto& r : tr.records) m.f_eps_max = std::max(m.f_eps_max, r.f_eps);
        if (tr.termination == Termination::completed) m.final_state = tr.final_state;
        if (member_done) member_done(i, tr);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(epsilons.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  table.monotone = true;
  for (std::size_t i = 0; i + 1 < table.members.size(); ++i) {
    const auto& a = table.members[i];
    const auto& b = table.members[i + 1];
    SweepPair p{a.epsilon, b.epsilon, kNaN, kNaN};
    if (a.final_state && b.final_state) {
      p.u_distance = lp_norm(a.final_state->u - b.final_state->u, 2.0);
      p.grad_d_distance = sobolev_seminorm(a.final_state->d - b.final_state->d, 1);
    }
    if (!table.pairs.empty()) {
      const auto& q = table.pairs.back();
      if (!(p.u_distance < q.u_distance && p.grad_d_distance < q.grad_d_distance)) table.monotone = false;
    }
    if (std::isnan(p.u_distance)) table.monotone = false;
    table.pairs.push_back(p);
  }

  const SweepMember* ref = nullptr;
  for (const auto& m : table.members) {
    if (std::abs(m.epsilon - reference_epsilon) <= 1e-12 * std::max(1.0, reference_epsilon)) ref = &m;
  }
  if (!ref) {
    for (const auto& m : table.members) {
      if (m.epsilon > 0.0 && (!ref || m.epsilon < ref->epsilon)) ref = &m;
    }
  }
  if (!ref) ref = &table.members.back();
  table.reference_f_eps = ref->f_eps_max;
  double fmax = 0.0;
  for (const auto& m : table.members) {
    fmax = std::max(fmax, m.f_eps_max);
    if (m.termination != Termination::completed) table.any_blow_up = true;
  }
  table.f_eps_ratio = table.reference_f_eps > 0.0 ? fmax / table.reference_f_eps : (fmax > 0.0 ? kNaN : 1.0);
  return table;
}

InitialData perturb(const InitialData& data, double delta, std::uint64_t seed) {
  const Grid& g = data.rho0.grid();
  std::mt19937_64 rng(seed);
  ScalarField psi = random_trig_field(g, rng, 2);
  psi *= 1.0 / max_abs(psi);
  const VectorField v = random_solenoidal_field(g, rng, 2, 1.0);
  const VectorField w = random_solenoidal_field(g, rng, 2, 1.0);
  InitialData out = data;
  out.rho0.add_scaled(delta, psi);
  out.u0.add_scaled(delta, v);
  out.d0.add_scaled(delta, w);
  out.d0 = renormalize_director(out.d0);
  out.rho_lower = std::min(data.rho_lower, out.rho0.min());
  out.rho_upper = std::max(data.rho_upper, out.rho0.max());
  return out;
}

namespace {

struct Lockstep {
  std::vector<double> t, g_delta, g_half, g_zero;
  bool zero_exact = true;
  Termination termination = Termination::completed;
  std::string message;
};

// Members: base, +delta, and optionally +delta/2 and an unperturbed rerun.
Lockstep lockstep(const InitialData& data, const SolverConfig& cfg, double delta, std::uint64_t seed, bool full) {
  std::vector<InitialData> inputs{perturb(data, 0.0, seed), perturb(data, delta, seed)};
  if (full) {
    inputs.push_back(perturb(data, 0.5 * delta, seed));
    inputs.push_back(perturb(data, 0.0, seed));
  }
  double floor = data.rho_lower;
  for (const auto& in : inputs) floor = std::min(floor, in.rho_lower);
  const double nu0 = 1.0 / inputs[0].rho0.min();

  std::vector<State> states;
  std::vector<ImexStepper> steppers;
  for (const auto& in : inputs) {
    validate(in);
    states.push_back(make_state(in));
    steppers.emplace_back(cfg, nu0, floor);
  }

  Lockstep out;
  auto sample = [&] {
    out.t.push_back(states[0].t);
    out.g_delta.push_back(gronwall_quantity(states[0], states[1]));
    if (full) {
      out.g_half.push_back(gronwall_quantity(states[0], states[2]));
      out.g_zero.push_back(gronwall_quantity(states[0], states[3]));
      out.zero_exact = out.zero_exact && same_bits(states[0].rho, states[3].rho) && same_bits(states[0].u, states[3].u) &&
                       same_bits(states[0].d, states[3].d) && out.g_zero.back() == 0.0;
    }
  };
  sample();
  const long steps = step_count(cfg);
  try {
    for (long k = 0; k < steps; ++k) {
      for (std::size_t m = 0; m < states.size(); ++m)
        steppers[m].step(states[m], evaluate_tendencies(states[m], cfg, floor));
      sample();
    }
  } catch (const BlowUpError& e) {
    out.termination = Termination::blow_up;
    out.message = e.what();
  } catch (const StabilityError& e) {
    out.termination = Termination::stability_failure;
    out.message = e.what();
  }
  return out;
}

double growth_rate(const std::vector<double>& t, const std::vector<double>& g) {
  double lambda = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (g[k] > 0.0 && g[0] > 0.0 && t[k] > 0.0) lambda = std::max(lambda, std::log(g[k] / g[0]) / t[k]);
  }
  return lambda;
}

}  // namespace

StabilityResult stability_study(const InitialData& data, const SolverConfig& config, double delta, std::uint64_t seed,
                                bool refit_at_half_dt) {
  if (!(delta > 0.0)) throw ConfigurationError("stability needs delta > 0");
  Lockstep main = lockstep(data, config, delta, seed, true);
  StabilityResult r;
  r.t = main.t;
  r.g_delta = main.g_delta;
  r.g_half = main.g_half;
  r.g_zero = main.g_zero;
  r.zero_exact = main.zero_exact;
  r.termination = main.termination;
  r.message = main.message;
  r.g0 = r.g_delta.front();
  r.g_end = r.g_delta.back();
  r.ratio = r.g_half.back() > 0.0 ? r.g_delta.back() / r.g_half.back() : kNaN;
  r.lambda = growth_rate(r.t, r.g_delta);
  if (refit_at_half_dt && r.termination == Termination::completed) {
    SolverConfig half = config;
    half.dt *= 0.5;
    Lockstep fine = lockstep(data, half, delta, seed, false);
    if (fine.termination == Termination::completed) r.lambda_half_dt = growth_rate(fine.t, fine.g_delta);
  }
  return r;
}

RefinementTable refinement_study(const SolverConfig& base, const std::string& oracle, const std::vector<double>& dts,
                                 const std::vector<int>& ns, std::optional<double> amplitude, double floor_tolerance,
                                 const std::function<InitialData(const Grid&)>& data_for) {
  if (dts.size() + ns.size() < 3 || (!dts.empty() && !ns.empty()))
    throw UsageError("refinement needs at least 3 levels of either dt or n");
  if (oracle == "none" && !data_for) throw UsageError("refinement without an oracle needs initial data");
  RefinementTable table;
  table.temporal = !dts.empty();
  const std::size_t count = table.temporal ? dts.size() : ns.size();
  for (std::size_t i = 0; i < count; ++i) {
    SolverConfig cfg = base;
    if (table.temporal) cfg.dt = dts[i];
    else cfg.n = ns[i];
    RefinementLevel level;
    level.n = cfg.n;
    level.dt = cfg.dt;
    std::optional<Trajectory> tr;
    if (oracle == "tg") {
      auto r = oracle_taylor_green(cfg, amplitude.value_or(1.0), 1);
      level.oracle_error = r.error;
      tr.emplace(std::move(r.trajectory));
    } else if (oracle == "transport") {
      auto r = oracle_transport(cfg, amplitude.value_or(1.0), 1);
      level.oracle_error = r.error;
      tr.emplace(std::move(r.trajectory));
    } else if (oracle == "heatflow") {
      auto r = oracle_heatflow(cfg, amplitude.value_or(0.2), 1);
      level.oracle_error = r.error;
      tr.emplace(std::move(r.trajectory));
    } else if (oracle == "none") {
      RunOptions opts;
      opts.solver = cfg;
      opts.warn = [](const std::string&) {};
      tr.emplace(run(data_for(grid_of(cfg)), opts));
      level.oracle_error = kNaN;
    } else {
      throw ConfigurationError("unknown oracle '" + oracle + "'");
    }
    level.termination = tr->termination;
    level.balance = max_balance(tr->records);
    level.drift = max_drift(tr->records);
    table.levels.push_back(level);
  }
  std::vector<double> e, b, d;
  for (const auto& l : table.levels) {
    e.push_back(l.oracle_error);
    b.push_back(l.balance);
    d.push_back(l.drift);
  }
  table.error_orders = log2_ratios(e);
  table.balance_orders = log2_ratios(b);
  table.drift_orders = log2_ratios(d);
  if (!table.temporal && oracle != "none") {
    const double finest = e.back();
    for (std::size_t i = 0; i < e.size(); ++i) {
      bool settled = true;
      for (std::size_t j = i; j < e.size(); ++j) settled = settled && std::abs(e[j] - finest) <= floor_tolerance * finest + 1e-12;
      if (settled) {
        table.floor_n = table.levels[i].n;
        break;
      }
    }
  }
  return table;
}

// Reports.

bool Report::passed() const {
  return !blow_up && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

int Report::exit_code() const {
  if (blow_up) return 3;
  return passed() ? 0 : 1;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["passed"] = passed();
  j["blow_up"] = blow_up;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json cj{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"bound", c.bound}, {"passed", c.passed}};
    if (c.relation == "in") cj["bound_high"] = c.bound_high;
    j["checks"].push_back(cj);
  }
  j["notes"] = notes;
  j["data"] = data;
  return j;
}

std::string Report::summary() const {
  std::ostringstream os;
  os << kind << " (config " << config_hash << ", nemaflow " << version << ")\n";
  for (const auto& c : checks) {
    os << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << num(c.value) << ' ' << c.relation << ' '
       << num(c.bound);
    if (c.relation == "in") os << ".." << num(c.bound_high);
    os << '\n';
  }
  for (const auto& n : notes) os << "  note: " << n << '\n';
  os << (blow_up ? "BLOW-UP" : (passed() ? "PASS" : "FAIL")) << '\n';
  return os.str();
}

namespace {

Check at_most(const std::string& name, double v, double bound) { return {name, v, "<=", bound, 0.0, v <= bound}; }
Check within(const std::string& name, double v, double lo, double hi) { return {name, v, "in", lo, hi, v >= lo && v <= hi}; }
Check equals(const std::string& name, double v, double want) { return {name, v, "==", want, 0.0, v == want}; }

void say(const ExperimentOptions& o, const std::string& m) {
  if (o.progress) o.progress(m);
}

void write_run_outputs(const std::filesystem::path& dir, const Trajectory& tr, const ExperimentSpec& spec,
                       const Report& report, nlohmann::json extra = nlohmann::json::object()) {
  write_diagnostics_csv(dir / "diagnostics.csv", tr.records);
  if (spec.output.plots && !tr.records.empty()) write_run_plots(dir, tr.records);
  nlohmann::json meta = run_summary(tr);
  meta["config_hash"] = report.config_hash;
  meta["version"] = report.version;
  meta["epsilon"] = spec.solver.epsilon;
  meta["n"] = spec.solver.n;
  meta["dt"] = spec.solver.dt;
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  write_json(dir / "metadata.json", meta);
}

// Energy may rise only by the measured balance residual.
long monotonicity_violations(const std::vector<DiagnosticsRecord>& records, double dt) {
  if (records.size() < 3) return 0;
  const auto res = energy_balance_residual(records);
  long bad = 0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const double slack = 2.0 * dt * std::max(std::abs(res[k].raw), std::abs(res[k - 1].raw)) +
                         1e-14 * std::abs(records[k - 1].energy);
    if (records[k].energy > records[k - 1].energy + slack) ++bad;
  }
  return bad;
}

void single_run(const ExperimentSpec& spec, const ExperimentOptions& opt, Report& report) {
  const Grid g = grid_of(spec.solver);
  const InitialData data = build_initial_data(spec, g);
  RunOptions ro;
  ro.solver = spec.solver;
  if (opt.write_outputs && spec.output.snapshot_every > 0) {
    ro.snapshot_every = spec.output.snapshot_every;
    ro.snapshot_dir = spec.output.directory / "snapshots";
  }
  ro.warn = [&](const std::string& m) { report.notes.push_back(m); };
  const long total = step_count(spec.solver);
  ro.observer = [&](const State& s, const DiagnosticsRecord& r) {
    if (opt.progress && (s.step % std::max(1L, total / 10) == 0))
      say(opt, "step " + std::to_string(s.step) + "/" + std::to_string(total) + "  t=" + num(s.t) + "  E=" + num(r.energy));
  };
  const Trajectory tr = run(data, ro);

  const double balance = max_balance(tr.records);
  double identity = 0.0;
  for (const auto& r : tr.records) {
    for (double v : r.residuals.relative) identity = std::max(identity, v);
  }
  double energy_drift = 0.0;
  for (const auto& r : tr.records) energy_drift = std::max(energy_drift, std::abs(r.energy - tr.records.front().energy));

  if (!std::isnan(balance)) report.checks.push_back(at_most("balance_residual", balance, threshold(spec, "balance_residual")));
  report.checks.push_back(equals("energy_monotone_violations", static_cast<double>(monotonicity_violations(tr.records, spec.solver.dt)), 0.0));
  report.checks.push_back(at_most("identity_residual", identity, threshold(spec, "identity_residual")));
  report.blow_up = tr.termination != Termination::completed;
  if (report.blow_up) report.notes.push_back(tr.message);
  report.data["run"] = run_summary(tr);
  report.data["max_energy_change"] = energy_drift;
  report.data["max_unit_drift"] = max_drift(tr.records);
  report.data["max_identity_residual"] = identity;
  if (!tr.records.empty()) {
    double fmax = 0.0;
    for (const auto& r : tr.records) fmax = std::max(fmax, r.f_eps);
    report.data["f_eps_max"] = fmax;
  }
  if (opt.write_outputs) write_run_outputs(spec.output.directory, tr, spec, report);
}

void oracle_run(const ExperimentSpec& spec, const ExperimentOptions& opt, Report& report) {
  const auto& amp = spec.oracle_amplitude;
  auto compute = [&]() {
    switch (spec.kind) {
      case ExperimentKind::oracle_tg:
        say(opt, "Taylor-Green oracle");
        return oracle_taylor_green(spec.solver, amp.value_or(1.0), 1);
      case ExperimentKind::oracle_transport:
        say(opt, "transport oracle");
        return oracle_transport(spec.solver, amp.value_or(1.0), 1);
      default:
        say(opt, "heat-flow oracle");
        return oracle_heatflow(spec.solver, amp.value_or(0.2), 1);
    }
  };
  const OracleResult r = compute();
  switch (spec.kind) {
    case ExperimentKind::oracle_tg:
      report.checks.push_back(at_most("velocity_error", r.error, threshold(spec, "velocity_error")));
      report.checks.push_back(at_most("director_deviation", r.secondary, threshold(spec, "director_deviation")));
      break;
    case ExperimentKind::oracle_transport:
      report.checks.push_back(at_most("density_error", r.error, threshold(spec, "density_error")));
      break;
    default:
      report.checks.push_back(at_most("director_error", r.error, threshold(spec, "director_error")));
      break;
  }
  report.blow_up = r.trajectory.termination != Termination::completed;
  if (report.blow_up) report.notes.push_back(r.trajectory.message);
  report.data["error"] = r.error;
  report.data["t_end"] = r.trajectory.final_state.t;
  report.data["run"] = run_summary(r.trajectory);
  if (opt.write_outputs) write_run_outputs(spec.output.directory, r.trajectory, spec, report, {{"oracle_error", r.error}});
}

void sweep_run(const ExperimentSpec& spec, const ExperimentOptions& opt, Report& report) {
  ExperimentSpec data_spec = spec;
  if (spec.initial.mollify_epsilon > 0.0) {
    report.notes.push_back("initial_data.mollify_epsilon ignored: each member mollifies with its own epsilon");
    data_spec.initial.mollify_epsilon = 0.0;
  }
  const Grid g = grid_of(spec.solver);
  const InitialData data = build_initial_data(data_spec, g);
  std::mutex io;
  auto done = [&](std::size_t i, const Trajectory& tr) {
    std::lock_guard lock(io);
    const double eps = spec.epsilons[i];
    say(opt, "member eps=" + num(eps) + ": " + to_string(tr.termination));
    if (!opt.write_outputs) return;
    ExperimentSpec member = spec;
    member.solver.epsilon = eps;
    char dir[48];
    std::snprintf(dir, sizeof dir, "member_%02zu", i);
    write_run_outputs(spec.output.directory / dir, tr, member, report);
  };
  const SweepTable table = eps_sweep(data, spec.solver, spec.epsilons, spec.reference_epsilon, thread_count(), done);

  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : table.members) {
    members.push_back({{"epsilon", m.epsilon}, {"termination", to_string(m.termination)}, {"f_eps_max", m.f_eps_max},
                       {"mollification_delta", m.mollification_delta}});
    if (m.termination != Termination::completed) report.notes.push_back("eps=" + num(m.epsilon) + ": " + m.message);
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : table.pairs)
    pairs.push_back({{"eps_a", p.eps_a}, {"eps_b", p.eps_b}, {"u_distance", p.u_distance}, {"grad_d_distance", p.grad_d_distance}});
  report.data["members"] = members;
  report.data["pairs"] = pairs;
  report.data["reference_f_eps"] = table.reference_f_eps;
  report.data["f_eps_ratio"] = table.f_eps_ratio;
  report.checks.push_back(equals("distances_monotone", table.monotone ? 1.0 : 0.0, 1.0));
  report.checks.push_back(at_most("f_eps_ratio", table.f_eps_ratio, threshold(spec, "f_eps_ratio")));
  report.blow_up = table.any_blow_up;

  if (opt.write_outputs) {
    std::ostringstream t;
    t << "eps_a,eps_b,u_distance,grad_d_distance\n";
    for (const auto& p : table.pairs) t << csv(p.eps_a) << ',' << csv(p.eps_b) << ',' << csv(p.u_distance) << ',' << csv(p.grad_d_distance) << '\n';
    write_text(spec.output.directory / "sweep_pairs.csv", t.str());
    std::ostringstream m;
    m << "epsilon,termination,f_eps_max,mollification_delta\n";
    for (const auto& x : table.members)
      m << csv(x.epsilon) << ',' << to_string(x.termination) << ',' << csv(x.f_eps_max) << ',' << csv(x.mollification_delta) << '\n';
    write_text(spec.output.directory / "sweep_members.csv", m.str());
    if (spec.output.plots && table.pairs.size() > 1) {
      std::vector<double> idx;
      PlotSeries u{"||u_a - u_b||", {}}, d{"||grad(d_a - d_b)||", {}};
      for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        idx.push_back(static_cast<double>(i));
        u.values.push_back(table.pairs[i].u_distance);
        d.values.push_back(table.pairs[i].grad_d_distance);
      }
      write_line_plot(spec.output.directory / "sweep_distances.svg", "Distances between consecutive epsilons",
                      "pair index", idx, {u, d}, true);
    }
  }
}

void stability_run(const ExperimentSpec& spec, const ExperimentOptions& opt, Report& report) {
  const Grid g = grid_of(spec.solver);
  const InitialData data = build_initial_data(spec, g);
  say(opt, "stability: delta=" + num(spec.delta));
  const StabilityResult r = stability_study(data, spec.solver, spec.delta, spec.seed + 1, spec.check_dt_halving);
  report.blow_up = r.termination != Termination::completed;
  if (report.blow_up) report.notes.push_back(r.message);
  report.checks.push_back(within("gronwall_ratio", r.ratio, threshold(spec, "ratio_low"), threshold(spec, "ratio_high")));
  report.checks.push_back(equals("zero_perturbation_exact", r.zero_exact ? 1.0 : 0.0, 1.0));
  report.data["g0"] = r.g0;
  report.data["g_end"] = r.g_end;
  report.data["ratio"] = r.ratio;
  report.data["lambda"] = r.lambda;
  if (r.lambda_half_dt) {
    report.data["lambda_half_dt"] = *r.lambda_half_dt;
    const double drift = std::abs(*r.lambda_half_dt - r.lambda) / std::max(std::abs(r.lambda), 1e-300);
    report.checks.push_back(at_most("lambda_drift", drift, threshold(spec, "lambda_drift")));
  }
  if (opt.write_outputs) {
    std::ostringstream t;
    t << "t,G_delta,G_half_delta,G_zero\n";
    for (std::size_t k = 0; k < r.t.size(); ++k)
      t << csv(r.t[k]) << ',' << csv(r.g_delta[k]) << ',' << csv(r.g_half[k]) << ',' << csv(r.g_zero[k]) << '\n';
    write_text(spec.output.directory / "gronwall.csv", t.str());
    if (spec.output.plots)
      write_line_plot(spec.output.directory / "gronwall.svg", "Gronwall quantity", "t", r.t,
                      {{"G delta", r.g_delta}, {"G delta/2", r.g_half}}, true);
  }
}

void refinement_run(const ExperimentSpec& spec, const ExperimentOptions& opt, Report& report) {
  say(opt, std::string("refinement over ") + (spec.dts.empty() ? "n" : "dt"));
  auto data_for = [&](const Grid& g) { return build_initial_data(spec, g); };
  const RefinementTable t = refinement_study(spec.solver, spec.oracle, spec.dts, spec.ns, spec.oracle_amplitude,
                                             threshold(spec, "floor_tolerance"), data_for);
  const double lo = threshold(spec, "order_low");
  const double hi = threshold(spec, "order_high");
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : t.levels) {
    levels.push_back({{"n", l.n}, {"dt", l.dt}, {"oracle_error", l.oracle_error}, {"balance", l.balance},
                      {"drift", l.drift}, {"termination", to_string(l.termination)}});
    if (l.termination != Termination::completed) report.blow_up = true;
  }
  report.data["levels"] = levels;
  report.data["error_orders"] = t.error_orders;
  report.data["balance_orders"] = t.balance_orders;
  report.data["drift_orders"] = t.drift_orders;
  if (t.temporal) {
    const auto& orders = spec.oracle == "none" ? t.balance_orders : t.error_orders;
    const std::string label = spec.oracle == "none" ? "balance_order_" : "error_order_";
    for (std::size_t i = 0; i < orders.size(); ++i) report.checks.push_back(within(label + std::to_string(i), orders[i], lo, hi));
  } else if (spec.oracle != "none") {
    report.data["floor_n"] = t.floor_n ? nlohmann::json(*t.floor_n) : nlohmann::json(nullptr);
    report.checks.push_back(at_most("floor_n", t.floor_n ? *t.floor_n : std::numeric_limits<double>::infinity(),
                                    threshold(spec, "floor_n")));
  }
  if (opt.write_outputs) {
    std::ostringstream os;
    os << "n,dt,oracle_error,balance,drift\n";
    for (const auto& l : t.levels)
      os << l.n << ',' << csv(l.dt) << ',' << csv(l.oracle_error) << ',' << csv(l.balance) << ',' << csv(l.drift) << '\n';
    write_text(spec.output.directory / "refinement.csv", os.str());
    if (spec.output.plots) {
      std::vector<double> h;
      PlotSeries e{"oracle error", {}}, b{"balance residual", {}}, d{"unit drift", {}};
      for (const auto& l : t.levels) {
        h.push_back(t.temporal ? std::log10(l.dt) : static_cast<double>(l.n));
        e.values.push_back(l.oracle_error);
        b.values.push_back(l.balance);
        d.values.push_back(l.drift);
      }
      write_line_plot(spec.output.directory / "refinement.svg", "Refinement study", t.temporal ? "log10 dt" : "n", h,
                      {e, b, d}, true);
    }
  }
}

}  // namespace

Report run_experiment(const ExperimentSpec& spec_in, const ExperimentOptions& options) {
  ExperimentSpec spec = spec_in;
  if (spec.kind == ExperimentKind::eps_sweep && spec.epsilons.size() == 1) {
    // A one-member sweep is a single run on the member's data.
    spec.kind = ExperimentKind::single_run;
    spec.solver.epsilon = spec.epsilons.front();
    spec.initial.mollify_epsilon = spec.epsilons.front();
  }
  validate(spec);
  Report report;
  report.kind = to_string(spec.kind);
  report.config_hash = config_hash(spec);
  report.version = NEMAFLOW_VERSION;
  if (options.write_outputs) {
    std::filesystem::create_directories(spec.output.directory);
    write_text(spec.output.directory / "config.yaml", to_yaml(spec));
  }
  switch (spec.kind) {
    case ExperimentKind::single_run:
      single_run(spec, options, report);
      break;
    case ExperimentKind::oracle_tg:
    case ExperimentKind::oracle_transport:
    case ExperimentKind::oracle_heatflow:
      oracle_run(spec, options, report);
      break;
    case ExperimentKind::eps_sweep:
      sweep_run(spec, options, report);
      break;
    case ExperimentKind::stability:
      stability_run(spec, options, report);
      break;
    case ExperimentKind::refinement:
      refinement_run(spec, options, report);
      break;
  }
  if (options.write_outputs) write_json(spec.output.directory / "report.json", report.to_json());
  return report;
}

}  // namespace nemaflow
