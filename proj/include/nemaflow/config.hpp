#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nemaflow/dynamics.hpp"
#include "nemaflow/initial_data.hpp"

namespace nemaflow {

enum class ExperimentKind { oracle_tg, oracle_transport, oracle_heatflow, eps_sweep, refinement, stability, single_run };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Initial density: band-limited random modes scaled into the bounds, a bump
/// between the bounds, or a constant (the lower bound).
struct DensitySpec {
  std::string mode = "random_modes";  // random_modes | bump | constant
  double lower = 0.7;
  double upper = 1.3;
  int max_mode = 2;
  BumpShape shape{std::nullopt, 0.35};
  std::optional<double> peak;
};

struct VelocitySpec {
  std::string mode = "random_modes";  // random_modes | taylor_green | random_bump | zero
  double amplitude = 0.2;
  int max_mode = 2;
  BumpShape shape{std::nullopt, 0.35};
};

struct DirectorSpec {
  std::string mode = "random_modes";  // random_modes | tilt | constant
  Vec3 d_star{0.0, 0.0, 1.0};
  double amplitude = 0.5;  // random_modes angle amplitude
  int max_mode = 2;
  Vec3 axis{1.0, 0.0, 0.0};  // tilt only
  double angle = 0.0;
  BumpShape shape{std::nullopt, 0.35};
};

struct InitialDataSpec {
  DensitySpec density;
  VelocitySpec velocity;
  DirectorSpec director;
  double mollify_epsilon = 0.0;  // 0: data used as generated
};

struct OutputSpec {
  std::filesystem::path directory = "nemaflow_out";
  long snapshot_every = 0;
  bool plots = true;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::single_run;
  SolverConfig solver;
  InitialDataSpec initial;
  OutputSpec output;
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4, 0.0};
  std::vector<double> dts;
  std::vector<int> ns;
  double delta = 1e-3;
  std::uint64_t seed = 7;
  std::string oracle = "tg";  // refinement: tg | transport | heatflow | none
  std::optional<double> oracle_amplitude;
  double reference_epsilon = 1e-4;
  bool check_dt_halving = true;  // stability: refit the growth rate at dt/2
  std::map<std::string, double> thresholds;
};

/// Names accepted under experiment.thresholds, with their defaults.
const std::map<std::string, double>& default_thresholds();
double threshold(const ExperimentSpec& spec, const std::string& name);

/// Parses YAML text. Unknown keys and malformed values raise ConfigParseError
/// naming the key and its line.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Throws ConfigurationError (or UsageError for short refinement lists).
void validate(const ExperimentSpec& spec);

/// Canonical YAML of the effective spec; reparsing it gives the same spec.
std::string to_yaml(const ExperimentSpec& spec);
/// FNV-1a 64 of to_yaml(spec), as 16 hex digits.
std::string config_hash(const ExperimentSpec& spec);

/// Worker count for independent member runs, from NEMAFLOW_THREADS (default 1).
int thread_count();

}  // namespace nemaflow
