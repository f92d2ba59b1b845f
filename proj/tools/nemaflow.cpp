#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "nemaflow/config.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/experiments.hpp"

namespace {

constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nemaflow: pseudo-spectral solver and verification experiments for density-dependent nematic flow"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", NEMAFLOW_VERSION);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "YAML experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--seed", seed, "seed for random initial fields (overrides experiment.seed)");
  app.add_flag("--quiet", quiet, "print only the final status line");

  auto* run = app.add_subcommand("run", "single run with per-step diagnostics");
  auto* sweep = app.add_subcommand("sweep-eps", "epsilon -> 0 sweep on mollified data");
  auto* refine = app.add_subcommand("refine", "dt or n refinement study");
  auto* stability = app.add_subcommand("stability", "perturbation growth of the Gronwall quantity");
  auto* oracle = app.add_subcommand("oracle", "closed-form oracle run");
  std::string oracle_name;
  oracle->add_option("name", oracle_name, "tg, transport or heatflow")
      ->required()
      ->check(CLI::IsMember({"tg", "transport", "heatflow"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  nemaflow::ExperimentSpec spec;
  try {
    if (!config_path.empty()) spec = nemaflow::load_spec(config_path);
    if (!out_dir.empty()) spec.output.directory = out_dir;
    if (seed) spec.seed = *seed;
    using nemaflow::ExperimentKind;
    if (run->parsed()) spec.kind = ExperimentKind::single_run;
    if (sweep->parsed()) spec.kind = ExperimentKind::eps_sweep;
    if (refine->parsed()) spec.kind = ExperimentKind::refinement;
    if (stability->parsed()) spec.kind = ExperimentKind::stability;
    if (oracle->parsed()) {
      spec.kind = oracle_name == "tg"          ? ExperimentKind::oracle_tg
                  : oracle_name == "transport" ? ExperimentKind::oracle_transport
                                               : ExperimentKind::oracle_heatflow;
    }
    if (spec.kind == ExperimentKind::refinement && spec.dts.empty() && spec.ns.empty()) spec.dts = {4e-3, 2e-3, 1e-3};
    nemaflow::validate(spec);
  } catch (const nemaflow::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  nemaflow::ExperimentOptions options;
  if (!quiet) options.progress = [](const std::string& m) { std::cerr << m << '\n'; };
  try {
    const nemaflow::Report report = nemaflow::run_experiment(spec, options);
    const std::string text = report.summary();
    if (quiet) {
      const auto cut = text.find_last_of('\n', text.size() - 2);
      std::cout << (cut == std::string::npos ? text : text.substr(cut + 1));
    } else {
      std::cout << text << "outputs in " << spec.output.directory.string() << '\n';
    }
    return report.exit_code();
  } catch (const nemaflow::ConfigurationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nemaflow::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nemaflow::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
