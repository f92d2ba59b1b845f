#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nemaflow/diagnostics.hpp"
#include "nemaflow/run.hpp"

namespace nemaflow {

/// Column order of the per-step diagnostics CSV.
std::vector<std::string> diagnostics_csv_header();

/// One row per record, values printed with 17 significant digits.
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records);

struct PlotSeries {
  std::string name;
  std::vector<double> values;
};

/// Standalone SVG line chart. With log_y, non-positive samples are dropped.
void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                     const std::vector<double>& x, const std::vector<PlotSeries>& series, bool log_y = false);

/// energy.svg, norms.svg, residuals.svg, f_eps.svg and unit_drift.svg in `dir`.
void write_run_plots(const std::filesystem::path& dir, const std::vector<DiagnosticsRecord>& records);

/// Termination, compatibility norms, extremes and counters of a run.
nlohmann::json run_summary(const Trajectory& trajectory);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nemaflow
