#include "nemaflow/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "nemaflow/errors.hpp"

namespace nemaflow {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write " + path.string());
  return out;
}

// Tick positions covering [lo, hi] at a 1-2-5 spacing.
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return ticks;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

}  // namespace

std::vector<std::string> diagnostics_csv_header() {
  std::vector<std::string> h{"t", "step", "energy", "dissipation"};
  for (auto n : kNormNames) h.emplace_back(n);
  for (auto n : kResidualNames) h.push_back("res_" + std::string(n));
  h.emplace_back("f_eps");
  h.emplace_back("unit_drift");
  return h;
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records) {
  auto out = open_out(path);
  const auto header = diagnostics_csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : records) {
    out << fmt(r.t) << ',' << r.step << ',' << fmt(r.energy) << ',' << fmt(r.dissipation);
    for (double v : r.norms) out << ',' << fmt(v);
    for (double v : r.residuals.relative) out << ',' << fmt(v);
    out << ',' << fmt(r.f_eps) << ',' << fmt(r.unit_drift) << '\n';
  }
}

void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                     const std::vector<double>& x, const std::vector<PlotSeries>& series, bool log_y) {
  constexpr double W = 720, H = 440, left = 80, right = 180, top = 40, bottom = 56;
  const double pw = W - left - right, ph = H - top - bottom;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double v) { return std::isfinite(v) && (!log_y || v > 0.0); };

  double xlo = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double xhi = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.values.size() && i < x.size(); ++i) {
      if (!usable(s.values[i])) continue;
      ylo = std::min(ylo, ty(s.values[i]));
      yhi = std::max(yhi, ty(s.values[i]));
    }
  }
  if (!std::isfinite(ylo)) ylo = 0.0, yhi = 1.0;
  if (yhi - ylo < 1e-12 * std::max(1.0, std::abs(yhi))) {
    const double pad = log_y ? 0.5 : std::max(1e-12, 0.05 * std::abs(yhi) + 1e-12);
    ylo -= pad, yhi += pad;
  }
  if (xhi <= xlo) xhi = xlo + 1.0;
  auto px = [&](double v) { return left + (v - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double v) { return top + (1.0 - (v - ylo) / (yhi - ylo)) * ph; };

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : nice_ticks(xlo, xhi)) {
    out << "<line x1=\"" << px(t) << "\" y1=\"" << top + ph << "\" x2=\"" << px(t) << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"#333\"/><text x=\"" << px(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << short_fmt(t) << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi)) {
    const std::string label = log_y ? "1e" + short_fmt(t) : short_fmt(t);
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << left + pw << "\" y2=\"" << py(t)
        << "\" stroke=\"#ddd\"/><text x=\"" << left - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << label
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    std::ostringstream pts;
    for (std::size_t i = 0; i < series[s].values.size() && i < x.size(); ++i) {
      if (!usable(series[s].values[i])) continue;
      pts << px(x[i]) << ',' << py(ty(series[s].values[i])) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.6\" points=\"" << pts.str() << "\"/>\n";
    const double ly = top + 12 + 18 * static_cast<double>(s);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
        << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/><text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4
        << "\">" << escape(series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_run_plots(const std::filesystem::path& dir, const std::vector<DiagnosticsRecord>& records) {
  std::vector<double> t;
  for (const auto& r : records) t.push_back(r.t);
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(get(r));
    return v;
  };
  write_line_plot(dir / "energy.svg", "Energy and dissipation", "t",
                  t, {{"energy", column([](const auto& r) { return r.energy; })},
                      {"dissipation", column([](const auto& r) { return r.dissipation; })}});
  std::vector<PlotSeries> norms;
  for (std::size_t i = 0; i < kNormNames.size(); ++i)
    norms.push_back({std::string(kNormNames[i]), column([i](const auto& r) { return r.norms[i]; })});
  write_line_plot(dir / "norms.svg", "Sobolev norms", "t", t, norms, true);
  std::vector<PlotSeries> res;
  for (std::size_t i = 0; i < kResidualNames.size(); ++i)
    res.push_back({std::string(kResidualNames[i]), column([i](const auto& r) { return r.residuals.relative[i]; })});
  write_line_plot(dir / "residuals.svg", "Identity residuals (relative)", "t", t, res, true);
  write_line_plot(dir / "f_eps.svg", "f_eps", "t", t, {{"f_eps", column([](const auto& r) { return r.f_eps; })}});
  write_line_plot(dir / "unit_drift.svg", "Unit drift before renormalisation", "t", t,
                  {{"unit_drift", column([](const auto& r) { return r.unit_drift; })}}, true);
}

nlohmann::json run_summary(const Trajectory& tr) {
  nlohmann::json j;
  j["termination"] = to_string(tr.termination);
  if (!tr.message.empty()) j["message"] = tr.message;
  if (tr.failed_step >= 0) j["failed_step"] = tr.failed_step;
  j["steps"] = tr.final_state.step;
  j["t_final"] = tr.final_state.t;
  j["compatibility"] = {{"g0_l2", tr.g0_l2}, {"reconstruction_residual", tr.compatibility_residual}};
  j["viscosity_scale"] = tr.viscosity_scale;
  j["max_cfl"] = tr.max_cfl;
  j["cfl_warnings"] = tr.cfl_warnings;
  j["density_range"] = {tr.rho_min, tr.rho_max};
  j["density_within_tolerance"] = tr.rho_within_tolerance;
  j["max_pressure_iterations"] = tr.max_pressure_iterations;
  j["snapshots_written"] = tr.snapshots_written;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace nemaflow
