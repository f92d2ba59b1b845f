#include <doctest.h>

#include <fstream>
#include <numbers>
#include <sstream>

#include "nemaflow/output.hpp"

using namespace nemaflow;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + 1)) ++n;
  return n;
}

const auto tmp = std::filesystem::temp_directory_path() / "nemaflow_output_test";

}  // namespace

TEST_CASE("csv header order") {
  const auto h = diagnostics_csv_header();
  REQUIRE(h.size() == 4 + 13 + 5 + 2);
  CHECK(h[0] == "t");
  CHECK(h[1] == "step");
  CHECK(h[2] == "energy");
  CHECK(h[3] == "dissipation");
  CHECK(h[4] == "grad_u");
  CHECK(h[16] == "lap_dt_u");
  CHECK(h[17] == "res_nl1");
  CHECK(h[21] == "res_coupling_cancel");
  CHECK(h[22] == "f_eps");
  CHECK(h[23] == "unit_drift");
}

TEST_CASE("csv rows round-trip exactly") {
  std::vector<DiagnosticsRecord> records(3);
  for (int i = 0; i < 3; ++i) {
    records[i].t = 0.1 * i;
    records[i].step = i;
    records[i].energy = std::numbers::pi / (i + 1);
    records[i].norms[12] = 1.0 / 3.0;
    records[i].residuals.relative[4] = 1e-300;
    records[i].unit_drift = 2.5e-17;
  }
  const auto path = tmp / "d.csv";
  write_diagnostics_csv(path, records);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("t,step,energy,dissipation,grad_u", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 24);
    CHECK(std::stod(cells[2]) == records[rows].energy);
    CHECK(std::stod(cells[16]) == 1.0 / 3.0);
    CHECK(std::stod(cells[21]) == 1e-300);
    CHECK(std::stod(cells[23]) == 2.5e-17);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("svg plots are self-contained") {
  const std::vector<double> x{0, 1, 2, 3};
  const auto path = tmp / "p.svg";
  write_line_plot(path, "a < b", "t", x, {{"one", {1, 2, 3, 4}}, {"two", {0, -1, 1e-3, 5}}}, true);
  const std::string svg = slurp(path);
  CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("a &lt; b") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
  CHECK(svg.find("href") == std::string::npos);

  write_line_plot(path, "flat", "t", x, {{"c", {2, 2, 2, 2}}});
  CHECK(slurp(path).find("nan") == std::string::npos);
  std::filesystem::remove_all(tmp);
}
