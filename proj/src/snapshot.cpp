#include "nemaflow/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nemaflow/errors.hpp"

namespace nemaflow {

namespace {

constexpr const char* kMagic = "nemaflow-field";
constexpr const char* kVersion = "v1";

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0x00000000000000FFull) << 56) | ((v & 0x000000000000FF00ull) << 40) |
        ((v & 0x0000000000FF0000ull) << 24) | ((v & 0x00000000FF000000ull) << 8) |
        ((v & 0x000000FF00000000ull) >> 8) | ((v & 0x0000FF0000000000ull) >> 24) |
        ((v & 0x00FF000000000000ull) >> 40) | ((v & 0xFF00000000000000ull) >> 56);
  }
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const std::string& name,
                    const std::vector<const ScalarField*>& components) {
  if (components.empty()) throw UsageError("snapshot needs at least one component");
  if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
    throw ConfigurationError("snapshot name must be a single non-empty token");
  }
  const Grid& grid = components.front()->grid();
  for (const auto* c : components) require_same_grid(grid, c->grid());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open snapshot for writing: " + path.string());
  std::ostringstream header;
  header << kMagic << ' ' << kVersion << ' ' << name << ' ' << grid.n() << ' ' << std::setprecision(17)
         << grid.box_length() << ' ' << components.size() << '\n';
  out << header.str();
  std::vector<std::uint64_t> buffer(grid.size());
  for (const auto* c : components) {
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = to_little_endian(std::bit_cast<std::uint64_t>((*c)[i]));
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * 8));
  }
  if (!out) throw Error("failed writing snapshot: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const std::string& name, const ScalarField& f) {
  write_snapshot(path, name, std::vector<const ScalarField*>{&f});
}

void write_snapshot(const std::filesystem::path& path, const std::string& name, const VectorField& f) {
  write_snapshot(path, name, std::vector<const ScalarField*>{&f[0], &f[1], &f[2]});
}

void write_snapshot(const std::filesystem::path& path, const std::string& name, const TensorField& f) {
  std::vector<const ScalarField*> comps;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) comps.push_back(&f(i, j));
  }
  write_snapshot(path, name, comps);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot: " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string magic, version, name;
  int n = 0;
  double length = 0.0;
  std::size_t count = 0;
  header >> magic >> version >> name >> n >> length >> count;
  if (!header || magic != kMagic) throw Error("not a nemaflow field snapshot: " + path.string());
  if (version != kVersion) throw Error("unsupported snapshot version '" + version + "'");
  if (count == 0) throw Error("snapshot declares no components");

  Snapshot snap{name, Grid(n, length), {}};
  std::vector<std::uint64_t> buffer(snap.grid.size());
  for (std::size_t c = 0; c < count; ++c) {
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * 8));
    if (!in) throw Error("truncated snapshot: " + path.string());
    ScalarField f(snap.grid);
    for (std::size_t i = 0; i < buffer.size(); ++i) f[i] = std::bit_cast<double>(to_little_endian(buffer[i]));
    snap.components.push_back(std::move(f));
  }
  return snap;
}

ScalarField read_scalar_snapshot(const std::filesystem::path& path) {
  Snapshot s = read_snapshot(path);
  if (s.components.size() != 1) throw DimensionError("expected a scalar snapshot");
  return std::move(s.components[0]);
}

VectorField read_vector_snapshot(const std::filesystem::path& path) {
  Snapshot s = read_snapshot(path);
  if (s.components.size() != 3) throw DimensionError("expected a vector snapshot");
  return VectorField(std::move(s.components[0]), std::move(s.components[1]), std::move(s.components[2]));
}

}  // namespace nemaflow
