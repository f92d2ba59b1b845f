#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nemaflow/field.hpp"

namespace nemaflow {

/// Contents of one snapshot file: a named field with 1, 3 or 9 components.
struct Snapshot {
  std::string name;
  Grid grid;
  std::vector<ScalarField> components;
};

/// Writes "nemaflow-field v1 <name> <n> <L> <components>\n" followed by the
/// component samples as little-endian float64, component-major, x slowest.
void write_snapshot(const std::filesystem::path& path, const std::string& name, const ScalarField& f);
void write_snapshot(const std::filesystem::path& path, const std::string& name, const VectorField& f);
void write_snapshot(const std::filesystem::path& path, const std::string& name, const TensorField& f);
void write_snapshot(const std::filesystem::path& path, const std::string& name,
                    const std::vector<const ScalarField*>& components);

Snapshot read_snapshot(const std::filesystem::path& path);
ScalarField read_scalar_snapshot(const std::filesystem::path& path);
VectorField read_vector_snapshot(const std::filesystem::path& path);

}  // namespace nemaflow
