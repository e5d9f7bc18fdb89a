#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "yamabe/mesh.hpp"

namespace yamabe {

/// Contents of a `plmesh 1` file. `lengths`, when present, is indexed by
/// EdgeId of `mesh`.
struct MeshFile {
  Triangulation mesh;
  std::optional<std::vector<double>> lengths;
};

// Text format:
//   plmesh 1
//   v <id>                     one per vertex
//   f <id> <id> <id>           one per face; edges are inferred
//   len <id> <id> <float>      optional, one per edge when present
// Blank lines and lines starting with '#' are ignored. Vertex ids may be any
// distinct nonnegative integers; they are renumbered densely in ascending order.

MeshFile read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Triangulation& t,
                const std::optional<std::vector<double>>& lengths = std::nullopt);

MeshFile load_mesh(const std::filesystem::path& path);
void save_mesh(const std::filesystem::path& path, const Triangulation& t,
               const std::optional<std::vector<double>>& lengths = std::nullopt);

}  // namespace yamabe
