#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace yamabe {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using FaceId = std::uint32_t;

inline constexpr std::uint32_t kNoFace = 0xffffffffu;

/// Unordered vertex pair, stored with `a < b`.
struct Edge {
  VertexId a;
  VertexId b;

  VertexId other(VertexId v) const { return v == a ? b : a; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Unordered vertex triple, stored in ascending order.
using Face = std::array<VertexId, 3>;

/// Neighbor entry of a vertex star: the adjacent vertex and the connecting edge.
struct Neighbor {
  VertexId vertex;
  EdgeId edge;
};

enum class MeshErrorCode {
  kMalformed,
  kEmptyMesh,
  kNonManifoldEdge,
  kDanglingVertex,
  kDegenerateFace,
  kDuplicateFace,
  kMissingLength,
  kIo,
};

const char* to_string(MeshErrorCode code);

class MeshError : public std::runtime_error {
 public:
  MeshError(MeshErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  MeshErrorCode code() const noexcept { return code_; }

 private:
  MeshErrorCode code_;
};

/// Finite triangulated surface (possibly with boundary).
///
/// Immutable after construction. Edges are sorted lexicographically, stars are
/// sorted by neighbor id and face lists by face id, so every sum taken over
/// them has a fixed order.
class Triangulation {
 public:
  Triangulation() = default;

  /// Builds the incidence structure from a face list. Throws MeshError on a
  /// face referencing an unknown vertex, a face with repeated vertices, a
  /// duplicated face, or an edge shared by more than two faces.
  static Triangulation from_faces(std::size_t vertex_count, std::span<const Face> faces);

  std::size_t vertex_count() const { return vertex_boundary_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t face_count() const { return faces_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const Face& face(FaceId f) const { return faces_[f]; }

  /// Edge of face `f` opposite its `slot`-th vertex.
  EdgeId face_edge(FaceId f, int slot) const { return face_edges_[f][slot]; }
  /// Faces adjacent to edge `e`; second entry is kNoFace on a boundary edge.
  const std::array<FaceId, 2>& edge_faces(EdgeId e) const { return edge_faces_[e]; }

  std::span<const Neighbor> neighbors(VertexId v) const {
    return {star_.data() + star_offset_[v], star_offset_[v + 1] - star_offset_[v]};
  }
  std::span<const FaceId> vertex_faces(VertexId v) const {
    return {vface_.data() + vface_offset_[v], vface_offset_[v + 1] - vface_offset_[v]};
  }
  std::size_t degree(VertexId v) const { return star_offset_[v + 1] - star_offset_[v]; }
  std::size_t max_degree() const;

  bool is_boundary_vertex(VertexId v) const { return vertex_boundary_[v] != 0; }
  bool is_boundary_edge(EdgeId e) const { return edge_faces_[e][1] == kNoFace; }
  std::vector<VertexId> boundary_vertices() const;
  std::vector<VertexId> interior_vertices() const;

  /// Edge id joining `a` and `b`, or -1 when they are not adjacent. O(deg).
  std::int64_t find_edge(VertexId a, VertexId b) const;
  /// Slot (0..2) of vertex `v` within face `f`, or -1.
  int slot_of(FaceId f, VertexId v) const;

  /// Graph distance from `source` to every vertex (-1 if unreachable).
  std::vector<int> bfs_distances(VertexId source) const;
  /// Graph distance to the nearest vertex of `sources`.
  std::vector<int> bfs_distances(std::span<const VertexId> sources) const;

  friend bool operator==(const Triangulation& x, const Triangulation& y) {
    return x.vertex_boundary_.size() == y.vertex_boundary_.size() && x.faces_ == y.faces_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  std::vector<std::array<EdgeId, 3>> face_edges_;
  std::vector<std::array<FaceId, 2>> edge_faces_;
  std::vector<std::size_t> star_offset_;
  std::vector<Neighbor> star_;
  std::vector<std::size_t> vface_offset_;
  std::vector<FaceId> vface_;
  std::vector<std::uint8_t> vertex_boundary_;
};

/// V - E + F.
long euler_characteristic(const Triangulation& t);

/// Combinatorial ball of radius `radius` in the triangular lattice. Vertex 0
/// is the center; rings are numbered outward.
Triangulation build_hexagonal_disk(int radius);

/// Lattice position of each vertex of build_hexagonal_disk(radius), with unit
/// spacing. Useful for plotting and for geometric test oracles.
std::vector<std::array<double, 2>> hexagonal_disk_positions(int radius);

/// Boundary of a tetrahedron: 4 vertices, 6 edges, 4 faces.
Triangulation build_tetrahedron();

/// One level of an exhaustion: a sub-triangulation plus its embedding in the
/// base mesh.
struct ExhaustionLevel {
  Triangulation mesh;
  std::vector<VertexId> to_base;  // level vertex -> base vertex
  std::vector<FaceId> base_faces;  // level face -> base face
  std::vector<std::uint8_t> interior;  // per level vertex

  /// Level vertex id for a base vertex, or -1 if absent.
  std::int64_t local_id(VertexId base_vertex) const;
  std::vector<VertexId> pinned_vertices() const;
};

struct ExhaustionSequence {
  std::vector<ExhaustionLevel> levels;
  std::size_t requested = 0;  // levels asked for; levels.size() may be smaller
};

/// Nested combinatorial balls around `center`: level k (1-based) holds every
/// face of `t` whose three vertices lie within graph distance k of `center`.
/// A level vertex is interior when every base face around it is included and
/// it does not lie on the level's own boundary. Stops early once the levels
/// stop growing.
ExhaustionSequence exhaustion(const Triangulation& t, VertexId center, std::size_t count);

}  // namespace yamabe
