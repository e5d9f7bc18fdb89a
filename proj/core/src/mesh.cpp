#include "yamabe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>

namespace yamabe {

const char* to_string(MeshErrorCode code) {
  switch (code) {
    case MeshErrorCode::kMalformed: return "malformed";
    case MeshErrorCode::kEmptyMesh: return "empty-mesh";
    case MeshErrorCode::kNonManifoldEdge: return "non-manifold-edge";
    case MeshErrorCode::kDanglingVertex: return "dangling-vertex";
    case MeshErrorCode::kDegenerateFace: return "degenerate-face";
    case MeshErrorCode::kDuplicateFace: return "duplicate-face";
    case MeshErrorCode::kMissingLength: return "missing-length";
    case MeshErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

}  // namespace

Triangulation Triangulation::from_faces(std::size_t vertex_count, std::span<const Face> faces) {
  Triangulation t;
  t.faces_.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    Face face = faces[f];
    for (VertexId v : face) {
      if (v >= vertex_count) {
        throw MeshError(MeshErrorCode::kDanglingVertex,
                        "face " + std::to_string(f) + " references unknown vertex " +
                            std::to_string(v));
      }
    }
    std::sort(face.begin(), face.end());
    if (face[0] == face[1] || face[1] == face[2]) {
      throw MeshError(MeshErrorCode::kDegenerateFace,
                      "face " + std::to_string(f) + " repeats a vertex");
    }
    t.faces_.push_back(face);
  }
  {
    std::vector<Face> sorted = t.faces_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw MeshError(MeshErrorCode::kDuplicateFace, "duplicate face in face list");
    }
  }

  // Edges in lexicographic order.
  std::map<std::uint64_t, std::vector<std::pair<FaceId, int>>> edge_map;
  for (FaceId f = 0; f < t.faces_.size(); ++f) {
    const Face& face = t.faces_[f];
    for (int slot = 0; slot < 3; ++slot) {
      VertexId a = face[(slot + 1) % 3];
      VertexId b = face[(slot + 2) % 3];
      edge_map[edge_key(a, b)].emplace_back(f, slot);
    }
  }
  t.face_edges_.assign(t.faces_.size(), {0, 0, 0});
  t.edges_.reserve(edge_map.size());
  t.edge_faces_.reserve(edge_map.size());
  for (const auto& [key, incident] : edge_map) {
    const auto a = static_cast<VertexId>(key >> 32);
    const auto b = static_cast<VertexId>(key & 0xffffffffu);
    if (incident.size() > 2) {
      throw MeshError(MeshErrorCode::kNonManifoldEdge,
                      "edge (" + std::to_string(a) + ", " + std::to_string(b) + ") lies in " +
                          std::to_string(incident.size()) + " faces");
    }
    const auto id = static_cast<EdgeId>(t.edges_.size());
    t.edges_.push_back({a, b});
    std::array<FaceId, 2> adj{kNoFace, kNoFace};
    for (std::size_t k = 0; k < incident.size(); ++k) {
      adj[k] = incident[k].first;
      t.face_edges_[incident[k].first][incident[k].second] = id;
    }
    t.edge_faces_.push_back(adj);
  }

  // Vertex stars, sorted by neighbor id.
  std::vector<std::vector<Neighbor>> stars(vertex_count);
  for (EdgeId e = 0; e < t.edges_.size(); ++e) {
    stars[t.edges_[e].a].push_back({t.edges_[e].b, e});
    stars[t.edges_[e].b].push_back({t.edges_[e].a, e});
  }
  t.star_offset_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    std::sort(stars[v].begin(), stars[v].end(),
              [](const Neighbor& x, const Neighbor& y) { return x.vertex < y.vertex; });
    t.star_offset_[v + 1] = t.star_offset_[v] + stars[v].size();
  }
  t.star_.reserve(t.star_offset_.back());
  for (auto& s : stars) t.star_.insert(t.star_.end(), s.begin(), s.end());

  std::vector<std::vector<FaceId>> vfaces(vertex_count);
  for (FaceId f = 0; f < t.faces_.size(); ++f) {
    for (VertexId v : t.faces_[f]) vfaces[v].push_back(f);
  }
  t.vface_offset_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    t.vface_offset_[v + 1] = t.vface_offset_[v] + vfaces[v].size();
  }
  t.vface_.reserve(t.vface_offset_.back());
  for (auto& s : vfaces) t.vface_.insert(t.vface_.end(), s.begin(), s.end());

  t.vertex_boundary_.assign(vertex_count, 0);
  for (EdgeId e = 0; e < t.edges_.size(); ++e) {
    if (t.edge_faces_[e][1] == kNoFace) {
      t.vertex_boundary_[t.edges_[e].a] = 1;
      t.vertex_boundary_[t.edges_[e].b] = 1;
    }
  }
  return t;
}

std::size_t Triangulation::max_degree() const {
  std::size_t m = 0;
  for (std::size_t v = 0; v < vertex_count(); ++v) m = std::max(m, degree(static_cast<VertexId>(v)));
  return m;
}

std::vector<VertexId> Triangulation::boundary_vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < vertex_count(); ++v) {
    if (is_boundary_vertex(v)) out.push_back(v);
  }
  return out;
}

std::vector<VertexId> Triangulation::interior_vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < vertex_count(); ++v) {
    if (!is_boundary_vertex(v)) out.push_back(v);
  }
  return out;
}

std::int64_t Triangulation::find_edge(VertexId a, VertexId b) const {
  for (const Neighbor& n : neighbors(a)) {
    if (n.vertex == b) return n.edge;
  }
  return -1;
}

int Triangulation::slot_of(FaceId f, VertexId v) const {
  for (int k = 0; k < 3; ++k) {
    if (faces_[f][k] == v) return k;
  }
  return -1;
}

std::vector<int> Triangulation::bfs_distances(VertexId source) const {
  const VertexId sources[] = {source};
  return bfs_distances(sources);
}

std::vector<int> Triangulation::bfs_distances(std::span<const VertexId> sources) const {
  std::vector<int> dist(vertex_count(), -1);
  std::deque<VertexId> queue;
  for (VertexId s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (const Neighbor& n : neighbors(v)) {
      if (dist[n.vertex] < 0) {
        dist[n.vertex] = dist[v] + 1;
        queue.push_back(n.vertex);
      }
    }
  }
  return dist;
}

long euler_characteristic(const Triangulation& t) {
  return static_cast<long>(t.vertex_count()) - static_cast<long>(t.edge_count()) +
         static_cast<long>(t.face_count());
}

namespace {

struct Axial {
  int q;
  int r;
  auto operator<=>(const Axial&) const = default;
};

int hex_distance(Axial a) { return std::max({std::abs(a.q), std::abs(a.r), std::abs(a.q + a.r)}); }

// Lattice points of the disk ordered by ring, then counterclockwise from +x.
std::vector<Axial> disk_points(int radius) {
  std::vector<Axial> pts;
  for (int q = -radius; q <= radius; ++q) {
    for (int r = -radius; r <= radius; ++r) {
      if (hex_distance({q, r}) <= radius) pts.push_back({q, r});
    }
  }
  auto angle = [](Axial a) {
    const double x = a.q + 0.5 * a.r;
    const double y = a.r * std::sqrt(3.0) / 2.0;
    double th = std::atan2(y, x);
    return th < 0 ? th + 2 * M_PI : th;
  };
  std::sort(pts.begin(), pts.end(), [&](Axial a, Axial b) {
    const int da = hex_distance(a), db = hex_distance(b);
    if (da != db) return da < db;
    return angle(a) < angle(b);
  });
  return pts;
}

}  // namespace

Triangulation build_hexagonal_disk(int radius) {
  if (radius < 0) throw std::invalid_argument("hexagonal disk radius must be nonnegative");
  const std::vector<Axial> pts = disk_points(radius);
  std::map<Axial, VertexId> index;
  for (VertexId i = 0; i < pts.size(); ++i) index[pts[i]] = i;
  auto lookup = [&](int q, int r) -> std::int64_t {
    auto it = index.find({q, r});
    return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
  };
  std::vector<Face> faces;
  auto push = [&](std::int64_t a, std::int64_t b, std::int64_t c) {
    if (a >= 0 && b >= 0 && c >= 0) {
      faces.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b), static_cast<VertexId>(c)});
    }
  };
  for (int q = -radius - 1; q <= radius; ++q) {
    for (int r = -radius - 1; r <= radius; ++r) {
      push(lookup(q, r), lookup(q + 1, r), lookup(q, r + 1));
      push(lookup(q + 1, r), lookup(q, r + 1), lookup(q + 1, r + 1));
    }
  }
  std::sort(faces.begin(), faces.end(), [](Face x, Face y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x < y;
  });
  return Triangulation::from_faces(pts.size(), faces);
}

std::vector<std::array<double, 2>> hexagonal_disk_positions(int radius) {
  if (radius < 0) throw std::invalid_argument("hexagonal disk radius must be nonnegative");
  std::vector<std::array<double, 2>> out;
  for (const Axial& a : disk_points(radius)) {
    out.push_back({a.q + 0.5 * a.r, a.r * std::sqrt(3.0) / 2.0});
  }
  return out;
}

Triangulation build_tetrahedron() {
  const Face faces[] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return Triangulation::from_faces(4, faces);
}

std::int64_t ExhaustionLevel::local_id(VertexId base_vertex) const {
  auto it = std::lower_bound(to_base.begin(), to_base.end(), base_vertex);
  if (it == to_base.end() || *it != base_vertex) return -1;
  return it - to_base.begin();
}

std::vector<VertexId> ExhaustionLevel::pinned_vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < interior.size(); ++v) {
    if (!interior[v]) out.push_back(v);
  }
  return out;
}

ExhaustionSequence exhaustion(const Triangulation& t, VertexId center, std::size_t count) {
  if (center >= t.vertex_count()) throw std::invalid_argument("exhaustion center not in mesh");
  if (count == 0) throw std::invalid_argument("exhaustion level count must be positive");
  const std::vector<int> dist = t.bfs_distances(center);
  for (int d : dist) {
    if (d < 0) throw std::invalid_argument("exhaustion requires a connected mesh");
  }
  std::vector<int> face_level(t.face_count());
  for (FaceId f = 0; f < t.face_count(); ++f) {
    const Face& face = t.face(f);
    face_level[f] = std::max({dist[face[0]], dist[face[1]], dist[face[2]], 1});
  }

  ExhaustionSequence seq;
  seq.requested = count;
  std::size_t previous_faces = 0;
  for (std::size_t k = 1; k <= count; ++k) {
    std::vector<FaceId> base_faces;
    for (FaceId f = 0; f < t.face_count(); ++f) {
      if (face_level[f] <= static_cast<int>(k)) base_faces.push_back(f);
    }
    if (k > 1 && base_faces.size() == previous_faces) break;
    previous_faces = base_faces.size();

    ExhaustionLevel level;
    std::vector<VertexId> verts{center};
    for (FaceId f : base_faces) verts.insert(verts.end(), t.face(f).begin(), t.face(f).end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    level.to_base = verts;
    level.base_faces = base_faces;

    std::vector<Face> local_faces;
    local_faces.reserve(base_faces.size());
    for (FaceId f : base_faces) {
      Face lf{};
      for (int s = 0; s < 3; ++s) lf[s] = static_cast<VertexId>(level.local_id(t.face(f)[s]));
      local_faces.push_back(lf);
    }
    level.mesh = Triangulation::from_faces(verts.size(), local_faces);

    std::vector<std::uint8_t> included(t.face_count(), 0);
    for (FaceId f : base_faces) included[f] = 1;
    level.interior.assign(verts.size(), 0);
    for (VertexId lv = 0; lv < verts.size(); ++lv) {
      const auto bf = t.vertex_faces(verts[lv]);
      const bool all_in = !bf.empty() && std::all_of(bf.begin(), bf.end(),
                                                     [&](FaceId f) { return included[f] != 0; });
      level.interior[lv] = (all_in && !level.mesh.is_boundary_vertex(lv)) ? 1 : 0;
    }
    seq.levels.push_back(std::move(level));
  }
  return seq;
}

}  // namespace yamabe
