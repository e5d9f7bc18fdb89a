#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "yamabe/mesh.hpp"

using namespace yamabe;

namespace {

// Brute-force lattice oracle: points of the triangular lattice within hex
// distance R, edges between points at Euclidean distance 1, faces as
// mutually adjacent triples.
struct LatticeCounts {
  std::size_t v, e, f;
};

LatticeCounts brute_force_disk(int r) {
  std::vector<std::array<double, 2>> pts;
  for (int q = -r; q <= r; ++q) {
    for (int s = -r; s <= r; ++s) {
      if (std::max({std::abs(q), std::abs(s), std::abs(q + s)}) <= r) {
        pts.push_back({q + 0.5 * s, s * std::sqrt(3.0) / 2.0});
      }
    }
  }
  auto adjacent = [&](std::size_t i, std::size_t j) {
    return std::abs(std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]) - 1.0) < 1e-9;
  };
  std::size_t e = 0, f = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (!adjacent(i, j)) continue;
      ++e;
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        if (adjacent(i, k) && adjacent(j, k)) ++f;
      }
    }
  }
  return {pts.size(), e, f};
}

}  // namespace

TEST(HexagonalDisk, CountsMatchBruteForceLattice) {
  for (int r = 0; r <= 6; ++r) {
    const Triangulation t = build_hexagonal_disk(r);
    const LatticeCounts want = brute_force_disk(r);
    EXPECT_EQ(t.vertex_count(), want.v) << "R=" << r;
    EXPECT_EQ(t.edge_count(), want.e) << "R=" << r;
    EXPECT_EQ(t.face_count(), want.f) << "R=" << r;
  }
}

TEST(HexagonalDisk, RadiusTwoFrozenCounts) {
  const Triangulation t = build_hexagonal_disk(2);
  EXPECT_EQ(t.vertex_count(), 19u);
  EXPECT_EQ(t.edge_count(), 42u);
  EXPECT_EQ(t.face_count(), 24u);
  EXPECT_EQ(euler_characteristic(t), 1);
}

TEST(HexagonalDisk, RadiusZeroIsSingleVertex) {
  const Triangulation t = build_hexagonal_disk(0);
  EXPECT_EQ(t.vertex_count(), 1u);
  EXPECT_EQ(t.edge_count(), 0u);
  EXPECT_EQ(t.face_count(), 0u);
}

TEST(HexagonalDisk, NegativeRadiusThrows) { EXPECT_THROW(build_hexagonal_disk(-1), std::invalid_argument); }

TEST(HexagonalDisk, InteriorDegreeSixAndBoundaryRing) {
  const int r = 5;
  const Triangulation t = build_hexagonal_disk(r);
  const auto dist = t.bfs_distances(VertexId{0});
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    EXPECT_EQ(t.is_boundary_vertex(v), dist[v] == r) << v;
    if (!t.is_boundary_vertex(v)) EXPECT_EQ(t.degree(v), 6u);
  }
  EXPECT_EQ(t.boundary_vertices().size(), 6u * r);
  EXPECT_EQ(t.max_degree(), 6u);
}

TEST(HexagonalDisk, PositionsGiveUnitEdges) {
  const int r = 4;
  const Triangulation t = build_hexagonal_disk(r);
  const auto pos = hexagonal_disk_positions(r);
  ASSERT_EQ(pos.size(), t.vertex_count());
  EXPECT_EQ(pos[0][0], 0.0);
  EXPECT_EQ(pos[0][1], 0.0);
  for (const Edge& e : t.edges()) {
    EXPECT_NEAR(std::hypot(pos[e.a][0] - pos[e.b][0], pos[e.a][1] - pos[e.b][1]), 1.0, 1e-12);
  }
}

TEST(Triangulation, TetrahedronIsClosedSphere) {
  const Triangulation t = build_tetrahedron();
  EXPECT_EQ(t.vertex_count(), 4u);
  EXPECT_EQ(t.edge_count(), 6u);
  EXPECT_EQ(t.face_count(), 4u);
  EXPECT_EQ(euler_characteristic(t), 2);
  EXPECT_TRUE(t.boundary_vertices().empty());
  for (EdgeId e = 0; e < t.edge_count(); ++e) EXPECT_FALSE(t.is_boundary_edge(e));
}

TEST(Triangulation, IncidenceIsConsistent) {
  const Triangulation t = build_hexagonal_disk(3);
  for (FaceId f = 0; f < t.face_count(); ++f) {
    const Face& face = t.face(f);
    EXPECT_TRUE(std::is_sorted(face.begin(), face.end()));
    for (int s = 0; s < 3; ++s) {
      const Edge& e = t.edge(t.face_edge(f, s));
      // The edge opposite slot s avoids the slot-s vertex.
      EXPECT_NE(e.a, face[s]);
      EXPECT_NE(e.b, face[s]);
      const auto& ef = t.edge_faces(t.face_edge(f, s));
      EXPECT_TRUE(ef[0] == f || ef[1] == f);
      EXPECT_EQ(t.slot_of(f, face[s]), s);
    }
  }
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    EXPECT_LT(t.edge(e).a, t.edge(e).b);
    if (e > 0) {
      const Edge& p = t.edge(e - 1);
      const Edge& c = t.edge(e);
      EXPECT_TRUE(p.a < c.a || (p.a == c.a && p.b < c.b));
    }
    EXPECT_EQ(t.find_edge(t.edge(e).a, t.edge(e).b), static_cast<std::int64_t>(e));
    EXPECT_EQ(t.find_edge(t.edge(e).b, t.edge(e).a), static_cast<std::int64_t>(e));
  }
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    const auto nb = t.neighbors(v);
    for (std::size_t i = 1; i < nb.size(); ++i) EXPECT_LT(nb[i - 1].vertex, nb[i].vertex);
    for (const Neighbor& n : nb) EXPECT_EQ(t.edge(n.edge).other(v), n.vertex);
  }
  EXPECT_EQ(t.find_edge(0, static_cast<VertexId>(t.vertex_count() - 1)), -1);
}

TEST(Triangulation, RejectsMalformedFaceLists) {
  auto code_of = [](std::size_t n, std::vector<Face> faces) {
    try {
      Triangulation::from_faces(n, faces);
    } catch (const MeshError& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error";
    return MeshErrorCode::kIo;
  };
  EXPECT_EQ(code_of(3, {{0, 1, 5}}), MeshErrorCode::kDanglingVertex);
  EXPECT_EQ(code_of(3, {{0, 1, 1}}), MeshErrorCode::kDegenerateFace);
  EXPECT_EQ(code_of(3, {{0, 1, 2}, {0, 1, 2}}), MeshErrorCode::kDuplicateFace);
  EXPECT_EQ(code_of(5, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}), MeshErrorCode::kNonManifoldEdge);
}

TEST(Triangulation, EqualityComparesFaces) {
  EXPECT_EQ(build_hexagonal_disk(2), build_hexagonal_disk(2));
  EXPECT_FALSE(build_hexagonal_disk(2) == build_hexagonal_disk(1));
}

TEST(Exhaustion, LevelsAreNested) {
  const Triangulation base = build_hexagonal_disk(6);
  const ExhaustionSequence seq = exhaustion(base, 0, 5);
  ASSERT_EQ(seq.levels.size(), 5u);
  for (std::size_t k = 0; k + 1 < seq.levels.size(); ++k) {
    const auto& a = seq.levels[k];
    const auto& b = seq.levels[k + 1];
    std::set<VertexId> vb(b.to_base.begin(), b.to_base.end());
    std::set<FaceId> fb(b.base_faces.begin(), b.base_faces.end());
    for (VertexId v : a.to_base) EXPECT_TRUE(vb.count(v));
    for (FaceId f : a.base_faces) EXPECT_TRUE(fb.count(f));
    EXPECT_LT(a.mesh.face_count(), b.mesh.face_count());
    EXPECT_LT(a.mesh.edge_count(), b.mesh.edge_count());
  }
}

TEST(Exhaustion, FirstLevelInteriorIsCenter) {
  const Triangulation base = build_hexagonal_disk(3);
  const ExhaustionSequence seq = exhaustion(base, 0, 2);
  ASSERT_EQ(seq.levels.size(), 2u);
  const auto& lv = seq.levels[0];
  std::vector<VertexId> interior;
  for (VertexId v = 0; v < lv.mesh.vertex_count(); ++v) {
    if (lv.interior[v]) interior.push_back(lv.to_base[v]);
  }
  EXPECT_EQ(interior, std::vector<VertexId>{0});
  EXPECT_EQ(exhaustion(base, 0, 1).levels.size(), 1u);
}

TEST(Exhaustion, LevelKIsHexDiskOfRadiusK) {
  const Triangulation base = build_hexagonal_disk(7);
  const ExhaustionSequence seq = exhaustion(base, 0, 6);
  for (std::size_t k = 0; k < seq.levels.size(); ++k) {
    const Triangulation disk = build_hexagonal_disk(static_cast<int>(k + 1));
    EXPECT_EQ(seq.levels[k].mesh.vertex_count(), disk.vertex_count());
    EXPECT_EQ(seq.levels[k].mesh.face_count(), disk.face_count());
    const auto pinned = seq.levels[k].pinned_vertices();
    EXPECT_EQ(pinned.size(), 6 * (k + 1));
  }
}

TEST(Exhaustion, LocalIdsRoundTrip) {
  const Triangulation base = build_hexagonal_disk(4);
  const ExhaustionSequence seq = exhaustion(base, 0, 2);
  const auto& lv = seq.levels[1];
  for (VertexId v = 0; v < lv.to_base.size(); ++v) EXPECT_EQ(lv.local_id(lv.to_base[v]), v);
  EXPECT_EQ(lv.local_id(static_cast<VertexId>(base.vertex_count() - 1)), -1);
}

TEST(Exhaustion, StopsAtSaturation) {
  const Triangulation base = build_hexagonal_disk(2);
  const ExhaustionSequence seq = exhaustion(base, 0, 10);
  EXPECT_EQ(seq.requested, 10u);
  EXPECT_EQ(seq.levels.size(), 2u);
  EXPECT_EQ(seq.levels.back().mesh, base);
}

TEST(Exhaustion, OffCenterStaysInsideBase) {
  const Triangulation base = build_hexagonal_disk(4);
  const VertexId c = static_cast<VertexId>(base.vertex_count() - 1);  // a boundary vertex
  const ExhaustionSequence seq = exhaustion(base, c, 3);
  for (const auto& lv : seq.levels) {
    for (VertexId v = 0; v < lv.mesh.vertex_count(); ++v) {
      // Vertices on the base boundary are never interior to a level.
      if (base.is_boundary_vertex(lv.to_base[v])) EXPECT_FALSE(lv.interior[v]);
      if (lv.mesh.is_boundary_vertex(v)) EXPECT_FALSE(lv.interior[v]);
    }
  }
}

TEST(Exhaustion, RejectsBadArguments) {
  const Triangulation base = build_hexagonal_disk(2);
  EXPECT_THROW(exhaustion(base, 999, 2), std::invalid_argument);
  EXPECT_THROW(exhaustion(base, 0, 0), std::invalid_argument);
  const std::vector<Face> two{{0, 1, 2}, {3, 4, 5}};
  EXPECT_THROW(exhaustion(Triangulation::from_faces(6, two), 0, 3), std::invalid_argument);
}
