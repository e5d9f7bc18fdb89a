#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "yamabe/geometry.hpp"
#include "yamabe/parallel.hpp"

using namespace yamabe;

namespace {

// Law of cosines in long double, independent of the library's formula.
long double oracle_angle(long double opp, long double a, long double b) {
  return std::acos((a * a + b * b - opp * opp) / (2 * a * b));
}

Triangulation single_face() {
  const std::vector<Face> f{{0, 1, 2}};
  return Triangulation::from_faces(3, f);
}

// Lengths for single_face() by edge order (0,1), (0,2), (1,2).
PLMetric single_face_metric(const Triangulation& t, double l01, double l02, double l12) {
  return PLMetric(t, {l01, l02, l12});
}

}  // namespace

TEST(Omega, StrictTriangleInequalities) {
  EXPECT_TRUE(in_omega(3, 4, 5));
  EXPECT_FALSE(in_omega(2, 1, 1));
  EXPECT_FALSE(in_omega(1, 2, 1));
  EXPECT_FALSE(in_omega(3, 1, 1));
  EXPECT_TRUE(in_omega(1.999, 1, 1));
  EXPECT_FALSE(in_omega(1.999, 1, 1, 1e-3));
}

TEST(Angles, RightTriangleFrozen) {
  const AngleTriple th = inner_angles(3, 4, 5);
  EXPECT_NEAR(th[0], 0.6435011087932844, 1e-15);  // arcsin(3/5)
  EXPECT_NEAR(th[1], std::asin(0.8), 1e-15);
  EXPECT_NEAR(th[2], kPi / 2, 1e-15);
}

TEST(Angles, EquilateralIsPiOverThree) {
  for (double th : inner_angles(1, 1, 1)) EXPECT_NEAR(th, kPi / 3, 1e-15);
}

TEST(Angles, MatchLawOfCosinesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  int checked = 0;
  while (checked < 5000) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (!in_omega(a, b, c, 1e-3)) continue;
    const AngleTriple th = inner_angles(a, b, c);
    EXPECT_NEAR(th[0], static_cast<double>(oracle_angle(a, b, c)), 1e-10);
    EXPECT_NEAR(th[1], static_cast<double>(oracle_angle(b, a, c)), 1e-10);
    EXPECT_NEAR(th[2], static_cast<double>(oracle_angle(c, a, b)), 1e-10);
    EXPECT_NEAR(th[0] + th[1] + th[2], kPi, 1e-15);
    ++checked;
  }
}

TEST(Angles, OutsideOmegaThrows) {
  EXPECT_THROW(inner_angles(2, 1, 1), GeometryError);
  EXPECT_THROW(inner_angles(0, 1, 1), GeometryError);
}

TEST(ExtendedAngles, DegenerateAssignment) {
  EXPECT_EQ(extended_angles(2, 1, 1), (AngleTriple{kPi, 0, 0}));
  EXPECT_EQ(extended_angles(1, 5, 1), (AngleTriple{0, kPi, 0}));
  EXPECT_EQ(extended_angles(1, 1, 2), (AngleTriple{0, 0, kPi}));
  EXPECT_EQ(extended_angles(3, 4, 5), inner_angles(3, 4, 5));
  EXPECT_THROW(extended_angles(-1, 1, 1), GeometryError);
  EXPECT_THROW(extended_angles(1, std::nan(""), 1), GeometryError);
}

TEST(ExtendedAngles, ContinuousAtBoundary) {
  const double gap = 1e-12;
  const AngleTriple th = extended_angles(2 * (1 - gap), 1, 1);
  EXPECT_NEAR(th[0], kPi, 1e-5);
  EXPECT_NEAR(th[1], 0, 1e-5);
}

TEST(PLMetricTest, FlagsPseudoFaces) {
  const Triangulation t = single_face();
  const PLMetric ok = single_face_metric(t, 1, 1, 1);
  EXPECT_TRUE(ok.is_pl());
  const PLMetric bad = single_face_metric(t, 1, 1, 2);
  EXPECT_FALSE(bad.is_pl());
  EXPECT_EQ(bad.pseudo_face_count(), 1u);
  EXPECT_EQ(bad.first_pseudo_face(), FaceId{0});
  EXPECT_THROW(PLMetric(t, {1, 1}), std::invalid_argument);
  EXPECT_THROW(PLMetric(t, {1, 0, 1}), GeometryError);
}

TEST(ConformalScale, ScalesByHalfSumOfEndpoints) {
  const Triangulation t = single_face();
  const PLMetric d = single_face_metric(t, 3, 4, 5);
  ConformalFactor u(std::vector<double>{0.2, -0.4, 1.0});
  const PLMetric l = conformal_scale(t, d, u);
  EXPECT_DOUBLE_EQ(l[0], 3 * std::exp(-0.1));
  EXPECT_DOUBLE_EQ(l[1], 4 * std::exp(0.6));
  EXPECT_DOUBLE_EQ(l[2], 5 * std::exp(0.3));
  EXPECT_THROW(conformal_scale(t, d, ConformalFactor(std::vector<double>{2000, 0, 0})), GeometryError);
}

TEST(ConformalScale, UniformFactorPreservesAngles) {
  const Triangulation t = build_hexagonal_disk(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> j(0.95, 1.05);
  std::vector<double> len(t.edge_count());
  for (double& x : len) x = j(rng);
  const PLMetric d(t, len);
  const PLMetric l = conformal_scale(t, d, ConformalFactor(t.vertex_count(), 0.7));
  const auto a = face_angles(t, d, false);
  const auto b = face_angles(t, l, false);
  for (std::size_t f = 0; f < a.size(); ++f) {
    for (int s = 0; s < 3; ++s) EXPECT_NEAR(a[f][s], b[f][s], 1e-14);
  }
}

TEST(Curvature, RegularLatticeIsFlatInside) {
  const Triangulation t = build_hexagonal_disk(4);
  const CurvatureField k = curvature(t, PLMetric::constant(t));
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    if (!t.is_boundary_vertex(v)) EXPECT_NEAR(k[v], 0.0, 1e-14);
    EXPECT_EQ(k.boundary[v] != 0, t.is_boundary_vertex(v));
  }
  EXPECT_LT(k.sup_abs_interior(), 1e-14);
}

TEST(Curvature, GaussBonnetOnTetrahedron) {
  const Triangulation t = build_tetrahedron();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  bool saw_pseudo = false;
  for (int n = 0; n < 200; ++n) {
    ConformalFactor f(t.vertex_count());
    for (double& x : f.values) x = u(rng);
    const PLMetric l = conformal_scale(t, PLMetric::constant(t), f);
    saw_pseudo = saw_pseudo || !l.is_pl();
    EXPECT_NEAR(extended_curvature(t, l).total(), 4 * kPi, 1e-9);
  }
  EXPECT_TRUE(saw_pseudo);
}

TEST(Curvature, ExtendedWithOneFlattenedFace) {
  // Radius-one disk with one rim edge of length 2: the face it bounds gives
  // the center an extended angle of pi, the other five faces pi/3 each.
  const Triangulation t = build_hexagonal_disk(1);
  std::vector<double> len(t.edge_count(), 1.0);
  const FaceId f0 = t.vertex_faces(0).front();
  len[t.face_edge(f0, t.slot_of(f0, 0))] = 2.0;
  const PLMetric l(t, len);
  EXPECT_EQ(l.pseudo_face_count(), 1u);
  EXPECT_NEAR(extended_curvature(t, l)[0], -2 * kPi / 3, 1e-14);
}

TEST(Curvature, StandardThrowsOnPseudoMetric) {
  const Triangulation t = single_face();
  EXPECT_THROW(curvature(t, single_face_metric(t, 1, 1, 2)), GeometryError);
  try {
    face_angles(t, single_face_metric(t, 1, 1, 2), false);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.face(), 0);
  }
}

TEST(CotWeights, RightTriangleBoundaryEdgesSingleTerm) {
  const Triangulation t = single_face();
  // edge (1,2) has length 5: right angle at vertex 0.
  const EdgeWeightField w = cot_weights(t, single_face_metric(t, 3, 4, 5));
  // Edge (0,1), length 3, is opposite vertex 2 where the angle is arcsin(3/5).
  EXPECT_NEAR(w[0], 0.5 * (4.0 / 3.0), 1e-15);
  EXPECT_NEAR(w[1], 0.5 * (3.0 / 4.0), 1e-15);
  EXPECT_NEAR(w[2], 0.0, 1e-15);
}

TEST(CotWeights, LatticeInteriorEdgesAreOneOverSqrtThree) {
  const Triangulation t = build_hexagonal_disk(3);
  const EdgeWeightField w = cot_weights(t, PLMetric::constant(t));
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    const double want = t.is_boundary_edge(e) ? 0.5 / std::sqrt(3.0) : 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(w[e], want, 1e-15);
  }
}

TEST(CotWeights, GeometricOracleFromCoordinates) {
  // Cotangent of the angle at c in triangle (a, b, c) from dot/cross products.
  const int r = 3;
  const Triangulation t = build_hexagonal_disk(r);
  auto pos = hexagonal_disk_positions(r);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> j(-0.1, 0.1);
  for (auto& p : pos) {
    p[0] += j(rng);
    p[1] += j(rng);
  }
  std::vector<double> len(t.edge_count());
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    const auto& a = pos[t.edge(e).a];
    const auto& b = pos[t.edge(e).b];
    len[e] = std::hypot(a[0] - b[0], a[1] - b[1]);
  }
  const EdgeWeightField w = cot_weights(t, PLMetric(t, len));
  std::vector<double> want(t.edge_count(), 0.0);
  for (const Face& f : t.faces()) {
    for (int s = 0; s < 3; ++s) {
      const auto& c = pos[f[s]];
      const auto& a = pos[f[(s + 1) % 3]];
      const auto& b = pos[f[(s + 2) % 3]];
      const double ux = a[0] - c[0], uy = a[1] - c[1], vx = b[0] - c[0], vy = b[1] - c[1];
      const double cot = (ux * vx + uy * vy) / std::abs(ux * vy - uy * vx);
      want[static_cast<EdgeId>(t.find_edge(f[(s + 1) % 3], f[(s + 2) % 3]))] += 0.5 * cot;
    }
  }
  for (EdgeId e = 0; e < t.edge_count(); ++e) EXPECT_NEAR(w[e], want[e], 1e-12);
}

TEST(Laplacian, AnnihilatesConstantsAndMatchesDefinition) {
  const Triangulation t = build_hexagonal_disk(2);
  EdgeWeightField w;
  for (EdgeId e = 0; e < t.edge_count(); ++e) w.weights.push_back(0.1 + 0.01 * e);
  const std::vector<double> ones(t.vertex_count(), 3.5);
  for (double x : laplacian(t, w, ones)) EXPECT_EQ(x, 0.0);
  std::vector<double> f(t.vertex_count());
  for (VertexId v = 0; v < f.size(); ++v) f[v] = std::sin(1.0 + v);
  const auto lf = laplacian(t, w, f);
  for (VertexId v = 0; v < f.size(); ++v) {
    double want = 0;
    for (EdgeId e = 0; e < t.edge_count(); ++e) {
      const Edge& ed = t.edge(e);
      if (ed.a == v) want += w[e] * (f[ed.b] - f[v]);
      if (ed.b == v) want += w[e] * (f[ed.a] - f[v]);
    }
    EXPECT_NEAR(lf[v], want, 1e-14);
    EXPECT_EQ(lf[v], laplacian_at(t, w, f, v));
  }
}

TEST(AngleJacobian, ClosedFormEntries) {
  const AngleJacobian j = angle_jacobian(3, 4, 5);
  const AngleTriple th = inner_angles(3, 4, 5);
  const double c0 = 1 / std::tan(th[0]), c1 = 1 / std::tan(th[1]);
  // d theta_0 / d u_1 = cot(theta_2) / 2 = 0
  EXPECT_NEAR(j[0][1], 0.0, 1e-15);
  EXPECT_NEAR(j[0][2], 0.5 * c1, 1e-15);
  EXPECT_NEAR(j[1][2], 0.5 * c0, 1e-15);
  EXPECT_NEAR(j[2][2], -0.5 * (c0 + c1), 1e-15);
}

TEST(AngleJacobian, SymmetricWithZeroRowSums) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int n = 0; n < 1000; ++n) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (!in_omega(a, b, c, 1e-2)) continue;
    const AngleJacobian j = angle_jacobian(a, b, c);
    for (int r = 0; r < 3; ++r) {
      EXPECT_NEAR(j[r][0] + j[r][1] + j[r][2], 0.0, 1e-12);
      for (int s = 0; s < 3; ++s) EXPECT_EQ(j[r][s], j[s][r]);
    }
  }
}

TEST(AngleJacobian, MatchesFiniteDifferencesOnWellShapedTriangles) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const double h = 1e-5;
  for (int n = 0; n < 500; ++n) {
    std::array<double, 3> l{u(rng), u(rng), u(rng)};
    if (!in_omega(l[0], l[1], l[2], 0.2)) continue;
    const AngleJacobian j = angle_jacobian(l[0], l[1], l[2]);
    for (int b = 0; b < 3; ++b) {
      auto lp = l, lm = l;
      for (int a = 0; a < 3; ++a) {
        if (a == b) continue;
        lp[a] *= std::exp(h / 2);
        lm[a] *= std::exp(-h / 2);
      }
      const AngleTriple tp = inner_angles(lp[0], lp[1], lp[2]);
      const AngleTriple tm = inner_angles(lm[0], lm[1], lm[2]);
      for (int a = 0; a < 3; ++a) EXPECT_NEAR((tp[a] - tm[a]) / (2 * h), j[a][b], 1e-7);
    }
  }
}

TEST(Margins, RegularLatticeAndRightTriangle) {
  const Triangulation t = build_hexagonal_disk(3);
  const PLMetric d = PLMetric::constant(t);
  EXPECT_NEAR(nondegeneracy_margin(t, d), kPi / 3, 1e-15);
  EXPECT_NEAR(delaunay_margin(t, d), kPi / 3, 1e-14);
  const Triangulation one = single_face();
  EXPECT_NEAR(nondegeneracy_margin(one, single_face_metric(one, 3, 4, 5)), 0.6435011087932844, 1e-15);
  EXPECT_TRUE(std::isinf(delaunay_margin(one, single_face_metric(one, 3, 4, 5))));
}

TEST(Margins, NonDelaunayEdgeIsNegative) {
  // Two faces sharing edge (0,1) with opposite angles summing above pi.
  const std::vector<Face> faces{{0, 1, 2}, {0, 1, 3}};
  const Triangulation t = Triangulation::from_faces(4, faces);
  std::vector<double> len(t.edge_count(), 1.0);
  len[static_cast<EdgeId>(t.find_edge(0, 1))] = 1.9;
  EXPECT_LT(delaunay_margin(t, PLMetric(t, len)), 0.0);
}

TEST(Delta, FrozenClosedFormValue) {
  // Independent evaluation in long double.
  const long double e = std::acos(-1.0L) / 3;
  const long double s = std::sin(e);
  const long double want = std::log1p(2 * s * s / 3 * (1 - std::cos(e / 4))) / 4;
  EXPECT_NEAR(delta_of_epsilon(kPi / 3), static_cast<double>(want), 1e-17);
  // 40-digit reference: 0.0042233958298458034845889...
  EXPECT_NEAR(delta_of_epsilon(kPi / 3), 0.004223395829845804, 1e-17);
  EXPECT_NEAR(delta_of_epsilon(kPi / 3), 4.2234e-3, 1e-7);
}

TEST(Delta, SmallEpsilonAsymptotics) {
  for (double e : {1e-2, 1e-3}) EXPECT_NEAR(delta_of_epsilon(e) / std::pow(e, 4), 1.0 / 192, 1e-5);
  EXPECT_THROW(delta_of_epsilon(0.0), std::domain_error);
  EXPECT_THROW(delta_of_epsilon(1.2), std::domain_error);
}

TEST(Dirichlet, BruteForceOverVertexPairs) {
  const Triangulation t = build_hexagonal_disk(3);
  std::vector<double> u(t.vertex_count());
  for (VertexId v = 0; v < u.size(); ++v) u[v] = std::cos(0.3 * v);
  double want = 0;
  for (VertexId a = 0; a < u.size(); ++a) {
    for (VertexId b = a + 1; b < u.size(); ++b) {
      bool adjacent = false;
      for (const Face& f : t.faces()) {
        const bool ha = f[0] == a || f[1] == a || f[2] == a;
        const bool hb = f[0] == b || f[1] == b || f[2] == b;
        adjacent = adjacent || (ha && hb);
      }
      if (adjacent) want += (u[a] - u[b]) * (u[a] - u[b]);
    }
  }
  EXPECT_NEAR(dirichlet_energy(t, u), want, 1e-12);
  EXPECT_EQ(dirichlet_energy(t, std::vector<double>(u.size(), 2.0)), 0.0);
}

TEST(VertexFunction, RoundTripAndValidation) {
  const std::vector<double> f{0.1, -2.5e-300, 3.0};
  std::stringstream buf;
  write_vertex_function(buf, f);
  EXPECT_EQ(read_vertex_function(buf, 3), f);
  std::istringstream missing("0 1\n2 3\n");
  EXPECT_THROW(read_vertex_function(missing, 3), std::runtime_error);
  std::istringstream twice("0 1\n0 1\n1 1\n2 1\n");
  EXPECT_THROW(read_vertex_function(twice, 3), std::runtime_error);
}

TEST(Parallel, FaceAnglesIndependentOfWorkerCount) {
  const Triangulation t = build_hexagonal_disk(40);
  std::vector<double> len(t.edge_count());
  for (EdgeId e = 0; e < len.size(); ++e) len[e] = 1.0 + 0.05 * std::sin(0.7 * e);
  const PLMetric d(t, len);
  set_worker_count(1);
  const auto serial = face_angles(t, d, false);
  set_worker_count(4);
  const auto parallel = face_angles(t, d, false);
  set_worker_count(1);
  EXPECT_EQ(serial, parallel);
}
