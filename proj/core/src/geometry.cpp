#include "yamabe/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "yamabe/parallel.hpp"

namespace yamabe {

bool in_omega(double l1, double l2, double l3, double rel_tol) {
  if (!(l1 > 0 && l2 > 0 && l3 > 0)) return false;
  const double s23 = l2 + l3, s13 = l1 + l3, s12 = l1 + l2;
  return l1 < s23 - rel_tol * s23 && l2 < s13 - rel_tol * s13 && l3 < s12 - rel_tol * s12;
}

PLMetric::PLMetric(const Triangulation& t, std::vector<double> lengths)
    : lengths_(std::move(lengths)) {
  if (lengths_.size() != t.edge_count()) {
    throw std::invalid_argument("PL metric needs one length per edge (" +
                                std::to_string(t.edge_count()) + "), got " +
                                std::to_string(lengths_.size()));
  }
  for (EdgeId e = 0; e < lengths_.size(); ++e) {
    if (!(lengths_[e] > 0) || !std::isfinite(lengths_[e])) {
      throw GeometryError("edge " + std::to_string(e) + " has nonpositive or non-finite length",
                          -1, e);
    }
  }
  in_omega_.resize(t.face_count());
  for (FaceId f = 0; f < t.face_count(); ++f) {
    const auto l = face_lengths(t, f);
    in_omega_[f] = in_omega(l[0], l[1], l[2]) ? 1 : 0;
    if (!in_omega_[f]) ++pseudo_faces_;
  }
}

PLMetric PLMetric::constant(const Triangulation& t, double length) {
  return PLMetric(t, std::vector<double>(t.edge_count(), length));
}

std::optional<FaceId> PLMetric::first_pseudo_face() const {
  for (FaceId f = 0; f < in_omega_.size(); ++f) {
    if (!in_omega_[f]) return f;
  }
  return std::nullopt;
}

double EdgeWeightField::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double w : weights) m = std::min(m, w);
  return m;
}

double EdgeWeightField::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double w : weights) m = std::max(m, w);
  return m;
}

double CurvatureField::sup_abs_interior(std::span<const std::uint8_t> skip) const {
  double m = 0.0;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (boundary[v]) continue;
    if (!skip.empty() && skip[v]) continue;
    m = std::max(m, std::abs(values[v]));
  }
  return m;
}

double CurvatureField::total() const {
  double s = 0.0;
  for (double k : values) s += k;
  return s;
}

PLMetric conformal_scale(const Triangulation& t, const PLMetric& d, const ConformalFactor& u) {
  if (u.size() != t.vertex_count()) {
    throw std::invalid_argument("conformal factor size does not match vertex count");
  }
  std::vector<double> out(t.edge_count());
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    const Edge& ed = t.edge(e);
    const double ui = u[ed.a], uj = u[ed.b];
    if (!std::isfinite(ui) || !std::isfinite(uj)) {
      throw GeometryError("non-finite conformal factor on edge " + std::to_string(e), -1, e);
    }
    const double l = std::exp(0.5 * (ui + uj)) * d[e];
    if (!std::isfinite(l) || !(l > 0)) {
      throw GeometryError("conformal scaling overflows on edge (" + std::to_string(ed.a) + ", " +
                              std::to_string(ed.b) + ")",
                          -1, e);
    }
    out[e] = l;
  }
  return PLMetric(t, std::move(out));
}

AngleTriple inner_angles(double l1, double l2, double l3) {
  if (!in_omega(l1, l2, l3)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lengths (" << l1 << ", " << l2 << ", " << l3 << ") violate the triangle inequalities";
    throw GeometryError(msg.str());
  }
  const std::array<double, 3> l{l1, l2, l3};
  // The two angles opposite the shorter sides are below pi/2 and are taken
  // from the cosine law in atan2 form; the largest angle closes the sum.
  int big = 0;
  if (l[1] > l[big]) big = 1;
  if (l[2] > l[big]) big = 2;
  const int s1 = (big + 1) % 3, s2 = (big + 2) % 3;

  // Four times the area, in Kahan's ordering (a >= b >= c).
  std::array<double, 3> srt = l;
  std::sort(srt.begin(), srt.end(), std::greater<>());
  const double a = srt[0], b = srt[1], c = srt[2];
  const double area4 = std::sqrt((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c)));

  auto angle_opposite = [&](int s) {
    const double p = l[(s + 1) % 3], q = l[(s + 2) % 3];
    return std::atan2(area4, (p - l[s]) * (p + l[s]) + q * q);
  };
  AngleTriple th{};
  th[s1] = angle_opposite(s1);
  th[s2] = angle_opposite(s2);
  th[big] = kPi - th[s1] - th[s2];
  return th;
}

AngleTriple extended_angles(double l1, double l2, double l3) {
  if (!(l1 > 0 && l2 > 0 && l3 > 0) || !std::isfinite(l1) || !std::isfinite(l2) ||
      !std::isfinite(l3)) {
    throw GeometryError("extended angles need positive finite lengths");
  }
  if (l1 >= l2 + l3) return {kPi, 0.0, 0.0};
  if (l2 >= l1 + l3) return {0.0, kPi, 0.0};
  if (l3 >= l1 + l2) return {0.0, 0.0, kPi};
  return inner_angles(l1, l2, l3);
}

std::vector<AngleTriple> face_angles(const Triangulation& t, const PLMetric& l, bool extended) {
  if (!extended) {
    if (auto f = l.first_pseudo_face()) {
      throw GeometryError("face " + std::to_string(*f) +
                              " violates the triangle inequalities; use the extended angles",
                          *f);
    }
  }
  std::vector<AngleTriple> out(t.face_count());
  parallel_for(t.face_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const auto fl = l.face_lengths(t, static_cast<FaceId>(f));
      out[f] = extended ? extended_angles(fl[0], fl[1], fl[2]) : inner_angles(fl[0], fl[1], fl[2]);
    }
  });
  return out;
}

CurvatureField curvature_from_angles(const Triangulation& t, std::span<const AngleTriple> angles) {
  CurvatureField k;
  k.values.resize(t.vertex_count());
  k.boundary.resize(t.vertex_count());
  parallel_for(t.vertex_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto v = static_cast<VertexId>(i);
      double sum = 0.0;
      for (FaceId f : t.vertex_faces(v)) sum += angles[f][t.slot_of(f, v)];
      k.values[v] = 2.0 * kPi - sum;
      k.boundary[v] = t.is_boundary_vertex(v) ? 1 : 0;
    }
  });
  return k;
}

CurvatureField curvature(const Triangulation& t, const PLMetric& l) {
  return curvature_from_angles(t, face_angles(t, l, false));
}

CurvatureField extended_curvature(const Triangulation& t, const PLMetric& l) {
  return curvature_from_angles(t, face_angles(t, l, true));
}

EdgeWeightField cot_weights_from_angles(const Triangulation& t,
                                        std::span<const AngleTriple> angles) {
  EdgeWeightField w;
  w.weights.assign(t.edge_count(), 0.0);
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    double sum = 0.0;
    for (FaceId f : t.edge_faces(e)) {
      if (f == kNoFace) continue;
      int slot = 0;
      while (t.face_edge(f, slot) != e) ++slot;
      const double th = angles[f][slot];
      if (!(th > 0.0 && th < kPi)) {
        throw GeometryError("cotangent weight undefined: face " + std::to_string(f) +
                                " is degenerate",
                            f, e);
      }
      sum += 1.0 / std::tan(th);
    }
    w.weights[e] = 0.5 * sum;
  }
  return w;
}

EdgeWeightField cot_weights(const Triangulation& t, const PLMetric& l) {
  return cot_weights_from_angles(t, face_angles(t, l, false));
}

double laplacian_at(const Triangulation& t, const EdgeWeightField& w, std::span<const double> f,
                    VertexId v) {
  double s = 0.0;
  for (const Neighbor& n : t.neighbors(v)) s += w[n.edge] * (f[n.vertex] - f[v]);
  return s;
}

std::vector<double> laplacian(const Triangulation& t, const EdgeWeightField& w,
                              std::span<const double> f) {
  if (w.weights.size() != t.edge_count()) {
    throw std::invalid_argument("weight field does not cover every edge");
  }
  if (f.size() != t.vertex_count()) {
    throw std::invalid_argument("vertex function size does not match vertex count");
  }
  std::vector<double> out(t.vertex_count());
  for (VertexId v = 0; v < t.vertex_count(); ++v) out[v] = laplacian_at(t, w, f, v);
  return out;
}

AngleJacobian angle_jacobian(double l1, double l2, double l3) {
  const AngleTriple th = inner_angles(l1, l2, l3);
  const std::array<double, 3> half_cot{0.5 / std::tan(th[0]), 0.5 / std::tan(th[1]),
                                       0.5 / std::tan(th[2])};
  AngleJacobian j{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      j[a][b] = a == b ? -(half_cot[(a + 1) % 3] + half_cot[(a + 2) % 3]) : half_cot[3 - a - b];
    }
  }
  return j;
}

Margins margins_from_angles(const Triangulation& t, std::span<const AngleTriple> angles) {
  Margins m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const AngleTriple& a : angles) m.nondegeneracy = std::min({m.nondegeneracy, a[0], a[1], a[2]});
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    if (t.is_boundary_edge(e)) continue;
    double opposite = 0.0;
    for (FaceId f : t.edge_faces(e)) {
      int slot = 0;
      while (t.face_edge(f, slot) != e) ++slot;
      opposite += angles[f][slot];
    }
    m.delaunay = std::min(m.delaunay, kPi - opposite);
  }
  return m;
}

double nondegeneracy_margin(const Triangulation& t, const PLMetric& l) {
  return margins_from_angles(t, face_angles(t, l, false)).nondegeneracy;
}

double delaunay_margin(const Triangulation& t, const PLMetric& l) {
  return margins_from_angles(t, face_angles(t, l, false)).delaunay;
}

double delta_of_epsilon(double eps) {
  if (!(eps > 0.0) || eps > kPi / 3.0 + 1e-15) {
    throw std::domain_error("delta_of_epsilon: eps must lie in (0, pi/3]");
  }
  const double s = std::sin(eps);
  return 0.25 * std::log1p((2.0 * s * s / 3.0) * (1.0 - std::cos(eps / 4.0)));
}

double dirichlet_energy(const Triangulation& t, std::span<const double> u) {
  if (u.size() != t.vertex_count()) {
    throw std::invalid_argument("vertex function size does not match vertex count");
  }
  double e = 0.0;
  for (const Edge& ed : t.edges()) {
    const double d = u[ed.a] - u[ed.b];
    e += d * d;
  }
  return e;
}

void write_vertex_function(std::ostream& out, std::span<const double> f) {
  char buf[64];
  for (std::size_t v = 0; v < f.size(); ++v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, f[v]);
    out << v << ' ' << std::string_view(buf, ptr - buf) << '\n';
  }
}

std::vector<double> read_vertex_function(std::istream& in, std::size_t vertex_count) {
  std::vector<double> f(vertex_count, 0.0);
  std::vector<std::uint8_t> seen(vertex_count, 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    long long id = -1;
    double value = 0;
    std::string extra;
    try {
      std::size_t used = 0;
      id = std::stoll(first, &used);
      if (used != first.size()) id = -1;
    } catch (const std::exception&) {
      id = -1;
    }
    if (id < 0 || !(ls >> value) || (ls >> extra) || !std::isfinite(value)) {
      throw std::runtime_error("vertex function line " + std::to_string(line_no) +
                               ": expected '<vertex-id> <value>'");
    }
    if (static_cast<std::size_t>(id) >= vertex_count) {
      throw std::runtime_error("vertex function line " + std::to_string(line_no) +
                               ": vertex id out of range");
    }
    if (seen[id]) {
      throw std::runtime_error("vertex function line " + std::to_string(line_no) +
                               ": vertex listed twice");
    }
    seen[id] = 1;
    f[id] = value;
  }
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!seen[v]) throw std::runtime_error("vertex function missing vertex " + std::to_string(v));
  }
  return f;
}

}  // namespace yamabe
