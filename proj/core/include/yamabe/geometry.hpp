#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "yamabe/mesh.hpp"

namespace yamabe {

inline constexpr double kPi = std::numbers::pi;

/// Thrown for lengths or faces outside the domain of an operation: a face
/// violating the triangle inequalities where a Euclidean triangle is needed,
/// nonpositive lengths, or overflow of a conformal scaling.
class GeometryError : public std::domain_error {
 public:
  explicit GeometryError(const std::string& what, std::int64_t face = -1, std::int64_t edge = -1)
      : std::domain_error(what), face_(face), edge_(edge) {}
  std::int64_t face() const noexcept { return face_; }
  std::int64_t edge() const noexcept { return edge_; }

 private:
  std::int64_t face_;
  std::int64_t edge_;
};

/// Angles of one face, indexed by face slot: entry s is the angle at the
/// face's s-th vertex, opposite the edge `face_edge(f, s)`.
using AngleTriple = std::array<double, 3>;

/// Strict triangle inequalities. With `rel_tol > 0` each inequality must hold
/// with slack `rel_tol * (sum of the two shorter sides)`.
bool in_omega(double l1, double l2, double l3, double rel_tol = 0.0);

/// Positive edge lengths on a fixed triangulation, with a per-face flag for
/// whether the face is a genuine Euclidean triangle. Faces without that flag
/// make this a pseudo PL metric.
class PLMetric {
 public:
  PLMetric() = default;
  PLMetric(const Triangulation& t, std::vector<double> lengths);
  static PLMetric constant(const Triangulation& t, double length = 1.0);

  double operator[](EdgeId e) const { return lengths_[e]; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::size_t size() const { return lengths_.size(); }

  /// Lengths of face `f` by slot (entry s is opposite the s-th vertex).
  std::array<double, 3> face_lengths(const Triangulation& t, FaceId f) const {
    return {lengths_[t.face_edge(f, 0)], lengths_[t.face_edge(f, 1)], lengths_[t.face_edge(f, 2)]};
  }
  bool face_in_omega(FaceId f) const { return in_omega_[f] != 0; }
  bool is_pl() const { return pseudo_faces_ == 0; }
  std::size_t pseudo_face_count() const { return pseudo_faces_; }
  std::optional<FaceId> first_pseudo_face() const;

 private:
  std::vector<double> lengths_;
  std::vector<std::uint8_t> in_omega_;
  std::size_t pseudo_faces_ = 0;
};

/// Per-vertex logarithmic scale factor.
struct ConformalFactor {
  std::vector<double> values;

  ConformalFactor() = default;
  explicit ConformalFactor(std::size_t n, double value = 0.0) : values(n, value) {}
  explicit ConformalFactor(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double operator[](VertexId v) const { return values[v]; }
  double& operator[](VertexId v) { return values[v]; }
  operator std::span<const double>() const { return values; }
};

/// Per-edge weight. Cotangent weights are negative on non-Delaunay edges; the
/// field keeps the sign and leaves the policy to callers.
struct EdgeWeightField {
  std::vector<double> weights;

  double operator[](EdgeId e) const { return weights[e]; }
  double min() const;
  double max() const;
};

/// Angle defect per vertex. Boundary vertices carry the same 2*pi defect value
/// and are flagged.
struct CurvatureField {
  std::vector<double> values;
  std::vector<std::uint8_t> boundary;

  double operator[](VertexId v) const { return values[v]; }
  /// max |K| over vertices that are neither boundary nor listed in `skip`.
  double sup_abs_interior(std::span<const std::uint8_t> skip = {}) const;
  double total() const;
};

/// l_ij * exp((u_i + u_j) / 2) on every edge.
PLMetric conformal_scale(const Triangulation& t, const PLMetric& d, const ConformalFactor& u);

/// Inner angles of a Euclidean triangle; angle s is opposite side s.
/// Throws GeometryError unless the lengths lie in Omega.
AngleTriple inner_angles(double l1, double l2, double l3);

/// Continuous extension of inner_angles to all positive lengths: a side at
/// least as long as the other two combined gets angle pi, the others 0.
AngleTriple extended_angles(double l1, double l2, double l3);

/// Angles of every face, by slot. `extended` selects extended_angles;
/// otherwise a pseudo face throws GeometryError carrying the face id.
std::vector<AngleTriple> face_angles(const Triangulation& t, const PLMetric& l, bool extended);

CurvatureField curvature_from_angles(const Triangulation& t, std::span<const AngleTriple> angles);
CurvatureField curvature(const Triangulation& t, const PLMetric& l);
CurvatureField extended_curvature(const Triangulation& t, const PLMetric& l);

/// Half the sum of the cotangents of the angles opposite each edge (one term
/// on boundary edges). Requires every face to be a Euclidean triangle.
EdgeWeightField cot_weights(const Triangulation& t, const PLMetric& l);
EdgeWeightField cot_weights_from_angles(const Triangulation& t, std::span<const AngleTriple> angles);

/// (Delta_w f)_i = sum_j w_ij (f_j - f_i), summed in ascending neighbor order.
std::vector<double> laplacian(const Triangulation& t, const EdgeWeightField& w,
                              std::span<const double> f);
double laplacian_at(const Triangulation& t, const EdgeWeightField& w, std::span<const double> f,
                    VertexId v);

/// d(theta_a)/d(u_b) for a single face, slots as in inner_angles.
using AngleJacobian = std::array<std::array<double, 3>, 3>;
AngleJacobian angle_jacobian(double l1, double l2, double l3);

struct Margins {
  double nondegeneracy;  // min angle over all face corners
  double delaunay;       // min over interior edges of pi - (sum of opposite angles)
};

/// Margins from precomputed (possibly extended) face angles. The Delaunay
/// margin of a mesh without interior edges is +infinity.
Margins margins_from_angles(const Triangulation& t, std::span<const AngleTriple> angles);
double nondegeneracy_margin(const Triangulation& t, const PLMetric& l);
double delaunay_margin(const Triangulation& t, const PLMetric& l);

/// Radius of the sup-norm ball of conformal factors that moves no angle of an
/// eps-nondegenerate triangle by more than eps / 2.
/// delta = log(1 + (2 sin^2(eps) / 3) (1 - cos(eps / 4))) / 4, for 0 < eps <= pi/3.
double delta_of_epsilon(double eps);

/// Sum over edges of (u_i - u_j)^2.
double dirichlet_energy(const Triangulation& t, std::span<const double> u);

/// Two-column `<vertex-id> <value>` text, one vertex per line.
void write_vertex_function(std::ostream& out, std::span<const double> f);
/// Reads a two-column vertex function for a mesh with `vertex_count`
/// vertices. Every vertex must appear exactly once.
std::vector<double> read_vertex_function(std::istream& in, std::size_t vertex_count);

}  // namespace yamabe
