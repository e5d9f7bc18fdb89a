#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "yamabe/geometry.hpp"
#include "yamabe/mesh.hpp"

namespace yamabe {

enum class FlowVariant {
  kStandard,       // du/dt = -K, halts when a face leaves Omega
  kExtended,       // du/dt = -K~ with extended angles, total on positive lengths
  kSemilinearHex,  // du/dt = Delta_c u + F(Du) on the regular triangular lattice
};

std::string_view to_string(FlowVariant v);
/// Accepts "standard", "extended", "semilinear" (or "semilinear_hex").
FlowVariant parse_flow_variant(std::string_view name);

/// Constant edge weight of the lattice Laplacian in the semilinear form.
inline const double kHexLaplacianWeight = std::sqrt(3.0) / 3.0;

struct FlowProblem {
  Triangulation mesh;
  PLMetric metric;          // the fixed background metric d
  ConformalFactor initial;  // u(0)
  FlowVariant variant = FlowVariant::kStandard;
  std::vector<std::uint8_t> pinned;  // per vertex; pinned vertices keep u(0)

  /// Builds and validates a problem. `pinned` lists vertex ids.
  static FlowProblem make(Triangulation mesh, PLMetric metric, ConformalFactor initial,
                          FlowVariant variant, std::span<const VertexId> pinned);
  /// Same, pinning every boundary vertex of `mesh`.
  static FlowProblem with_boundary_pinned(Triangulation mesh, PLMetric metric,
                                          ConformalFactor initial, FlowVariant variant);

  /// Throws std::invalid_argument on size mismatches, a standard-variant
  /// problem whose initial metric is not PL, or a semilinear problem that is
  /// not a unit-length lattice with degree-6 free vertices.
  void validate() const;
  bool is_pinned(VertexId v) const { return pinned[v] != 0; }
};

struct FlowState {
  double t = 0.0;
  ConformalFactor u;
};

/// A face left Omega during a standard-variant evaluation.
class DegenerationError : public std::runtime_error {
 public:
  DegenerationError(FaceId face, double time);
  FaceId face() const noexcept { return face_; }
  double time() const noexcept { return time_; }

 private:
  FaceId face_;
  double time_;
};

/// Relative slack used when testing faces for Omega membership along a flow.
inline constexpr double kDegenerationTolerance = 1e-12;

/// -K_i at free vertices, 0 at pinned ones. Throws DegenerationError when a
/// face of u*d fails the triangle inequalities at tolerance 1e-12.
std::vector<double> rhs_standard(const FlowProblem& p, const FlowState& s);
/// -K~_i at free vertices via extended angles; never throws on pseudo metrics.
std::vector<double> rhs_extended(const FlowProblem& p, const FlowState& s);
/// Delta_c u_i + sum over faces of F~(u_j - u_i, u_k - u_i) at free vertices.
std::vector<double> semilinear_rhs(const FlowProblem& p, const FlowState& s);
/// Dispatches on p.variant.
std::vector<double> flow_rhs(const FlowProblem& p, const FlowState& s);

/// Angle at the apex of a lattice triangle whose other two vertices carry
/// conformal factors offset by x and y from the apex.
double lattice_angle(double x, double y);
/// lattice_angle(x, y) - pi/3 - (sqrt(3)/6)(x + y); second order at 0.
double lattice_angle_remainder(double x, double y);

/// Right-hand side y' = f(t, y) written into `dydt`.
using RhsFunction =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// One classical 4-stage Runge-Kutta step, in place.
void rk4_step(const RhsFunction& f, double t, std::span<double> y, double h);

/// One RK4 step of the flow. Pinned entries are copied, not updated.
FlowState step(const FlowProblem& p, const FlowState& s, double h);

struct Schedule {
  double h = 1e-2;
  double t_max = 10.0;
  std::size_t sample_stride = 1;
  double stop_tolerance = 1e-6;  // <= 0 disables the curvature stop
  bool keep_states = false;      // store u at every sample
  std::vector<VertexId> trace_vertices;
};

struct Sample {
  double t;
  double sup_k;       // max |K| over free, non-boundary vertices
  double l2_u;        // sqrt(sum u_i^2)
  double dirichlet;   // sum over edges (u_i - u_j)^2
  double ndg_margin;  // min angle
  double del_margin;  // min over interior edges of pi - opposite angle sum
};

struct TraceRow {
  double t;
  VertexId vertex;
  double u;
  double k;
};

struct TimeSeries {
  std::vector<Sample> samples;
  std::vector<std::vector<double>> states;  // filled when keep_states
  std::vector<TraceRow> traces;

  /// Header `t,sup_K,l2_u,dirichlet,ndg_margin,del_margin`.
  void write_csv(std::ostream& out) const;
  /// Header `t,vid,u,K`.
  void write_trace_csv(std::ostream& out) const;
};

enum class StopReason { kReachedTMax, kConverged, kDegenerated };
std::string_view to_string(StopReason r);

struct Degeneration {
  double t_lo;  // last accepted time
  double t_hi;  // end of the failing step
  FaceId face;
};

struct FlowRun {
  TimeSeries series;
  FlowState final_state;
  StopReason reason = StopReason::kReachedTMax;
  std::optional<Degeneration> degeneration;
  std::size_t steps = 0;
};

/// Samples the state described by `u` (time t) the way integrate() does.
Sample sample_state(const FlowProblem& p, double t, std::span<const double> u);

/// Fixed-step RK4 from u(0) until t_max or until the interior curvature drops
/// below the stop tolerance. A standard-variant degeneration halts the run
/// and is reported in the result rather than thrown.
FlowRun integrate(const FlowProblem& p, const Schedule& schedule);

/// delta(eps) / ((2 + M) pi): time during which |u| stays below delta(eps)
/// given |du/dt| <= (2 + M) pi.
double existence_time_estimate(double eps, int max_degree);

class InterpolationError : public GeometryError {
 public:
  InterpolationError(double s, FaceId face);
  double s() const noexcept { return s_; }

 private:
  double s_;
};

struct InterpolatedWeights {
  EdgeWeightField weights;     // integral over s of mu(s u + (1 - s) u_hat)
  double min;                  // over all edges
  double max;
  double min_delaunay_margin;  // over every quadrature node
  double min_angle;            // over every quadrature node
};

/// Composite midpoint rule along the segment of conformal factors from
/// u_hat (s = 0) to u (s = 1).
InterpolatedWeights interpolation_weights(const FlowProblem& p, const ConformalFactor& u,
                                          const ConformalFactor& u_hat,
                                          int quadrature_points = 16);

}  // namespace yamabe
