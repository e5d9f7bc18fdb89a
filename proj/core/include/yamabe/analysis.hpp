#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "yamabe/flow.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/mesh.hpp"

namespace yamabe {

/// Outcome of one verification. `passed` is `deviation <= tolerance` unless
/// the check documents extra conditions in `detail`.
struct CheckReport {
  std::string name;
  bool passed = false;
  bool applicable = true;  // false when a hypothesis of the check did not hold
  double deviation = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::string detail;
};

std::string to_json(const CheckReport& r);
/// {"seed": ..., "passed": ..., "reports": [...]}
std::string to_json(std::span<const CheckReport> reports, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Random inputs shared by checks, tests and the CLI.

/// Side lengths of a random triangle whose angles are all >= min_angle,
/// scaled by a random factor in [0.5, 2]. Requires 0 <= min_angle < pi/3.
std::array<double, 3> random_triangle(std::mt19937_64& rng, double min_angle);

/// Random conformal factor supported on vertices within graph distance
/// `support_radius` of `center` (never on boundary vertices), rescaled to
/// the requested l2 norm. A zero norm gives the zero factor.
ConformalFactor random_bump(const Triangulation& t, VertexId center, int support_radius,
                            double l2_norm, std::uint64_t seed);

/// Same support rule, values uniform in [-amplitude, amplitude].
ConformalFactor random_uniform_bump(const Triangulation& t, VertexId center, int support_radius,
                                    double amplitude, std::uint64_t seed);

/// Unit lengths jittered by a factor 1 + jitter * U(-1, 1) on every edge.
PLMetric jittered_metric(const Triangulation& t, double jitter, std::uint64_t seed);

/// Vertices at graph distance >= 2 from every pinned vertex (all vertices
/// when nothing is pinned and the mesh is closed).
std::vector<VertexId> deep_interior(const FlowProblem& p);

// ---------------------------------------------------------------------------
// Checks.

/// Closed-form angle Jacobian against central differences of the angles
/// under conformal perturbation, plus symmetry of the Jacobian.
CheckReport check_variational_identity(std::size_t samples, std::uint64_t seed,
                                       double min_angle = 0.05, double fd_step = 1e-5,
                                       double tolerance = 1e-6);

/// Sup over deep-interior vertices and interior samples of
/// |centered dK/dt - Delta_mu K|. `run` must come from integrate() with
/// keep_states and sample_stride 1 on a standard-variant problem.
CheckReport check_curvature_evolution(const FlowProblem& p, const FlowRun& run,
                                      double tolerance = 1e-4);

/// Runs `p` at h and h/2 to t_max and compares curvature-evolution
/// deviations: passes when deviation(h) < tolerance and the ratio lies in
/// [ratio_lo, ratio_hi].
CheckReport curvature_evolution_study(const FlowProblem& p, double h, double t_max,
                                      double tolerance = 1e-4, double ratio_lo = 3.0,
                                      double ratio_hi = 5.0);

/// Sum of extended curvatures against 2 pi chi on a closed mesh, for `d`
/// and for `rescalings` random conformal factors uniform in
/// [-u_range, u_range] (large ranges produce pseudo metrics).
CheckReport check_gauss_bonnet(const Triangulation& closed, const PLMetric& d,
                               std::size_t rescalings, std::uint64_t seed,
                               double u_range = 2.0, double tolerance = 1e-9);

/// Paths l1 -> l2 + l3 from inside Omega: monotone approach to (pi, 0, 0),
/// exact (pi, 0, 0) on and beyond the boundary, angle sums equal to pi, and
/// bitwise agreement of extended and inner angles inside Omega.
CheckReport check_angle_continuity(std::size_t paths, std::uint64_t seed,
                                   double tolerance = 1e-10);

/// Random eps-nondegenerate triangles perturbed by conformal factors of sup
/// norm delta(eps): deviation is the largest angle change divided by eps/2.
CheckReport check_delta_bound(std::size_t samples, std::uint64_t seed);

/// Standard flow from u = 0 on jittered lattice metrics, run to the
/// existence-time estimate T0(eps, M); no run may degenerate and the angle
/// and Delaunay margins must stay >= eps/2.
CheckReport check_existence_time(std::size_t experiments, std::uint64_t seed, int radius = 4,
                                 double jitter = 0.1);

/// Extended flow on a lattice disk whose metric contains a (2, 1, 1) face:
/// must reach t_max with every face's extended angle sum within tolerance
/// of pi at every step.
CheckReport check_extended_global_existence(int radius = 4, double t_max = 10.0, double h = 1e-2,
                                            double tolerance = 1e-9);

/// Time-dependent nonnegative edge weights.
using WeightSchedule = std::function<void(double t, std::span<double> weights)>;

/// Smooth random schedule w_e(t) = a_e (1 + sin(b_e t + c_e)) / 2 with row
/// sums bounded by row_sum_bound.
WeightSchedule random_weight_schedule(const Triangulation& graph, double row_sum_bound,
                                      std::uint64_t seed);

/// Integrates df/dt = Delta_w(t) f from f0 to `horizon` with RK4 step h.
/// With f0 == 0 the deviation is sup |f|; otherwise it is how far max f
/// rises above max(0, max f0). Throws std::invalid_argument when a weight is
/// negative or a row sum exceeds row_sum_bound.
CheckReport max_principle_test(const Triangulation& graph, const WeightSchedule& weights,
                               std::span<const double> f0, double horizon, double h,
                               double row_sum_bound);

/// Both forms of max_principle_test over `seeds` random schedules on a
/// lattice disk.
CheckReport check_max_principle(std::size_t seeds, std::uint64_t seed, double row_sum_bound = 10.0,
                                double horizon = 10.0);

/// Sup over common sample times of sup_v |u_a - u_b|, with the interpolated
/// Delaunay hypothesis checked at up to `hypothesis_times` sample times.
/// Runs need keep_states. When the hypothesis fails the report is marked
/// not applicable instead of failed.
CheckReport uniqueness_gap(const FlowProblem& p, const FlowRun& run_a, const FlowRun& run_b,
                           double tolerance, std::size_t hypothesis_times = 10);

/// Uniqueness surrogate on a perturbed lattice disk: the gap between the h
/// and h/2 runs over the gap between h/2 and h/4 (coarse h), and the gap
/// between fine_h and fine_h/2.
CheckReport uniqueness_study(const FlowProblem& p, double coarse_h, double fine_h, double t_max,
                             double fine_tolerance = 1e-8, double ratio_lo = 12.0,
                             double ratio_hi = 20.0);

/// Centered difference of ||u||^2 plus (sqrt(3)/3) E(u) at interior samples
/// must stay <= 1e-8 + h^2 ||u(0)||^2, and ||u|| must not increase. Needs a
/// unit-lattice problem and a run with uniform sample spacing.
CheckReport energy_monotonicity_check(const FlowProblem& p, const FlowRun& run);

struct ExhaustionLevelTrace {
  std::size_t level = 0;  // 1-based
  std::size_t vertex_count = 0;
  std::map<VertexId, std::vector<double>> traces;  // base vertex -> u on the grid
};

struct ExhaustionReport {
  std::vector<double> times;
  std::vector<ExhaustionLevelTrace> levels;
  VertexId center = 0;
  std::vector<double> successive_sup_diff;  // at the center, level k vs k+1
  bool decay_monotone = false;              // expectation, not asserted
};

std::string to_json(const ExhaustionReport& r);

/// Runs the boundary-pinned flow on each exhaustion level of `base` around
/// `center` and tracks u at `tracked` base vertices (the center is always
/// tracked). The curvature stop of `schedule` is disabled so every level
/// shares one time grid. Throws DegenerationError when a standard-variant
/// level degenerates.
ExhaustionReport exhaustion_convergence_report(const Triangulation& base,
                                               const PLMetric& base_metric,
                                               const ConformalFactor& base_initial,
                                               VertexId center, std::size_t levels,
                                               const Schedule& schedule,
                                               FlowVariant variant = FlowVariant::kStandard,
                                               std::span<const VertexId> tracked = {});

struct ConvergenceResult {
  CheckReport report;
  FlowRun run;
};

/// Flow from a small random perturbation phi of the regular lattice metric on
/// a disk of the given radius, phi supported within radius/2 of the center.
/// Checks angle >= pi/6 and opposite-angle sums <= 5 pi/6 at every sample,
/// Dirichlet energy below 1e-8 and sup |K| below 1e-6 at termination before
/// t_max, plus energy_monotonicity_check.
ConvergenceResult convergence_experiment(int radius, double phi_norm, std::uint64_t seed,
                                         const Schedule& schedule);

/// Delta_c u + F(Du) against -K at the free vertices of a lattice disk for
/// random u with sup norm <= amplitude.
CheckReport check_semilinear_identity(std::size_t samples, std::uint64_t seed, int radius = 4,
                                      double amplitude = 0.3, double tolerance = 1e-10);

/// Suite selectors accepted by run_suite.
const std::vector<std::string>& suite_names();
/// Runs one named suite (or "all") with default sizes.
std::vector<CheckReport> run_suite(std::string_view selector, std::uint64_t seed);

}  // namespace yamabe
