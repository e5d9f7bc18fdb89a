#include "yamabe/flow.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "yamabe/parallel.hpp"

namespace yamabe {

std::string_view to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::kStandard: return "standard";
    case FlowVariant::kExtended: return "extended";
    case FlowVariant::kSemilinearHex: return "semilinear";
  }
  return "unknown";
}

FlowVariant parse_flow_variant(std::string_view name) {
  if (name == "standard") return FlowVariant::kStandard;
  if (name == "extended") return FlowVariant::kExtended;
  if (name == "semilinear" || name == "semilinear_hex") return FlowVariant::kSemilinearHex;
  throw std::invalid_argument("unknown flow variant '" + std::string(name) + "'");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kReachedTMax: return "t_max";
    case StopReason::kConverged: return "converged";
    case StopReason::kDegenerated: return "degenerated";
  }
  return "unknown";
}

FlowProblem FlowProblem::make(Triangulation mesh, PLMetric metric, ConformalFactor initial,
                              FlowVariant variant, std::span<const VertexId> pinned) {
  FlowProblem p;
  p.pinned.assign(mesh.vertex_count(), 0);
  for (VertexId v : pinned) {
    if (v >= mesh.vertex_count()) throw std::invalid_argument("pinned vertex not in mesh");
    p.pinned[v] = 1;
  }
  p.mesh = std::move(mesh);
  p.metric = std::move(metric);
  p.initial = std::move(initial);
  p.variant = variant;
  p.validate();
  return p;
}

FlowProblem FlowProblem::with_boundary_pinned(Triangulation mesh, PLMetric metric,
                                              ConformalFactor initial, FlowVariant variant) {
  const std::vector<VertexId> boundary = mesh.boundary_vertices();
  return make(std::move(mesh), std::move(metric), std::move(initial), variant, boundary);
}

void FlowProblem::validate() const {
  if (metric.size() != mesh.edge_count()) {
    throw std::invalid_argument("metric does not match the mesh edge count");
  }
  if (initial.size() != mesh.vertex_count()) {
    throw std::invalid_argument("initial conformal factor does not match the vertex count");
  }
  if (pinned.size() != mesh.vertex_count()) {
    throw std::invalid_argument("pinned flags do not match the vertex count");
  }
  for (double x : initial.values) {
    if (!std::isfinite(x)) throw std::invalid_argument("initial conformal factor is not finite");
  }
  if (variant == FlowVariant::kStandard || variant == FlowVariant::kSemilinearHex) {
    if (auto f = metric.first_pseudo_face()) {
      throw std::invalid_argument("metric is not a PL metric: face " + std::to_string(*f) +
                                  " violates the triangle inequalities");
    }
    const PLMetric start = conformal_scale(mesh, metric, initial);
    if (auto f = start.first_pseudo_face()) {
      throw std::invalid_argument("initial metric u(0)*d is not a PL metric: face " +
                                  std::to_string(*f) + " violates the triangle inequalities");
    }
  }
  if (variant == FlowVariant::kSemilinearHex) {
    for (double l : metric.lengths()) {
      if (l != 1.0) throw std::invalid_argument("semilinear variant needs the unit lattice metric");
    }
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
      if (pinned[v]) continue;
      if (mesh.is_boundary_vertex(v) || mesh.degree(v) != 6 || mesh.vertex_faces(v).size() != 6) {
        throw std::invalid_argument("semilinear variant: free vertex " + std::to_string(v) +
                                    " is not an interior degree-6 lattice vertex");
      }
    }
  }
}

DegenerationError::DegenerationError(FaceId face, double time)
    : std::runtime_error("face " + std::to_string(face) +
                         " left the triangle-inequality region at t = " + std::to_string(time)),
      face_(face),
      time_(time) {}

namespace {

std::vector<double> negated_curvature(const FlowProblem& p, const CurvatureField& k) {
  std::vector<double> out(p.mesh.vertex_count(), 0.0);
  for (VertexId v = 0; v < out.size(); ++v) {
    if (!p.pinned[v]) out[v] = -k.values[v];
  }
  return out;
}

void check_omega(const FlowProblem& p, const PLMetric& l, double t) {
  for (FaceId f = 0; f < p.mesh.face_count(); ++f) {
    const auto fl = l.face_lengths(p.mesh, f);
    if (!in_omega(fl[0], fl[1], fl[2], kDegenerationTolerance)) throw DegenerationError(f, t);
  }
}

}  // namespace

std::vector<double> rhs_standard(const FlowProblem& p, const FlowState& s) {
  const PLMetric l = conformal_scale(p.mesh, p.metric, s.u);
  check_omega(p, l, s.t);
  return negated_curvature(p, curvature(p.mesh, l));
}

std::vector<double> rhs_extended(const FlowProblem& p, const FlowState& s) {
  const PLMetric l = conformal_scale(p.mesh, p.metric, s.u);
  return negated_curvature(p, extended_curvature(p.mesh, l));
}

double lattice_angle(double x, double y) {
  const double arg = (std::exp(x) + std::exp(y) - std::exp(x + y)) / (2.0 * std::exp(0.5 * (x + y)));
  if (!(std::abs(arg) <= 1.0 + 1e-9)) {
    throw GeometryError("lattice angle: cosine " + std::to_string(arg) + " outside [-1, 1]");
  }
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

double lattice_angle_remainder(double x, double y) {
  return lattice_angle(x, y) - kPi / 3.0 - (std::sqrt(3.0) / 6.0) * (x + y);
}

std::vector<double> semilinear_rhs(const FlowProblem& p, const FlowState& s) {
  const Triangulation& t = p.mesh;
  const auto& u = s.u.values;
  std::vector<double> out(t.vertex_count(), 0.0);
  for (VertexId i = 0; i < t.vertex_count(); ++i) {
    if (p.pinned[i]) continue;
    if (t.degree(i) != 6 || t.vertex_faces(i).size() != 6) {
      throw std::invalid_argument("semilinear_rhs: vertex " + std::to_string(i) +
                                  " is not an interior degree-6 vertex");
    }
    double lin = 0.0;
    for (const Neighbor& n : t.neighbors(i)) lin += u[n.vertex] - u[i];
    double rem = 0.0;
    for (FaceId f : t.vertex_faces(i)) {
      const int slot = t.slot_of(f, i);
      const VertexId j = t.face(f)[(slot + 1) % 3];
      const VertexId k = t.face(f)[(slot + 2) % 3];
      rem += lattice_angle_remainder(u[j] - u[i], u[k] - u[i]);
    }
    out[i] = kHexLaplacianWeight * lin + rem;
  }
  return out;
}

std::vector<double> flow_rhs(const FlowProblem& p, const FlowState& s) {
  switch (p.variant) {
    case FlowVariant::kStandard: return rhs_standard(p, s);
    case FlowVariant::kExtended: return rhs_extended(p, s);
    case FlowVariant::kSemilinearHex: {
      // The semilinear form is only an identity while the lattice metric
      // stays Euclidean.
      const PLMetric l = conformal_scale(p.mesh, p.metric, s.u);
      check_omega(p, l, s.t);
      return semilinear_rhs(p, s);
    }
  }
  throw std::logic_error("unhandled flow variant");
}

void rk4_step(const RhsFunction& f, double t, std::span<double> y, double h) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  f(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  f(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  f(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  f(t + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

FlowState step(const FlowProblem& p, const FlowState& s, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be positive");
  if (s.t + h == s.t) throw std::underflow_error("step size underflows at t = " + std::to_string(s.t));
  FlowState next = s;
  const RhsFunction f = [&p](double t, std::span<const double> y, std::span<double> dydt) {
    FlowState stage{t, ConformalFactor(std::vector<double>(y.begin(), y.end()))};
    const std::vector<double> r = flow_rhs(p, stage);
    std::copy(r.begin(), r.end(), dydt.begin());
  };
  rk4_step(f, s.t, next.u.values, h);
  for (VertexId v = 0; v < p.mesh.vertex_count(); ++v) {
    if (p.pinned[v]) next.u.values[v] = s.u.values[v];
  }
  next.t = s.t + h;
  return next;
}

Sample sample_state(const FlowProblem& p, double t, std::span<const double> u) {
  const ConformalFactor factor(std::vector<double>(u.begin(), u.end()));
  const PLMetric l = conformal_scale(p.mesh, p.metric, factor);
  const std::vector<AngleTriple> angles = face_angles(p.mesh, l, true);
  const CurvatureField k = curvature_from_angles(p.mesh, angles);
  const Margins m = margins_from_angles(p.mesh, angles);
  double l2 = 0.0;
  for (double x : u) l2 += x * x;
  return {t, k.sup_abs_interior(p.pinned), std::sqrt(l2), dirichlet_energy(p.mesh, u),
          m.nondegeneracy, m.delaunay};
}

namespace {

void record(const FlowProblem& p, const Schedule& sch, const FlowState& s, TimeSeries& ts) {
  ts.samples.push_back(sample_state(p, s.t, s.u.values));
  if (sch.keep_states) ts.states.push_back(s.u.values);
  if (!sch.trace_vertices.empty()) {
    const PLMetric l = conformal_scale(p.mesh, p.metric, s.u);
    const CurvatureField k = extended_curvature(p.mesh, l);
    for (VertexId v : sch.trace_vertices) ts.traces.push_back({s.t, v, s.u[v], k[v]});
  }
}

}  // namespace

FlowRun integrate(const FlowProblem& p, const Schedule& sch) {
  if (!(sch.h > 0.0) || !std::isfinite(sch.h)) throw std::invalid_argument("schedule h must be positive");
  if (!(sch.t_max >= 0.0) || !std::isfinite(sch.t_max)) {
    throw std::invalid_argument("schedule t_max must be nonnegative");
  }
  if (sch.sample_stride == 0) throw std::invalid_argument("sample stride must be positive");
  for (VertexId v : sch.trace_vertices) {
    if (v >= p.mesh.vertex_count()) throw std::invalid_argument("trace vertex not in mesh");
  }

  FlowRun run;
  FlowState state{0.0, p.initial};
  record(p, sch, state, run.series);
  auto converged = [&](double sup_k) { return sch.stop_tolerance > 0.0 && sup_k < sch.stop_tolerance; };
  if (converged(run.series.samples.back().sup_k)) {
    run.reason = StopReason::kConverged;
    run.final_state = state;
    return run;
  }

  const auto n_steps = static_cast<std::size_t>(std::ceil(sch.t_max / sch.h - 1e-9));
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t_next = k == n_steps ? sch.t_max : static_cast<double>(k) * sch.h;
    FlowState next;
    try {
      next = step(p, state, t_next - state.t);
    } catch (const DegenerationError& e) {
      run.reason = StopReason::kDegenerated;
      run.degeneration = Degeneration{state.t, t_next, e.face()};
      break;
    }
    next.t = t_next;
    state = std::move(next);
    run.steps = k;

    const bool sampled = k % sch.sample_stride == 0 || k == n_steps;
    if (sampled) record(p, sch, state, run.series);
    const double sup_k = sampled ? run.series.samples.back().sup_k
                                 : sample_state(p, state.t, state.u.values).sup_k;
    if (converged(sup_k)) {
      if (!sampled) record(p, sch, state, run.series);
      run.reason = StopReason::kConverged;
      break;
    }
  }
  if (run.reason == StopReason::kDegenerated &&
      (run.series.samples.empty() || run.series.samples.back().t != state.t)) {
    record(p, sch, state, run.series);
  }
  run.final_state = state;
  return run;
}

namespace {

void put(std::ostream& out, double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.write(buf, ptr - buf);
}

}  // namespace

void TimeSeries::write_csv(std::ostream& out) const {
  out << "t,sup_K,l2_u,dirichlet,ndg_margin,del_margin\n";
  for (const Sample& s : samples) {
    put(out, s.t);
    out << ',';
    put(out, s.sup_k);
    out << ',';
    put(out, s.l2_u);
    out << ',';
    put(out, s.dirichlet);
    out << ',';
    put(out, s.ndg_margin);
    out << ',';
    put(out, s.del_margin);
    out << '\n';
  }
}

void TimeSeries::write_trace_csv(std::ostream& out) const {
  out << "t,vid,u,K\n";
  for (const TraceRow& r : traces) {
    put(out, r.t);
    out << ',' << r.vertex << ',';
    put(out, r.u);
    out << ',';
    put(out, r.k);
    out << '\n';
  }
}

double existence_time_estimate(double eps, int max_degree) {
  if (max_degree < 3) throw std::domain_error("existence_time_estimate: degree bound must be >= 3");
  return delta_of_epsilon(eps) / ((2.0 + max_degree) * kPi);
}

InterpolationError::InterpolationError(double s, FaceId face)
    : GeometryError("interpolated metric at s = " + std::to_string(s) + " degenerates at face " +
                        std::to_string(face),
                    face),
      s_(s) {}

InterpolatedWeights interpolation_weights(const FlowProblem& p, const ConformalFactor& u,
                                          const ConformalFactor& u_hat, int quadrature_points) {
  if (quadrature_points <= 0) throw std::invalid_argument("quadrature point count must be positive");
  if (u.size() != p.mesh.vertex_count() || u_hat.size() != p.mesh.vertex_count()) {
    throw std::invalid_argument("conformal factor size does not match the mesh");
  }
  InterpolatedWeights out;
  out.weights.weights.assign(p.mesh.edge_count(), 0.0);
  out.min_delaunay_margin = std::numeric_limits<double>::infinity();
  out.min_angle = std::numeric_limits<double>::infinity();
  ConformalFactor w(p.mesh.vertex_count());
  for (int m = 0; m < quadrature_points; ++m) {
    const double s = (m + 0.5) / quadrature_points;
    for (VertexId v = 0; v < w.size(); ++v) w[v] = s * u[v] + (1.0 - s) * u_hat[v];
    const PLMetric l = conformal_scale(p.mesh, p.metric, w);
    for (FaceId f = 0; f < p.mesh.face_count(); ++f) {
      const auto fl = l.face_lengths(p.mesh, f);
      if (!in_omega(fl[0], fl[1], fl[2], kDegenerationTolerance)) throw InterpolationError(s, f);
    }
    const std::vector<AngleTriple> angles = face_angles(p.mesh, l, false);
    const Margins mg = margins_from_angles(p.mesh, angles);
    out.min_delaunay_margin = std::min(out.min_delaunay_margin, mg.delaunay);
    out.min_angle = std::min(out.min_angle, mg.nondegeneracy);
    const EdgeWeightField mu = cot_weights_from_angles(p.mesh, angles);
    for (EdgeId e = 0; e < mu.weights.size(); ++e) out.weights.weights[e] += mu[e];
  }
  for (double& x : out.weights.weights) x /= quadrature_points;
  out.min = out.weights.min();
  out.max = out.weights.max();
  return out;
}

}  // namespace yamabe
