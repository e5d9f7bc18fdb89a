// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "yamabe/analysis.hpp"

using namespace yamabe;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass;
  std::string summary;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

FlowProblem perturbed_disk(int radius, double amplitude) {
  Triangulation t = build_hexagonal_disk(radius);
  ConformalFactor u0 = random_uniform_bump(t, 0, radius / 2, amplitude, kSeed);
  PLMetric d = PLMetric::constant(t);
  return FlowProblem::with_boundary_pinned(std::move(t), std::move(d), std::move(u0),
                                           FlowVariant::kStandard);
}

Outcome variational() {
  const CheckReport r = check_variational_identity(10000, kSeed, 0.05, 1e-5, 1e-6);
  return {r.passed, "max |J - J_fd| = " + fmt("%.3e", r.deviation) + " (tol 1e-6), " +
                        fmt("%.0f", r.params.at("samples_over_tolerance")) +
                        " of 10000 samples over tolerance, symmetry " +
                        fmt("%.1e", r.params.at("symmetry_deviation"))};
}

Outcome evolution() {
  const CheckReport r = curvature_evolution_study(perturbed_disk(6, 0.1), 1e-3, 0.5, 1e-4, 3.0, 5.0);
  return {r.passed, "deviation(h=1e-3) = " + fmt("%.3e", r.params.at("deviation_h")) +
                        " (tol 1e-4), ratio h/(h/2) = " + fmt("%.3f", r.params.at("ratio")) +
                        " (band [3, 5])"};
}

Outcome gauss_bonnet() {
  const Triangulation tet = build_tetrahedron();
  const CheckReport r = check_gauss_bonnet(tet, PLMetric::constant(tet), 100, kSeed, 2.0, 1e-9);
  const bool pseudo = r.params.at("pseudo_metrics") > 0;
  return {r.passed && pseudo, "max |sum K - 4 pi| = " + fmt("%.2e", r.deviation) + " (tol 1e-9), " +
                                  fmt("%.0f", r.params.at("pseudo_metrics")) + " pseudo metrics"};
}

Outcome continuity() {
  const CheckReport r = check_angle_continuity(10, kSeed, 1e-10);
  return {r.passed, "angle-sum error " + fmt("%.2e", r.deviation) + " (tol 1e-10), monotone violations " +
                        fmt("%.0f", r.params.at("monotone_violations")) + ", boundary violations " +
                        fmt("%.0f", r.params.at("boundary_violations")) + ", inner/extended mismatches " +
                        fmt("%.0f", r.params.at("consistency_violations"))};
}

Outcome delta_bound() {
  const double d = delta_of_epsilon(kPi / 3);
  const bool value_ok = std::abs(d - 4.2234e-3) <= 1e-7;
  const CheckReport r = check_delta_bound(10000, kSeed);
  return {value_ok && r.passed, "delta(pi/3) = " + fmt("%.10e", d) + ", violations " +
                                    fmt("%.0f", r.params.at("violations")) +
                                    ", max change/(eps/2) = " + fmt("%.4f", r.deviation)};
}

Outcome existence() {
  const double t0 = existence_time_estimate(kPi / 3, 6);
  const bool value_ok = std::abs(t0 - 1.6805e-4) <= 1e-8;
  const CheckReport r = check_existence_time(50, kSeed);
  return {value_ok && r.passed, "T0(pi/3, 6) = " + fmt("%.10e", t0) + ", degenerations " +
                                    fmt("%.0f", r.params.at("degenerations")) + " in 50 runs, margin violations " +
                                    fmt("%.0f", r.params.at("margin_violations"))};
}

Outcome extended() {
  const CheckReport r = check_extended_global_existence(4, 10.0, 1e-2, 1e-9);
  return {r.passed, "reached t = " + fmt("%g", r.params.at("t_reached")) + ", max angle-sum error " +
                        fmt("%.2e", r.deviation) + " (tol 1e-9)"};
}

Outcome max_principle() {
  const CheckReport r = check_max_principle(20, kSeed, 10.0, 10.0);
  return {r.passed, "zero start sup " + fmt("%.2e", r.params.at("zero_start_sup")) +
                        " (tol 1e-10), comparison excess " + fmt("%.2e", r.params.at("comparison_excess")) +
                        " (tol 1e-8), 20 seeds"};
}

Outcome uniqueness() {
  const CheckReport r = uniqueness_study(perturbed_disk(6, 0.1), 0.05, 1e-3, 5.0, 1e-8, 12.0, 20.0);
  return {r.passed, "gap ratio " + fmt("%.3f", r.params.at("ratio")) + " (band [12, 20], h = 0.05), gap(h=1e-3) = " +
                        fmt("%.3e", r.params.at("fine_gap")) + " (tol 1e-8), interpolated Delaunay margin " +
                        fmt("%.3f", r.params.at("min_interpolated_delaunay_margin"))};
}

Outcome convergence() {
  Schedule s;
  s.h = 1e-2;
  s.t_max = 100.0;
  s.stop_tolerance = 1e-6;
  const ConvergenceResult c = convergence_experiment(10, 0.01, kSeed, s);
  const auto& p = c.report.params;
  return {c.report.passed,
          "sup|K| = " + fmt("%.3e", p.at("final_sup_K")) + " at t = " + fmt("%g", p.at("final_t")) +
              ", min angle " + fmt("%.4f", p.at("min_angle")) + ", min Delaunay margin " +
              fmt("%.4f", p.at("min_delaunay_margin")) + ", energy inequality max " +
              fmt("%.2e", p.at("energy_inequality_max")) + ", E = " + fmt("%.2e", p.at("final_dirichlet")) +
              (c.report.detail.empty() ? "" : " -- " + c.report.detail)};
}

Outcome semilinear() {
  const CheckReport r = check_semilinear_identity(1000, kSeed, 4, 0.3, 1e-10);
  return {r.passed, "max |semilinear + K| = " + fmt("%.2e", r.deviation) + " (tol 1e-10)"};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "variational identity", 10, variational},
      {2, "curvature evolution", 30, evolution},
      {3, "Gauss-Bonnet", 0, gauss_bonnet},
      {4, "extension consistency and continuity", 0, continuity},
      {5, "delta(eps) bound", 0, delta_bound},
      {6, "existence-time estimate", 0, existence},
      {7, "extended flow global existence", 0, extended},
      {8, "maximum principle", 0, max_principle},
      {9, "uniqueness surrogate", 0, uniqueness},
      {10, "hexagonal convergence", 60, convergence},
      {11, "semilinear identity", 0, semilinear},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2fs", secs);
    if (c.time_limit > 0) {
      timing += fmt(" (limit %.0fs)", c.time_limit);
      pass = pass && secs < c.time_limit;
    }
    std::printf("[%s] %2d %s: %s; %s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str(),
                timing.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
