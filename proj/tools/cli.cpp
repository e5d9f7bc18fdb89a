#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "yamabe/analysis.hpp"
#include "yamabe/flow.hpp"
#include "yamabe/mesh_io.hpp"
#include "yamabe/parallel.hpp"

namespace yamabe::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<std::string> mesh_path;
  std::optional<int> hex_radius;
  std::string variant = "standard";
  std::string factor = "zero";  // zero | file:PATH | random
  double norm = 0.01;
  std::optional<std::uint64_t> seed;
  int support = -1;  // -1: half the disk radius, or 2 for file meshes
  VertexId center = 0;
  double h = 1e-2;
  double t_max = 10.0;
  double stop_tol = 1e-6;
  std::size_t stride = 1;
  std::string out_csv;
  std::string out_state;
  std::string out_curvature;
  std::string out_trace;
  std::vector<VertexId> trace;
  std::optional<unsigned> threads;
  // exhaust only
  std::size_t levels = 5;
  double jitter = 0.0;
  std::string out_json;
};

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

RunConfig load_config(const std::string& path, RunConfig c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
    take(j, "mesh", c.mesh_path);
    take(j, "hex", c.hex_radius);
    take(j, "variant", c.variant);
    take(j, "factor", c.factor);
    take(j, "norm", c.norm);
    take(j, "seed", c.seed);
    take(j, "support", c.support);
    take(j, "center", c.center);
    take(j, "h", c.h);
    take(j, "t_max", c.t_max);
    take(j, "stop_tol", c.stop_tol);
    take(j, "stride", c.stride);
    take(j, "out_csv", c.out_csv);
    take(j, "out_state", c.out_state);
    take(j, "out_curvature", c.out_curvature);
    take(j, "out_trace", c.out_trace);
    take(j, "trace", c.trace);
    take(j, "threads", c.threads);
    take(j, "levels", c.levels);
    take(j, "jitter", c.jitter);
    take(j, "out_json", c.out_json);
    return c;
  } catch (const json::exception& e) {
    throw UsageError("bad config file '" + path + "': " + e.what());
  }
}

// Flag values parsed by CLI11; copied over the config only when given.
struct FlagValues {
  RunConfig defaults;
  RunConfig v;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*field,
                   const std::string& desc) {
    CLI::Option* opt = app->add_option(name, v.*field, desc);
    setters.emplace_back(opt, [this, field](RunConfig& c) { c.*field = v.*field; });
    return opt;
  }

  template <class T>
  CLI::Option* add_opt(CLI::App* app, const std::string& name, std::optional<T> RunConfig::*field,
                       const std::string& desc) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *holder, desc);
    setters.emplace_back(opt, [holder, field](RunConfig& c) { c.*field = *holder; });
    return opt;
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? defaults : load_config(config_path, defaults);
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(c);
    }
    return c;
  }
};

void add_flow_options(CLI::App* app, FlagValues& f, bool exhaust) {
  app->add_option("--config", f.config_path, "JSON config file; flags override its values");
  f.add_opt(app, "--mesh", &RunConfig::mesh_path, "mesh file (plmesh format)");
  f.add_opt(app, "--hex", &RunConfig::hex_radius, "hexagonal disk of this radius, unit lengths");
  f.add(app, "--variant", &RunConfig::variant, "standard | extended | semilinear");
  f.add(app, "--factor", &RunConfig::factor, "initial factor: zero | file:PATH | random");
  f.add(app, "--norm", &RunConfig::norm, "l2 norm of a random factor");
  f.add_opt(app, "--seed", &RunConfig::seed, "seed of a random factor or jitter");
  f.add(app, "--support", &RunConfig::support, "support radius of a random factor");
  f.add(app, "--center", &RunConfig::center, "center vertex of a random factor or exhaustion");
  f.add(app, "--step", &RunConfig::h, "RK4 step h");
  f.add(app, "--t-max", &RunConfig::t_max, "final time");
  f.add(app, "--stride", &RunConfig::stride, "sample every N steps");
  f.add_opt(app, "--threads", &RunConfig::threads, "worker cap (fallback: YAMABE_THREADS)");
  if (exhaust) {
    f.add(app, "--levels", &RunConfig::levels, "number of exhaustion levels");
    f.add(app, "--jitter", &RunConfig::jitter, "relative jitter of the unit metric");
    f.add(app, "--trace", &RunConfig::trace, "extra base vertices to track");
    f.add(app, "--out", &RunConfig::out_json, "JSON report path (default: stdout)");
    return;
  }
  f.add(app, "--stop-tol", &RunConfig::stop_tol, "stop when interior sup|K| drops below (<= 0 disables)");
  f.add(app, "--out-csv", &RunConfig::out_csv, "time series CSV (default: stdout)");
  f.add(app, "--out-state", &RunConfig::out_state, "final conformal factor");
  f.add(app, "--out-curvature", &RunConfig::out_curvature, "final curvature");
  f.add(app, "--trace", &RunConfig::trace, "vertices to trace");
  f.add(app, "--out-trace", &RunConfig::out_trace, "trace CSV path");
}

void apply_threads(const RunConfig& c) {
  unsigned n = 1;
  if (c.threads) {
    n = *c.threads;
  } else if (const char* env = std::getenv("YAMABE_THREADS"); env && *env) {
    try {
      n = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw UsageError(std::string("YAMABE_THREADS is not a number: ") + env);
    }
  }
  if (n == 0) throw UsageError("thread count must be positive");
  set_worker_count(n);
}

struct LoadedMesh {
  Triangulation mesh;
  PLMetric metric;
};

LoadedMesh load_source(const RunConfig& c) {
  if (c.mesh_path.has_value() == c.hex_radius.has_value()) {
    throw UsageError("exactly one of --mesh and --hex is required");
  }
  if (c.hex_radius) {
    if (*c.hex_radius < 0) throw UsageError("hex radius must be nonnegative");
    Triangulation t = build_hexagonal_disk(*c.hex_radius);
    PLMetric d = PLMetric::constant(t);
    return {std::move(t), std::move(d)};
  }
  MeshFile f = load_mesh(*c.mesh_path);
  PLMetric d = f.lengths ? PLMetric(f.mesh, *f.lengths) : PLMetric::constant(f.mesh);
  return {std::move(f.mesh), std::move(d)};
}

ConformalFactor initial_factor(const RunConfig& c, const Triangulation& t) {
  if (c.factor == "zero") return ConformalFactor(t.vertex_count());
  if (c.factor.rfind("file:", 0) == 0) {
    const std::string path = c.factor.substr(5);
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open factor file '" + path + "'");
    return ConformalFactor(read_vertex_function(in, t.vertex_count()));
  }
  if (c.factor == "random") {
    if (!c.seed) throw UsageError("a random factor requires --seed");
    if (c.center >= t.vertex_count()) throw UsageError("center vertex out of range");
    const int support = c.support >= 0 ? c.support : (c.hex_radius ? *c.hex_radius / 2 : 2);
    return random_bump(t, c.center, support, c.norm, *c.seed);
  }
  throw UsageError("unknown factor spec '" + c.factor + "'");
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  body(out);
  if (!out) throw UsageError("write failed for '" + path + "'");
}

int cmd_generate(const std::string& kind, int radius, const std::string& path, std::ostream& out) {
  Triangulation t = kind == "hex" ? build_hexagonal_disk(radius) : build_tetrahedron();
  const std::vector<double> unit(t.edge_count(), 1.0);
  if (path.empty() || path == "-") {
    write_mesh(out, t, unit);
  } else {
    save_mesh(path, t, unit);
  }
  return kExitOk;
}

int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream& err) {
  apply_threads(c);
  if (!(c.h > 0.0) || !(c.t_max >= 0.0)) throw UsageError("need h > 0 and t-max >= 0");
  if (c.stride == 0) throw UsageError("stride must be positive");
  LoadedMesh m = load_source(c);
  ConformalFactor u0 = initial_factor(c, m.mesh);
  const FlowVariant variant = parse_flow_variant(c.variant);
  for (VertexId v : c.trace) {
    if (v >= m.mesh.vertex_count()) throw UsageError("trace vertex out of range");
  }
  const FlowProblem p = FlowProblem::with_boundary_pinned(std::move(m.mesh), std::move(m.metric),
                                                          std::move(u0), variant);
  Schedule s;
  s.h = c.h;
  s.t_max = c.t_max;
  s.stop_tolerance = c.stop_tol;
  s.sample_stride = c.stride;
  s.trace_vertices = c.trace;
  const FlowRun run = integrate(p, s);

  if (c.out_csv.empty()) {
    run.series.write_csv(out);
  } else {
    write_file(c.out_csv, [&](std::ostream& o) { run.series.write_csv(o); });
  }
  if (!c.out_trace.empty()) {
    write_file(c.out_trace, [&](std::ostream& o) { run.series.write_trace_csv(o); });
  }
  if (!c.out_state.empty()) {
    write_file(c.out_state, [&](std::ostream& o) { write_vertex_function(o, run.final_state.u); });
  }
  if (!c.out_curvature.empty()) {
    const PLMetric l = conformal_scale(p.mesh, p.metric, run.final_state.u);
    const CurvatureField k = variant == FlowVariant::kExtended || !l.is_pl()
                                 ? extended_curvature(p.mesh, l)
                                 : curvature(p.mesh, l);
    write_file(c.out_curvature, [&](std::ostream& o) { write_vertex_function(o, k.values); });
  }
  if (run.reason == StopReason::kDegenerated) {
    const Degeneration& d = *run.degeneration;
    err << "degeneration: face " << d.face << " left Omega in (" << d.t_lo << ", " << d.t_hi
        << "]\n";
    return kExitDegenerated;
  }
  err << "stopped: " << to_string(run.reason) << " at t=" << run.final_state.t
      << " after " << run.steps << " steps\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path,
               std::ostream& out) {
  const std::vector<CheckReport> reports = run_suite(suite, seed);
  bool all = true;
  for (const CheckReport& r : reports) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " deviation=" << r.deviation
        << " tolerance=" << r.tolerance << " samples=" << r.samples;
    if (!r.applicable) out << " (not applicable)";
    if (!r.detail.empty()) out << " -- " << r.detail;
    out << '\n';
    all = all && r.passed;
  }
  if (!out_path.empty()) {
    write_file(out_path, [&](std::ostream& o) { o << to_json(reports, seed) << '\n'; });
  }
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_exhaust(const RunConfig& c, std::ostream& out) {
  apply_threads(c);
  LoadedMesh m = load_source(c);
  if (c.jitter > 0.0) {
    if (!c.seed) throw UsageError("--jitter requires --seed");
    m.metric = jittered_metric(m.mesh, c.jitter, *c.seed);
  }
  const ConformalFactor u0 = initial_factor(c, m.mesh);
  Schedule s;
  s.h = c.h;
  s.t_max = c.t_max;
  s.sample_stride = c.stride;
  const ExhaustionReport rep =
      exhaustion_convergence_report(m.mesh, m.metric, u0, c.center, c.levels, s,
                                    parse_flow_variant(c.variant), c.trace);
  const std::string text = to_json(rep);
  if (c.out_json.empty()) {
    out << text << '\n';
  } else {
    write_file(c.out_json, [&](std::ostream& o) { o << text << '\n'; });
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Combinatorial Yamabe flow on triangulated surfaces", "yamabe"};
  app.require_subcommand(1);

  std::string gen_kind;
  int gen_radius = 1;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "write a built-in mesh with unit lengths");
  gen->add_option("kind", gen_kind, "hex | tetra")->required()->check(CLI::IsMember({"hex", "tetra"}));
  gen->add_option("--radius", gen_radius, "hexagonal disk radius")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  FlagValues flow_flags;
  CLI::App* flow = app.add_subcommand("flow", "integrate a flow and write its time series");
  add_flow_options(flow, flow_flags, false);

  std::string suite;
  std::uint64_t verify_seed = 7;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("suite", suite, "all | " + [] {
    std::string s;
    for (const auto& n : suite_names()) s += (s.empty() ? "" : " | ") + n;
    return s;
  }())->required();
  verify->add_option("--seed", verify_seed, "64-bit seed");
  verify->add_option("--out", verify_out, "JSON report bundle path");

  FlagValues exhaust_flags;
  exhaust_flags.defaults.t_max = 1.0;
  CLI::App* exhaust = app.add_subcommand("exhaust", "flow on nested exhaustion levels");
  add_flow_options(exhaust, exhaust_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_kind, gen_radius, gen_out, out);
    if (flow->parsed()) return cmd_flow(flow_flags.resolve(), out, err);
    if (verify->parsed()) {
      const auto& names = suite_names();
      if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end()) {
        err << "unknown suite '" << suite << "'\n" << verify->help();
        return kExitUsage;
      }
      return cmd_verify(suite, verify_seed, verify_out, out);
    }
    if (exhaust->parsed()) return cmd_exhaust(exhaust_flags.resolve(), out);
  } catch (const DegenerationError& e) {
    err << "degeneration: " << e.what() << '\n';
    return kExitDegenerated;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace yamabe::cli
