#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "fsk/alpha.hpp"
#include "fsk/analysis.hpp"
#include "fsk/approx.hpp"
#include "fsk/bilinear.hpp"
#include "fsk/config.hpp"
#include "fsk/error.hpp"
#include "fsk/export.hpp"
#include "fsk/ifs.hpp"
#include "fsk/report.hpp"
#include "json.hpp"

namespace fsk::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;

// Configuration problems are reported as usage errors.
struct ConfigFailure {
  std::string message;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Built {
  ExperimentConfig cfg;
  Net net;
  std::optional<AlphaSurface> alpha;
  std::optional<BilinearData> data;
  std::optional<FractalSurface> fis;

  const FractalSurface& surface() const { return alpha ? alpha->surface() : *fis; }
  const VerticalMapFamily& family() const { return surface().family(); }
};

ExperimentConfig load(const std::string& path) {
  try {
    return load_config(path);
  } catch (const Error& e) {
    throw ConfigFailure{e.what()};
  }
}

Built build(const ExperimentConfig& cfg) {
  Built b{cfg, make_net(cfg.net), std::nullopt, std::nullopt, std::nullopt};
  if (cfg.surface == SurfaceKind::alpha) {
    b.alpha = build_alpha_surface(make_function(cfg.f, cfg.base_dir), make_operator(cfg.op, b.net.domain()),
                                  make_scale(cfg.alpha, b.net.domain()), b.net, cfg.solver);
  } else {
    b.data = make_bilinear(cfg.bilinear, b.net);
    b.fis = build_bilinear_fis(*b.data, b.net, cfg.solver);
  }
  return b;
}

int orbit_depth_for(const Net& net, double target_points) {
  for (int d = 0; d < 20; ++d) {
    const double count = (std::pow(net.n(), d + 1) + 1) * (std::pow(net.m(), d + 1) + 1);
    if (count >= target_points) return d;
  }
  return 20;
}

double knot_defect(const Built& b, const SampledField& field) {
  double worst = 0.0;
  const Lattice& z = b.family().knot_values();
  for (int l = 0; l <= b.net.m(); ++l)
    for (int k = 0; k <= b.net.n(); ++k)
      worst = std::max(worst, std::abs(field.interpolate(b.net.x(k), b.net.y(l)) - z(k, l)));
  return worst;
}

void describe_environment(VerificationReport& report, const Built& b) {
  report.set_environment("config", b.cfg.name);
  report.set_environment("surface", std::string(b.alpha ? "alpha" : "bilinear"));
  report.set_environment("net_n", static_cast<std::int64_t>(b.net.n()));
  report.set_environment("net_m", static_cast<std::int64_t>(b.net.m()));
  report.set_environment("grid_res", static_cast<std::int64_t>(b.cfg.solver.grid_res));
  report.set_environment("solver_tol", b.cfg.solver.tol);
  if (b.alpha) {
    report.set_environment("operator", b.alpha->op().describe());
    report.set_environment("alpha_sup", b.alpha->alpha().sup());
    report.set_environment("operator_norm", b.alpha->op().norms().norm);
    report.set_environment("id_minus_operator_norm", b.alpha->op().norms().id_minus);
    report.set_environment("id_minus_operator_norm_exact", b.alpha->op().norms().id_minus_exact);
  }
}

void engine_checks(VerificationReport& report, const Built& b) {
  const double tol = b.cfg.solver.tol;
  auto t0 = Clock::now();
  const SolveResult& sol = b.surface().solution();
  report.add_timing("grid_solve", seconds_since(t0));
  report.set_environment("solver_iterations", static_cast<std::int64_t>(sol.iterations));
  report.set_environment("solver_residual", sol.residual);
  report.add(make_check("grid solution interpolates the knot data", "interpolation property of the attractor",
                        knot_defect(b, sol.field), 0.0, tol));

  t0 = Clock::now();
  const int depth = orbit_depth_for(b.net, 1e4);
  const SurfaceOrbit orbit = b.surface().orbit(depth);
  const OrbitCheck oc = orbit_residual(b.family(), orbit);
  report.add_timing("orbit", seconds_since(t0));
  report.set_environment("orbit_points", static_cast<std::int64_t>(orbit.points.size()));
  report.add(make_check("orbit satisfies the self-referential equation", "self-referential equation",
                        oc.max_residual, 0.0, 1e-12));
}

void conformance_checks(VerificationReport& report, const Built& b) {
  const ConformanceReport corner = verify_corner_conditions(b.family());
  const ConformanceReport matching = verify_matching_conditions(b.family());
  report.add(make_check("corner conditions", "join-up conditions at the domain corners", corner.corner_defect, 0.0,
                        corner.tolerance));
  report.add(make_check("matching conditions", "matching conditions on shared grid lines",
                        matching.matching_defect, 0.0, matching.tolerance));
}

void bound_checks(VerificationReport& report, const Built& b) {
  const AlphaSurface& s = *b.alpha;
  const double tol = b.cfg.solver.tol;
  const SampledField& fa = s.field();
  const SampledField f = sample(fa, s.f());
  const double f_sup = sup_norm(f);
  const double fa_sup = sup_norm(fa);
  report.add(make_check("perturbation error bound", "perturbation error of the fractal operator",
                        sup_norm(combine(1.0, fa, -1.0, f)), perturbation_bound(s), 2.0 * tol));
  const NormBounds nb = operator_norm_bounds(s.op(), s.alpha());
  report.add(make_check("fractal operator norm bound", "operator norm of the fractal operator", fa_sup,
                        nb.fractal_norm_upper * f_sup, 2.0 * tol));
  if (nb.bounded_below_constant) {
    report.add(make_check("bounded below", "lower bound of the fractal operator", fa_sup,
                          *nb.bounded_below_constant * f_sup, 2.0 * tol, Relation::at_least));
  } else {
    report.set_environment("bounded_below_absent", nb.absent_reason);
  }
  for (double p : b.cfg.analysis.lp) {
    const LpBoundReport lp = verify_lp_bound(s, p);
    std::ostringstream name;
    name << "L^" << p << " perturbation bound";
    report.add(make_check(name.str(), "L^p perturbation inequality", lp.lhs, lp.rhs, lp.slack));
  }
}

int cmd_build(const std::string& config_path, const std::string& format, const std::string& output, int res,
              std::ostream& out) {
  const ExperimentConfig cfg = load(config_path);
  const Built b = build(cfg);
  const int r = res > 0 ? res : cfg.outputs.res;
  const auto t0 = Clock::now();
  const SampledField field = b.surface().evaluate_grid(r, r);
  json summary;
  summary["name"] = cfg.name;
  summary["resolution"] = {field.nx(), field.ny()};
  summary["solve_seconds"] = seconds_since(t0);
  summary["exports"] = json::array();
  auto emit = [&](ExportFormat fmt, const std::filesystem::path& path) {
    export_field(field, fmt, path);
    summary["exports"].push_back({{"format", to_string(fmt)}, {"path", path.string()}});
  };
  if (!output.empty()) {
    const auto fmt = parse_export_format(format);
    if (!fmt) throw ConfigFailure{"unknown export format '" + format + "'"};
    emit(*fmt, output);
  } else {
    if (cfg.outputs.csv) emit(ExportFormat::csv, *cfg.outputs.csv);
    if (cfg.outputs.pgm) emit(ExportFormat::pgm, *cfg.outputs.pgm);
    if (cfg.outputs.obj) emit(ExportFormat::obj, *cfg.outputs.obj);
  }
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& report_path, bool timings, std::ostream& out) {
  const ExperimentConfig cfg = load(config_path);
  const Built b = build(cfg);
  VerificationReport report("verify " + cfg.name);
  describe_environment(report, b);
  if (cfg.analysis.conformance) conformance_checks(report, b);
  engine_checks(report, b);
  if (b.alpha && cfg.analysis.bounds) bound_checks(report, b);
  if (b.data && cfg.analysis.dimension) {
    const DimensionSpec& d = *cfg.analysis.dimension;
    const DimensionVerdict v = theoretical_box_dimension(*b.data, b.net);
    const BoxCountReport est = box_count_dimension(b.surface().evaluate_grid(d.res, d.res), d.k_min, d.k_max);
    report.add(make_check("box-count estimate near the predicted dimension", "box dimension of bilinear surfaces",
                          std::abs(est.dimension - v.predicted), 0.0, 0.2));
  }
  const std::string text = report.to_json(timings);
  const std::filesystem::path dest = !report_path.empty() ? std::filesystem::path(report_path)
                                     : cfg.outputs.report ? *cfg.outputs.report
                                                          : std::filesystem::path();
  if (!dest.empty()) {
    std::ofstream file(dest, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(Errc::io_error, "cannot write " + dest.string());
    file << text;
  }
  out << text;
  return report.pass() ? kExitOk : kExitCheck;
}

int cmd_dimension(const std::string& config_path, int res, int k_min, int k_max, std::ostream& out) {
  const ExperimentConfig cfg = load(config_path);
  const Built b = build(cfg);
  DimensionSpec spec = cfg.analysis.dimension.value_or(DimensionSpec{});
  if (res > 0) spec.res = res;
  if (k_min >= 0) spec.k_min = k_min;
  if (k_max >= 0) spec.k_max = k_max;

  json doc;
  doc["name"] = cfg.name;
  VerificationReport report("dimension " + cfg.name);
  std::optional<double> predicted;
  if (b.data) {
    try {
      const DimensionVerdict v = theoretical_box_dimension(*b.data, b.net);
      doc["theoretical"] = {{"gamma", v.gamma},         {"steady", v.steady}, {"balanced", v.balanced},
                            {"co_bilinear", v.co_bilinear}, {"predicted", v.predicted}};
      predicted = v.predicted;
    } catch (const Error& e) {
      doc["theoretical"] = {{"withheld", e.what()}};
    }
  }
  const auto t0 = Clock::now();
  const BoxCountReport est = box_count_dimension(b.surface().evaluate_grid(spec.res, spec.res), spec.k_min, spec.k_max);
  doc["estimate"] = {{"dimension", est.dimension}, {"residual", est.residual}, {"dropped_levels", est.dropped},
                     {"levels", est.levels},       {"counts", est.counts},     {"resolution", spec.res}};
  doc["seconds"] = seconds_since(t0);
  bool pass = est.residual < 0.05;
  if (predicted) pass = pass && std::abs(est.dimension - *predicted) <= 0.2;
  doc["pass"] = pass;
  out << doc.dump(2) << "\n";
  return pass ? kExitOk : kExitCheck;
}

int cmd_approx(const std::string& config_path, int m, int n, double eps, std::ostream& out) {
  const ExperimentConfig cfg = load(config_path);
  if (cfg.surface != SurfaceKind::alpha) throw ConfigFailure{"approx needs an alpha surface config"};
  const Built b = build(cfg);
  ApproxSpec spec = cfg.analysis.approx.value_or(ApproxSpec{});
  if (m >= 0) spec.m = m;
  if (n >= 0) spec.n = n;
  if (eps > 0.0) spec.eps = eps;
  const AlphaSurface& s = *b.alpha;

  VerificationReport report("approx " + cfg.name);
  describe_environment(report, b);
  json ladder = json::array();
  for (int d = 0; d <= spec.m + spec.n; ++d) {
    const PolySpace space = poly_basis((d + 1) / 2, d / 2, b.net.domain());
    const ApproxResult e = best_approx(s.f(), space, spec.grid_res);
    const ApproxResult ea =
        best_fractal_approx(s.f(), (d + 1) / 2, d / 2, s.alpha(), s.op(), b.net, spec.grid_res);
    ladder.push_back({{"degree", d}, {"dimension", space.dimension()}, {"E", e.sup_error}, {"E_alpha", ea.sup_error}});
  }
  const ChainReport chain = verify_approx_chain(s.f(), spec.m, spec.n, s.alpha(), s.op(), b.net, spec.grid_res);
  report.add(make_check("fractal best-approximation chain", "degree of approximation by fractal polynomials",
                        chain.e_alpha, chain.rhs, chain.slack));
  EpsilonOptions opts;
  opts.max_degree = spec.max_degree;
  opts.grid_res = spec.grid_res;
  opts.solver = cfg.solver;
  const EpsilonResult er = epsilon_fractal_polynomial(s.f(), spec.eps, s.op(), b.net, opts);
  report.add(make_check("fractal polynomial within eps", "existence of eps-close fractal polynomials",
                        er.achieved_error, spec.eps, 0.0));
  report.add(make_check("scale below the eps threshold", "existence of eps-close fractal polynomials", er.alpha,
                        er.threshold, 0.0));

  json doc = json::parse(report.to_json(false));
  doc["ladder"] = ladder;
  doc["epsilon"] = {{"eps", spec.eps},         {"stage_one", er.stage_one_method}, {"m", er.m},
                    {"n", er.n},               {"stage_one_error", er.stage_one_error},
                    {"alpha", er.alpha},       {"threshold", er.threshold},        {"achieved", er.achieved_error}};
  out << doc.dump(2) << "\n";
  return report.pass() ? kExitOk : kExitCheck;
}

int cmd_bench(const std::string& config_path, int points, std::ostream& out) {
  const ExperimentConfig cfg = load(config_path);
  const Built b = build(cfg);
  auto t0 = Clock::now();
  if (cfg.solver.engine == Engine::grid) b.surface().solution();
  else b.surface().pointwise_depth();
  const double setup = seconds_since(t0);

  std::mt19937_64 rng(42);
  const Rect d = b.net.domain();
  std::uniform_real_distribution<double> ux(d.x0, d.x1);
  std::uniform_real_distribution<double> uy(d.y0, d.y1);
  std::vector<Point2> pts(static_cast<std::size_t>(points));
  for (auto& p : pts) p = {ux(rng), uy(rng)};
  t0 = Clock::now();
  const std::vector<double> values = b.surface().evaluate(pts);
  const double eval = seconds_since(t0);
  double checksum = 0.0;
  for (double v : values) checksum += v;
  json doc;
  doc["name"] = cfg.name;
  doc["engine"] = cfg.solver.engine == Engine::grid ? "grid" : "pointwise";
  doc["setup_seconds"] = setup;
  doc["points"] = points;
  doc["eval_seconds"] = eval;
  doc["points_per_second"] = eval > 0.0 ? points / eval : 0.0;
  doc["checksum"] = checksum;
  out << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractal interpolation surfaces: build, verify, dimension, approx, bench", "fsk"};
  app.require_subcommand(1);
  int threads = -1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores); sets FSK_THREADS");

  std::string config;
  std::string format = "csv";
  std::string output;
  std::string report_path;
  bool no_timings = false;
  int res = 0;
  int k_min = -1;
  int k_max = -1;
  int m = -1;
  int n = -1;
  double eps = 0.0;
  int points = 100000;

  auto* build_cmd = app.add_subcommand("build", "Construct the surface and export it");
  build_cmd->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  build_cmd->add_option("-f,--format", format, "csv, pgm or obj (with --output)");
  build_cmd->add_option("-o,--output", output, "Export path; defaults to the config's outputs");
  build_cmd->add_option("-r,--res", res, "Export resolution per axis");

  auto* verify_cmd = app.add_subcommand("verify", "Run conformance and bound checks, print a JSON report");
  verify_cmd->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  verify_cmd->add_option("--report", report_path, "Also write the report here");
  verify_cmd->add_flag("--no-timings", no_timings, "Omit the timings block");

  auto* dim_cmd = app.add_subcommand("dimension", "Theoretical and box-counting dimension");
  dim_cmd->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  dim_cmd->add_option("-r,--res", res, "Field resolution per axis");
  dim_cmd->add_option("--k-min", k_min, "Coarsest dyadic level");
  dim_cmd->add_option("--k-max", k_max, "Finest dyadic level");

  auto* approx_cmd = app.add_subcommand("approx", "Best-approximation ladders and the eps procedure");
  approx_cmd->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  approx_cmd->add_option("-m", m, "Degree parameter m");
  approx_cmd->add_option("-n", n, "Degree parameter n");
  approx_cmd->add_option("--eps", eps, "Target accuracy");

  auto* bench_cmd = app.add_subcommand("bench", "Evaluation throughput");
  bench_cmd->add_option("-c,--config", config, "Experiment config (JSON)")->required();
  bench_cmd->add_option("-p,--points", points, "Random evaluation points")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (threads >= 0) {
    const std::string value = std::to_string(threads);
    setenv("FSK_THREADS", value.c_str(), 1);
  }

  try {
    if (*build_cmd) return cmd_build(config, format, output, res, out);
    if (*verify_cmd) return cmd_verify(config, report_path, !no_timings, out);
    if (*dim_cmd) return cmd_dimension(config, res, k_min, k_max, out);
    if (*approx_cmd) return cmd_approx(config, m, n, eps, out);
    if (*bench_cmd) return cmd_bench(config, points, out);
  } catch (const ConfigFailure& e) {
    err << "config error: " << e.message << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheck;
  }
  return kExitUsage;
}

}  // namespace fsk::cli
