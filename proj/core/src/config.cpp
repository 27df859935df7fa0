#include "fsk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "fsk/error.hpp"
#include "fsk/expr.hpp"
#include "json.hpp"

namespace fsk {
namespace {

using json = nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(Errc::validation_error, path + ": " + what);
}

// Re-tags library errors raised while materializing a section.
template <typename Fn>
auto at_field(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == Errc::validation_error && std::string(e.what()).rfind("ValidationError: " + path, 0) == 0) throw;
    invalid(path, e.what());
  }
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) invalid(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) invalid(path + "." + key, "unknown field");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

NetSpec parse_net(const json& j) {
  allow_keys(j, "net", {"n", "m", "domain", "xs", "ys"});
  NetSpec spec;
  if (j.contains("xs") || j.contains("ys")) {
    if (!j.contains("xs") || !j.contains("ys")) invalid("net", "knot lists need both xs and ys");
    spec.xs = get_numbers(j["xs"], "net.xs");
    spec.ys = get_numbers(j["ys"], "net.ys");
    return spec;
  }
  if (!j.contains("n") || !j.contains("m")) invalid("net", "give either knot lists xs, ys or uniform counts n, m");
  spec.n = get_int(j["n"], "net.n");
  spec.m = get_int(j["m"], "net.m");
  if (j.contains("domain")) {
    const auto d = get_numbers(j["domain"], "net.domain");
    if (d.size() != 4) invalid("net.domain", "expected [x0, x1, y0, y1]");
    spec.domain = {d[0], d[1], d[2], d[3]};
  }
  return spec;
}

FunctionSpec parse_function(const json& j) {
  FunctionSpec spec;
  if (j.is_string()) {
    // Bare strings name a builtin when one matches, otherwise an expression.
    spec.text = j.get<std::string>();
    const auto names = builtin_names();
    spec.kind = std::find(names.begin(), names.end(), spec.text) != names.end() ? FunctionSpec::Kind::builtin
                                                                                : FunctionSpec::Kind::expression;
    return spec;
  }
  allow_keys(j, "f", {"builtin", "expr", "csv"});
  if (j.size() != 1) invalid("f", "give exactly one of builtin, expr, csv");
  if (j.contains("builtin")) {
    spec.kind = FunctionSpec::Kind::builtin;
    spec.text = get_string(j["builtin"], "f.builtin");
  } else if (j.contains("expr")) {
    spec.kind = FunctionSpec::Kind::expression;
    spec.text = get_string(j["expr"], "f.expr");
  } else {
    spec.kind = FunctionSpec::Kind::csv;
    spec.text = get_string(j["csv"], "f.csv");
  }
  return spec;
}

OperatorSpec parse_operator(const json& j) {
  allow_keys(j, "operator", {"kind", "t", "tx", "ty", "m", "n"});
  if (!j.contains("kind")) invalid("operator.kind", "required");
  const std::string kind = get_string(j["kind"], "operator.kind");
  OperatorSpec spec;
  if (kind == "multiplication") {
    spec.kind = OperatorKind::multiplication;
    if (!j.contains("t")) invalid("operator.t", "required for multiplication");
    spec.t = get_string(j["t"], "operator.t");
  } else if (kind == "composition") {
    spec.kind = OperatorKind::composition;
    spec.tx = j.contains("tx") ? get_string(j["tx"], "operator.tx") : "x";
    spec.ty = j.contains("ty") ? get_string(j["ty"], "operator.ty") : "y";
  } else if (kind == "bernstein") {
    spec.kind = OperatorKind::bernstein;
    if (j.contains("m")) spec.m = get_int(j["m"], "operator.m");
    if (j.contains("n")) spec.n = get_int(j["n"], "operator.n");
  } else {
    invalid("operator.kind", "expected multiplication, composition or bernstein");
  }
  return spec;
}

ScaleSpec parse_scale(const json& j) {
  ScaleSpec spec;
  if (j.is_number()) spec.constant = j.get<double>();
  else if (j.is_string()) spec.expression = j.get<std::string>();
  else invalid("alpha", "expected a number or an expression string");
  return spec;
}

LatticeSpec parse_lattice(const json& j, const std::string& path) {
  LatticeSpec spec;
  if (j.is_number()) {
    spec.constant = j.get<double>();
  } else if (j.is_string()) {
    spec.expression = j.get<std::string>();
  } else if (j.is_array()) {
    for (std::size_t r = 0; r < j.size(); ++r)
      spec.rows.push_back(get_numbers(j[r], path + "[" + std::to_string(r) + "]"));
  } else {
    invalid(path, "expected a number, an expression or a matrix");
  }
  return spec;
}

SolverConfig parse_solver(const json& j) {
  allow_keys(j, "solver", {"grid_res", "tol", "max_iter", "engine"});
  SolverConfig s;
  if (j.contains("grid_res")) s.grid_res = get_int(j["grid_res"], "solver.grid_res");
  if (j.contains("tol")) s.tol = get_number(j["tol"], "solver.tol");
  if (j.contains("max_iter")) s.max_iter = get_int(j["max_iter"], "solver.max_iter");
  if (j.contains("engine")) {
    const std::string e = get_string(j["engine"], "solver.engine");
    if (e == "grid") s.engine = Engine::grid;
    else if (e == "pointwise") s.engine = Engine::pointwise;
    else invalid("solver.engine", "expected grid or pointwise");
  }
  if (s.grid_res < 3) invalid("solver.grid_res", "must be at least 3");
  if (!(s.tol > 0.0)) invalid("solver.tol", "must be positive");
  if (s.max_iter < 0) invalid("solver.max_iter", "must be non-negative");
  return s;
}

AnalysisSpec parse_analysis(const json& j) {
  allow_keys(j, "analysis", {"conformance", "bounds", "lp", "dimension", "approx"});
  AnalysisSpec a;
  if (j.contains("conformance")) {
    if (!j["conformance"].is_boolean()) invalid("analysis.conformance", "expected a boolean");
    a.conformance = j["conformance"].get<bool>();
  }
  if (j.contains("bounds")) {
    if (!j["bounds"].is_boolean()) invalid("analysis.bounds", "expected a boolean");
    a.bounds = j["bounds"].get<bool>();
  }
  if (j.contains("lp")) {
    a.lp = get_numbers(j["lp"], "analysis.lp");
    for (double p : a.lp)
      if (!(p >= 1.0)) invalid("analysis.lp", "exponents must be at least 1");
  }
  if (j.contains("dimension")) {
    const json& d = j["dimension"];
    allow_keys(d, "analysis.dimension", {"res", "k_min", "k_max"});
    DimensionSpec spec;
    if (d.contains("res")) spec.res = get_int(d["res"], "analysis.dimension.res");
    if (d.contains("k_min")) spec.k_min = get_int(d["k_min"], "analysis.dimension.k_min");
    if (d.contains("k_max")) spec.k_max = get_int(d["k_max"], "analysis.dimension.k_max");
    if (spec.k_min < 0 || spec.k_max <= spec.k_min || spec.k_max > 20)
      invalid("analysis.dimension", "need 0 <= k_min < k_max <= 20");
    if (spec.res < 2 || (spec.res - 1) % (1 << spec.k_max) != 0)
      invalid("analysis.dimension.res", "res - 1 must be divisible by 2^k_max");
    a.dimension = spec;
  }
  if (j.contains("approx")) {
    const json& d = j["approx"];
    allow_keys(d, "analysis.approx", {"m", "n", "eps", "grid_res", "max_degree"});
    ApproxSpec spec;
    if (d.contains("m")) spec.m = get_int(d["m"], "analysis.approx.m");
    if (d.contains("n")) spec.n = get_int(d["n"], "analysis.approx.n");
    if (d.contains("eps")) spec.eps = get_number(d["eps"], "analysis.approx.eps");
    if (d.contains("grid_res")) spec.grid_res = get_int(d["grid_res"], "analysis.approx.grid_res");
    if (d.contains("max_degree")) spec.max_degree = get_int(d["max_degree"], "analysis.approx.max_degree");
    if (spec.m < 0 || spec.n < 0) invalid("analysis.approx", "degrees must be non-negative");
    if (!(spec.eps > 0.0)) invalid("analysis.approx.eps", "must be positive");
    if (spec.grid_res < 3) invalid("analysis.approx.grid_res", "must be at least 3");
    a.approx = spec;
  }
  return a;
}

OutputSpec parse_outputs(const json& j, const std::filesystem::path& base) {
  allow_keys(j, "outputs", {"csv", "pgm", "obj", "report", "res"});
  OutputSpec o;
  if (j.contains("csv")) o.csv = resolve(base, get_string(j["csv"], "outputs.csv"));
  if (j.contains("pgm")) o.pgm = resolve(base, get_string(j["pgm"], "outputs.pgm"));
  if (j.contains("obj")) o.obj = resolve(base, get_string(j["obj"], "outputs.obj"));
  if (j.contains("report")) o.report = resolve(base, get_string(j["report"], "outputs.report"));
  if (j.contains("res")) o.res = get_int(j["res"], "outputs.res");
  if (o.res < 2) invalid("outputs.res", "must be at least 2");
  return o;
}

Lattice sample_lattice(const LatticeSpec& spec, const Net& net, const std::string& path) {
  Lattice out(net.n() + 1, net.m() + 1);
  if (!spec.rows.empty()) {
    if (static_cast<int>(spec.rows.size()) != net.m() + 1) invalid(path, "expected M + 1 rows");
    for (int l = 0; l <= net.m(); ++l) {
      const auto& row = spec.rows[static_cast<std::size_t>(l)];
      if (static_cast<int>(row.size()) != net.n() + 1) invalid(path, "expected N + 1 values per row");
      for (int k = 0; k <= net.n(); ++k) out(k, l) = row[static_cast<std::size_t>(k)];
    }
    return out;
  }
  BivariateFn fn;
  if (spec.constant) {
    const double c = *spec.constant;
    fn = [c](double, double) { return c; };
  } else {
    fn = at_field(path, [&] { return parse_expression(spec.expression).as_function(); });
  }
  for (int l = 0; l <= net.m(); ++l)
    for (int k = 0; k <= net.n(); ++k) out(k, l) = fn(net.x(k), net.y(l));
  return out;
}

struct Builtin {
  const char* name;
  BivariateFn fn;
};

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> table{
      {"sin_sin", [](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); }},
      {"franke",
       [](double x, double y) {
         return 0.75 * std::exp(-((9 * x - 2) * (9 * x - 2) + (9 * y - 2) * (9 * y - 2)) / 4) +
                0.75 * std::exp(-((9 * x + 1) * (9 * x + 1)) / 49 - (9 * y + 1) / 10) +
                0.5 * std::exp(-((9 * x - 7) * (9 * x - 7) + (9 * y - 3) * (9 * y - 3)) / 4) -
                0.2 * std::exp(-(9 * x - 4) * (9 * x - 4) - (9 * y - 7) * (9 * y - 7));
       }},
      {"exp_xy", [](double x, double y) { return std::exp(x * y); }},
      {"cos_sum", [](double x, double y) { return std::cos(2 * std::numbers::pi * (x + y)); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& b : builtins()) names.emplace_back(b.name);
  return names;
}

Net make_net(const NetSpec& spec) {
  if (!spec.xs.empty() || !spec.ys.empty()) return build_net(spec.xs, spec.ys);
  if (spec.n < 2 || spec.m < 2) throw Error(Errc::too_few_intervals, "uniform nets need n, m >= 2");
  if (!(spec.domain.x1 > spec.domain.x0 && spec.domain.y1 > spec.domain.y0))
    throw Error(Errc::non_increasing_knots, "domain must have positive width and height");
  return uniform_net(spec.n, spec.m, spec.domain);
}

BivariateFn make_function(const FunctionSpec& spec, const std::filesystem::path& base_dir) {
  switch (spec.kind) {
    case FunctionSpec::Kind::builtin:
      for (const auto& b : builtins())
        if (spec.text == b.name) return b.fn;
      throw Error(Errc::validation_error, "unknown builtin '" + spec.text + "'");
    case FunctionSpec::Kind::expression: return parse_expression(spec.text).as_function();
    case FunctionSpec::Kind::csv: return as_function(read_csv_field(resolve(base_dir, spec.text)));
  }
  throw Error(Errc::validation_error, "unknown function kind");
}

PerturbOperator make_operator(const OperatorSpec& spec, Rect domain) {
  switch (spec.kind) {
    case OperatorKind::multiplication: {
      const Expression t = parse_expression(spec.t);
      return multiplication_operator(t.as_function(), domain, 257, "multiplication by " + spec.t);
    }
    case OperatorKind::composition: {
      const Expression tx = parse_expression(spec.tx);
      const Expression ty = parse_expression(spec.ty);
      return composition_operator([tx, ty](double x, double y) { return Point2{tx(x, y), ty(x, y)}; }, domain, 257,
                                  "composition with (" + spec.tx + ", " + spec.ty + ")");
    }
    case OperatorKind::bernstein: return bernstein_operator(spec.m, spec.n, domain);
  }
  throw Error(Errc::validation_error, "unknown operator kind");
}

ScaleFunction make_scale(const ScaleSpec& spec, Rect domain) {
  if (spec.constant) return ScaleFunction::constant(*spec.constant);
  return ScaleFunction(parse_expression(spec.expression).as_function(), domain);
}

BilinearData make_bilinear(const BilinearSpec& spec, const Net& net) {
  Lattice z = sample_lattice(spec.z, net, "bilinear.z");
  Lattice s = sample_lattice(spec.s, net, "bilinear.s");
  return at_field("bilinear.s", [&] { return make_bilinear_data(net, std::move(z), std::move(s)); });
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  allow_keys(doc, "config",
             {"name", "net", "surface", "f", "operator", "alpha", "bilinear", "solver", "analysis", "outputs"});
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (doc.contains("name")) cfg.name = get_string(doc["name"], "name");
  if (!doc.contains("net")) invalid("net", "required");
  cfg.net = parse_net(doc["net"]);
  if (doc.contains("surface")) {
    const std::string kind = get_string(doc["surface"], "surface");
    if (kind == "alpha") cfg.surface = SurfaceKind::alpha;
    else if (kind == "bilinear") cfg.surface = SurfaceKind::bilinear;
    else invalid("surface", "expected alpha or bilinear");
  }
  if (doc.contains("solver")) cfg.solver = parse_solver(doc["solver"]);
  if (doc.contains("analysis")) cfg.analysis = parse_analysis(doc["analysis"]);
  if (doc.contains("outputs")) cfg.outputs = parse_outputs(doc["outputs"], base_dir);

  const Net net = at_field("net", [&] { return make_net(cfg.net); });
  if (cfg.surface == SurfaceKind::alpha) {
    if (!doc.contains("f")) invalid("f", "required for alpha surfaces");
    if (!doc.contains("operator")) invalid("operator", "required for alpha surfaces");
    if (!doc.contains("alpha")) invalid("alpha", "required for alpha surfaces");
    cfg.f = parse_function(doc["f"]);
    cfg.op = parse_operator(doc["operator"]);
    cfg.alpha = parse_scale(doc["alpha"]);
    at_field("f", [&] { return make_function(cfg.f, cfg.base_dir); });
    at_field("operator", [&] { return make_operator(cfg.op, net.domain()); });
    at_field("alpha", [&] { return make_scale(cfg.alpha, net.domain()); });
  } else {
    if (!doc.contains("bilinear")) invalid("bilinear", "required for bilinear surfaces");
    const json& b = doc["bilinear"];
    allow_keys(b, "bilinear", {"z", "s"});
    if (!b.contains("z") || !b.contains("s")) invalid("bilinear", "needs z and s");
    cfg.bilinear.z = parse_lattice(b["z"], "bilinear.z");
    cfg.bilinear.s = parse_lattice(b["s"], "bilinear.s");
    make_bilinear(cfg.bilinear, net);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

}  // namespace fsk
