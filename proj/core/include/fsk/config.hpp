#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsk/alpha.hpp"
#include "fsk/bilinear.hpp"
#include "fsk/export.hpp"
#include "fsk/ifs.hpp"
#include "fsk/net.hpp"

namespace fsk {

struct NetSpec {
  /// Uniform net when xs / ys are empty.
  int n = 2;
  int m = 2;
  Rect domain = kUnitSquare;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct FunctionSpec {
  enum class Kind { builtin, expression, csv };
  Kind kind = Kind::builtin;
  /// Builtin name, expression source or CSV path (relative to the config).
  std::string text = "sin_sin";
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::multiplication;
  std::string t;   ///< multiplier
  std::string tx;  ///< composition map, x component
  std::string ty;  ///< composition map, y component
  int m = 4;       ///< Bernstein degrees
  int n = 4;
};

struct ScaleSpec {
  std::optional<double> constant;
  std::string expression;
};

/// Either a full lattice (rows indexed by the y knot) or an expression
/// sampled at the knots.
struct LatticeSpec {
  std::vector<std::vector<double>> rows;
  std::string expression;
  std::optional<double> constant;
};

struct BilinearSpec {
  LatticeSpec z;
  LatticeSpec s;
};

struct DimensionSpec {
  int res = 1025;
  int k_min = 3;
  int k_max = 9;
};

struct ApproxSpec {
  int m = 2;
  int n = 2;
  double eps = 0.1;
  int grid_res = 129;
  int max_degree = 8;
};

struct AnalysisSpec {
  bool conformance = true;
  bool bounds = true;
  std::vector<double> lp;
  std::optional<DimensionSpec> dimension;
  std::optional<ApproxSpec> approx;
};

struct OutputSpec {
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> pgm;
  std::optional<std::filesystem::path> obj;
  std::optional<std::filesystem::path> report;
  int res = 65;
};

enum class SurfaceKind { alpha, bilinear };

struct ExperimentConfig {
  std::string name = "experiment";
  NetSpec net;
  SurfaceKind surface = SurfaceKind::alpha;
  FunctionSpec f;
  OperatorSpec op;
  ScaleSpec alpha;
  BilinearSpec bilinear;
  SolverConfig solver;
  AnalysisSpec analysis;
  OutputSpec outputs;
  /// Directory relative paths resolve against.
  std::filesystem::path base_dir = ".";
};

/// Parses and validates a JSON config. ParseError for malformed JSON,
/// ValidationError (message starts with the field path) for bad content.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

Net make_net(const NetSpec& spec);
BivariateFn make_function(const FunctionSpec& spec, const std::filesystem::path& base_dir = ".");
PerturbOperator make_operator(const OperatorSpec& spec, Rect domain);
ScaleFunction make_scale(const ScaleSpec& spec, Rect domain);
BilinearData make_bilinear(const BilinearSpec& spec, const Net& net);

/// Names accepted by FunctionSpec::Kind::builtin.
std::vector<std::string> builtin_names();

}  // namespace fsk
