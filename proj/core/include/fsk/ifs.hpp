#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsk/error.hpp"
#include "fsk/field.hpp"
#include "fsk/net.hpp"

namespace fsk {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// F_ij(x, y, z) = slope_ij(x, y) * z + offset_ij(x, y).
struct ZAffineParts {
  std::function<double(int, int, double, double)> slope;
  std::function<double(int, int, double, double)> offset;
};

/// The vertical maps F_ij of an FIS together with the horizontal maps, the
/// Lipschitz constants gamma_ij and the interpolation data z_kl.
class VerticalMapFamily {
 public:
  using Evaluator = std::function<double(int i, int j, double x, double y, double z)>;

  struct Parts {
    Net net;
    AffineMaps ux;
    AffineMaps vy;
    /// General evaluator; may be left empty when `affine` is provided.
    Evaluator evaluator;
    std::optional<ZAffineParts> affine;
    /// N x M, entry (i-1, j-1) bounds the z-Lipschitz constant of F_ij.
    Lattice gamma;
    /// (N+1) x (M+1) interpolation data.
    Lattice knot_values;
    /// Starting iterate for the grid solver and truncation value for the
    /// pointwise engine.
    BivariateFn initial_guess;
  };

  explicit VerticalMapFamily(Parts parts);

  const Net& net() const { return parts_.net; }
  const AffineMaps& ux() const { return parts_.ux; }
  const AffineMaps& vy() const { return parts_.vy; }
  const ZAffineParts* affine() const { return parts_.affine ? &*parts_.affine : nullptr; }
  double gamma(int i, int j) const { return parts_.gamma(i - 1, j - 1); }
  double max_gamma() const { return parts_.gamma.max_abs(); }
  const Lattice& knot_values() const { return parts_.knot_values; }
  double initial_guess(double x, double y) const { return parts_.initial_guess(x, y); }

  double operator()(int i, int j, double x, double y, double z) const { return parts_.evaluator(i, j, x, y, z); }

  /// (u_i^{-1}(x), v_j^{-1}(y)) clamped to the domain.
  Point2 preimage(Cell cell, double x, double y) const;

 private:
  Parts parts_;
};

/// Read-Bajraktarevic operator compiled onto a fixed grid: pullback
/// stencils per axis and, for z-affine families, per-node slope/offset.
class GridOperator {
 public:
  GridOperator(const VerticalMapFamily& family, const SampledField& grid);

  const SampledField& grid() const { return grid_; }
  double contraction() const { return contraction_; }
  /// (Tg) on the grid. Throws ResolutionMismatch if g lives elsewhere.
  SampledField apply(const SampledField& g) const;

 private:
  struct AxisPlan {
    std::vector<int> cell;
    std::vector<double> preimage;
    std::vector<Stencil> stencil;
  };
  static AxisPlan plan_axis(const AffineMaps& maps, std::span<const double> knots, std::span<const double> nodes);

  SampledField grid_;
  AxisPlan px_;
  AxisPlan py_;
  std::vector<double> slope_;
  std::vector<double> offset_;
  std::shared_ptr<const VerticalMapFamily> family_;  // set only for non-affine families
  double contraction_ = 0.0;
};

/// One application of T on g's grid (which must cover I x J and contain the
/// knots).
SampledField rb_apply(const VerticalMapFamily& family, const SampledField& g);

struct SolveOptions {
  double tol = 1e-10;
  /// 0 selects ceil(log(tol / (1 + r0)) / log(max gamma)) + 16.
  int max_iter = 0;
};

struct SolveResult {
  SampledField field;
  int iterations = 0;
  /// Sup-norm residual ||T g - g|| of the last measured iterate; the
  /// returned field is T of that iterate.
  double residual = 0.0;
  double initial_residual = 0.0;
  std::vector<double> history;
  bool converged = false;
};

/// Thrown when the iteration budget runs out; carries the best iterate.
class MaxIterExceeded : public Error {
 public:
  explicit MaxIterExceeded(SolveResult best);
  const SolveResult& best() const { return *best_; }

 private:
  std::shared_ptr<const SolveResult> best_;
};

int default_max_iter(double tol, double initial_residual, double contraction);

SolveResult fixed_point_solve(const GridOperator& op, SampledField initial, const SolveOptions& options);
SolveResult fixed_point_solve(const VerticalMapFamily& family, int nx, int ny, const SolveOptions& options);

struct OrbitPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int level = 0;
};

struct SurfaceOrbit {
  std::vector<OrbitPoint> points;
  int depth = 0;
};

inline constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 22;

/// All W_ij images of the seed up to `depth`, de-duplicated by position.
/// Values are exact attractor values when the seed values are.
SurfaceOrbit orbit_evaluate(const VerticalMapFamily& family, std::span<const OrbitPoint> seed, int depth,
                            std::size_t point_budget = kDefaultPointBudget);
/// Seeded with the (N+1)(M+1) knot triples.
SurfaceOrbit orbit_evaluate(const VerticalMapFamily& family, int depth,
                            std::size_t point_budget = kDefaultPointBudget);

struct OrbitCheck {
  double max_residual = 0.0;
  std::size_t checked = 0;
  std::size_t missing_preimages = 0;
};

/// Re-evaluates the self-referential equation at every orbit point whose
/// preimage is also in the orbit.
OrbitCheck orbit_residual(const VerticalMapFamily& family, const SurfaceOrbit& orbit);

/// Backward-chain depth needed for the pointwise engine to reach `tol`.
int pointwise_depth(const VerticalMapFamily& family, double tol);

/// Attractor value at (x, y) by unrolling f = F_ij(u^-1 x, v^-1 y, f(u^-1 x, v^-1 y))
/// `depth` times and truncating with the initial guess. `first_cell`
/// overrides the cell used for the first step (edge-continuity checks).
double pointwise_evaluate(const VerticalMapFamily& family, double x, double y, int depth,
                          std::optional<Cell> first_cell = std::nullopt);

struct Defect {
  std::string where;
  double value = 0.0;
};

struct ConformanceReport {
  double corner_defect = 0.0;
  double matching_defect = 0.0;
  std::vector<Defect> worst;
  double tolerance = 1e-12;
  bool pass = true;
};

/// max |F_ij(x_k, y_l, z_kl) - z_{tau(i,k), tau(j,l)}| over cells and the
/// four domain corners.
ConformanceReport verify_corner_conditions(const VerticalMapFamily& family, const Lattice& data,
                                           double tol = 1e-12);
ConformanceReport verify_corner_conditions(const VerticalMapFamily& family, double tol = 1e-12);

/// Compares F_ij and F_{i+1,j} on the shared vertical grid lines (and the
/// horizontal analogue), sampled over n_samples abscissae and three z levels
/// spanning [min z - 1, max z + 1].
ConformanceReport verify_matching_conditions(const VerticalMapFamily& family, int n_samples = 64,
                                             double tol = 1e-12);

ConformanceReport merge(const ConformanceReport& a, const ConformanceReport& b);

enum class Engine { grid, pointwise };

struct SolverConfig {
  int grid_res = 257;
  double tol = 1e-10;
  int max_iter = 0;
  Engine engine = Engine::grid;
};

/// An evaluable attractor: a family plus both engines. Copies share the
/// family and the solution cache; evaluation is safe for concurrent reads.
class FractalSurface {
 public:
  explicit FractalSurface(VerticalMapFamily family, SolverConfig config = {});

  const VerticalMapFamily& family() const { return *family_; }
  const SolverConfig& config() const { return config_; }

  /// Grid solution at the configured resolution (computed once).
  const SolveResult& solution() const;
  SolveResult solve(int nx, int ny) const;

  double value(double x, double y) const;
  std::vector<double> evaluate(std::span<const Point2> points) const;
  SampledField evaluate_grid(int nx, int ny) const;
  SurfaceOrbit orbit(int depth, std::size_t point_budget = kDefaultPointBudget) const;
  int pointwise_depth() const;

 private:
  struct Cache;
  std::shared_ptr<const VerticalMapFamily> family_;
  SolverConfig config_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace fsk
