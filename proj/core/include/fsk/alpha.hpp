#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsk/field.hpp"
#include "fsk/ifs.hpp"
#include "fsk/net.hpp"

namespace fsk {

/// Continuous scale function alpha on the domain together with a cached
/// grid estimate of its sup norm.
class ScaleFunction {
 public:
  static ScaleFunction constant(double c);
  /// Rejects (InadmissibleScale) when the grid sup estimate exceeds 1 - 1e-9.
  ScaleFunction(BivariateFn fn, Rect domain, int res = 257);

  double operator()(double x, double y) const { return fn_(x, y); }
  const BivariateFn& fn() const { return fn_; }
  double sup() const { return sup_; }
  std::optional<double> constant_value() const { return constant_; }

 private:
  ScaleFunction() = default;
  BivariateFn fn_;
  double sup_ = 0.0;
  std::optional<double> constant_;
};

enum class OperatorKind { multiplication, composition, bernstein };

const char* to_string(OperatorKind kind) noexcept;

/// Norm information for L. `id_minus` is the value used by every threshold
/// (exact when `id_minus_exact`, otherwise the safe bound 1 + ||L||);
/// `id_minus_lower` is a sampled lower bound from random test functions.
struct NormData {
  double norm = 1.0;
  bool norm_exact = true;
  double id_minus = 2.0;
  bool id_minus_exact = false;
  double id_minus_lower = 0.0;
};

using PlaneMap = std::function<Point2(double, double)>;

/// Bounded linear operator on C(I x J) that agrees with f at the four domain
/// corners.
class PerturbOperator {
 public:
  using Apply = std::function<BivariateFn(const BivariateFn&)>;

  PerturbOperator(OperatorKind kind, Rect domain, Apply apply, NormData norms, std::string description);

  OperatorKind kind() const { return kind_; }
  const Rect& domain() const { return domain_; }
  const NormData& norms() const { return norms_; }
  const std::string& describe() const { return description_; }

  /// Lf as a function. Bernstein samples f once here.
  BivariateFn apply(const BivariateFn& f) const { return apply_(f); }

 private:
  OperatorKind kind_;
  Rect domain_;
  Apply apply_;
  NormData norms_;
  std::string description_;
};

/// (Lf)(x, y) = t(x, y) f(x, y). t must equal 1 at the four corners.
PerturbOperator multiplication_operator(BivariateFn t, Rect domain = kUnitSquare, int res = 257,
                                        std::string description = "multiplication");
/// (Lf) = f o t_map. t_map must fix the four corners and map into the domain.
PerturbOperator composition_operator(PlaneMap t_map, Rect domain = kUnitSquare, int res = 257,
                                     std::string description = "composition");
/// Bivariate Bernstein operator of degrees (m, n), affinely rescaled to `domain`.
PerturbOperator bernstein_operator(int m, int n, Rect domain = kUnitSquare);

/// f^alpha for a seed f, operator L, scale alpha and net, evaluable by both
/// engines of FractalSurface.
class AlphaSurface {
 public:
  AlphaSurface(BivariateFn f, PerturbOperator op, ScaleFunction alpha, Net net, SolverConfig config = {});

  const BivariateFn& f() const { return state_->f; }
  const BivariateFn& lf() const { return state_->lf; }
  const PerturbOperator& op() const { return state_->op; }
  const ScaleFunction& alpha() const { return state_->alpha; }
  const Net& net() const { return state_->surface.family().net(); }
  const FractalSurface& surface() const { return state_->surface; }
  const VerticalMapFamily& family() const { return state_->surface.family(); }

  double value(double x, double y) const { return state_->surface.value(x, y); }
  std::vector<double> evaluate(std::span<const Point2> points) const { return state_->surface.evaluate(points); }
  SampledField evaluate_grid(int nx, int ny) const { return state_->surface.evaluate_grid(nx, ny); }
  /// Grid solution at the configured resolution.
  const SampledField& field() const { return state_->surface.solution().field; }

 private:
  struct State {
    BivariateFn f;
    BivariateFn lf;
    PerturbOperator op;
    ScaleFunction alpha;
    FractalSurface surface;
  };
  std::shared_ptr<const State> state_;
};

AlphaSurface build_alpha_surface(BivariateFn f, const PerturbOperator& op, const ScaleFunction& alpha,
                                 const Net& net, SolverConfig config = {});

/// (||alpha|| / (1 - ||alpha||)) ||f - Lf||, norms measured on the working grid.
double perturbation_bound(const AlphaSurface& surface);

struct NormBounds {
  double fractal_norm_upper = 1.0;
  double invertibility_threshold = 1.0;
  std::optional<double> inverse_norm_upper;
  std::optional<double> bounded_below_constant;
  /// Why the optional entries are absent (empty when present).
  std::string absent_reason;
};

NormBounds operator_norm_bounds(const PerturbOperator& op, const ScaleFunction& alpha);

struct NeumannResult {
  SampledField f_hat;
  int terms = 0;
  int refinements = 0;
  /// ||F^alpha(f_hat) - g|| on the working grid.
  double residual = 0.0;
};

/// Solves F^alpha(f) = g by the Neumann series sum_k (Id - F^alpha)^k g on the
/// working grid, followed by refinement sweeps on the measured residual.
NeumannResult apply_inverse_neumann(const BivariateFn& g, const PerturbOperator& op, const ScaleFunction& alpha,
                                    const Net& net, double tol, SolverConfig config = {}, int max_terms = 500);

}  // namespace fsk
