#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsk/alpha.hpp"
#include "fsk/field.hpp"
#include "fsk/net.hpp"

namespace fsk {

/// `total`: x^i y^j with i + j <= m + n. `tensor`: i <= m and j <= n.
enum class DegreeConvention { total, tensor };

/// Monomials on `domain`, evaluated in coordinates rescaled to [-1, 1]^2.
/// Coefficients always refer to the rescaled frame.
class PolySpace {
 public:
  PolySpace(int m, int n, Rect domain = kUnitSquare, DegreeConvention convention = DegreeConvention::total);

  int m() const { return m_; }
  int n() const { return n_; }
  const Rect& domain() const { return domain_; }
  DegreeConvention convention() const { return convention_; }
  const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }
  std::size_t dimension() const { return exponents_.size(); }

  /// Rescaled coordinates (2 (x - x0) / width - 1, likewise y).
  Point2 to_reference(double x, double y) const;
  double basis(std::size_t k, double x, double y) const;
  double evaluate(std::span<const double> coefficients, double x, double y) const;
  BivariateFn polynomial(std::vector<double> coefficients) const;
  BivariateFn monomial(std::size_t k) const;

 private:
  int m_;
  int n_;
  Rect domain_;
  DegreeConvention convention_;
  std::vector<std::pair<int, int>> exponents_;
};

PolySpace poly_basis(int m, int n, Rect domain = kUnitSquare, DegreeConvention convention = DegreeConvention::total);

enum class ApproxNorm { sup, l2 };

struct ApproxResult {
  std::vector<double> coefficients;
  /// Grid sup norm of f minus the fitted element: the E_{m,n} estimate.
  double sup_error = 0.0;
  /// Certified lower bound on the discrete minimax error over the same grid
  /// (weighted least-squares residual with weights summing to one). The gap
  /// to sup_error measures how far the estimate is from the grid optimum.
  double lower_bound = 0.0;
  int grid_res = 0;
  /// "least-squares" or "minimax-irls".
  std::string method;
  int iterations = 0;
};

/// Discrete best approximation on a grid_res^2 uniform grid. L2 uses a
/// pivoted QR least-squares fit; sup uses Lawson's iteratively reweighted
/// least squares and never returns worse than the least-squares fit.
/// RankDeficient when grid_res^2 < 4 |basis| or the design matrix is singular.
ApproxResult best_approx(const BivariateFn& f, const PolySpace& space, int grid_res = 129,
                         ApproxNorm norm = ApproxNorm::sup);

/// p^alpha = F^alpha(p).
AlphaSurface fractal_polynomial(const PolySpace& space, std::vector<double> coefficients, const PerturbOperator& op,
                                const ScaleFunction& alpha, const Net& net, SolverConfig config = {});

/// Best approximation of f from the span of the fractal images of the
/// monomials (sampled on the net grid at grid_res). Coefficients are those of
/// p with p^alpha the fitted element.
ApproxResult best_fractal_approx(const BivariateFn& f, int m, int n, const ScaleFunction& alpha,
                                 const PerturbOperator& op, const Net& net, int grid_res = 129,
                                 ApproxNorm norm = ApproxNorm::sup, SolverConfig config = {});

struct EpsilonOptions {
  int max_degree = 8;
  int grid_res = 129;
  SolverConfig solver{};
};

struct EpsilonResult {
  BivariateFn p;
  /// "minimax" for a ladder polynomial, "bernstein" for the fallback.
  std::string stage_one_method;
  int m = 0;
  int n = 0;
  std::vector<double> coefficients;
  double stage_one_error = 0.0;
  double p_sup = 0.0;
  double threshold = 0.0;
  double alpha = 0.0;
  double achieved_error = 0.0;
  std::optional<AlphaSurface> p_alpha;
};

/// Finds p with ||f - p|| < eps / 2 on the grid, then a constant alpha at 0.9
/// of (eps / 2) / (eps / 2 + ||Id - L|| ||p||), and checks ||f - p^alpha|| < eps.
/// DegreeBudgetExceeded if no degree up to max_degree succeeds.
EpsilonResult epsilon_fractal_polynomial(const BivariateFn& f, double eps, const PerturbOperator& op, const Net& net,
                                         const EpsilonOptions& options = {});

struct ChainReport {
  int m = 0;
  int n = 0;
  double e = 0.0;
  double e_alpha = 0.0;
  double f_sup = 0.0;
  double alpha_sup = 0.0;
  double id_minus = 0.0;
  double coeff_e = 0.0;
  double coeff_f = 0.0;
  double rhs = 0.0;
  /// ||f - p_f^alpha|| for the fractal image of the ordinary best approximant.
  double candidate_error = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// E^alpha <= [(1 + ||alpha|| (||Id - L|| - 1)) / (1 - ||alpha||)] E
///          + [||alpha|| ||Id - L|| / (1 - ||alpha||)] ||f||.
ChainReport verify_approx_chain(const BivariateFn& f, int m, int n, const ScaleFunction& alpha,
                                const PerturbOperator& op, const Net& net, int grid_res = 129, double slack = 2e-6,
                                SolverConfig config = {});

}  // namespace fsk
