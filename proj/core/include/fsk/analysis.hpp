#pragma once

#include <string>
#include <vector>

#include "fsk/alpha.hpp"
#include "fsk/field.hpp"

namespace fsk {

double sup_norm(const SampledField& field);

/// Composite midpoint rule: each grid cell contributes |v_c|^p times its area,
/// with v_c the mean of the cell's four corner values. BadExponent if p < 1.
double lp_norm(const SampledField& field, double p);

struct LpBoundReport {
  double p = 2.0;
  double lhs = 0.0;  ///< ||f^alpha - f||_p
  double rhs = 0.0;  ///< ||alpha|| / (1 - ||alpha||) * ||f - Lf||_p
  double slack = 1e-6;
  bool pass = false;
};

/// Both sides on the surface's working grid.
LpBoundReport verify_lp_bound(const AlphaSurface& surface, double p, double slack = 1e-6);

struct BoxCountReport {
  std::vector<int> levels;
  std::vector<double> scales;
  std::vector<double> counts;
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS residual of the log-log fit (natural logarithms).
  double residual = 0.0;
  double dimension = 0.0;
  /// Number of coarse levels left out of the final fit.
  int dropped = 0;
};

/// Column-range box counting over dyadic scales eps_k = width / 2^k for
/// k = k_min..k_max. Needs a uniform grid with (nx - 1) and (ny - 1)
/// divisible by 2^k_max (ResolutionTooCoarse otherwise). The two coarsest
/// levels are dropped when the fit residual exceeds 0.05.
BoxCountReport box_count_dimension(const SampledField& field, int k_min = 3, int k_max = 9);

/// Second-order Ditzian-Totik modulus on [-1, 1]^2 with phi(t) = sqrt(1 - t^2),
/// by brute force over a sampling_res^2 lattice of (x, y) and geometric step
/// lattices {delta * rho^k >= h_min} with rho = h_min^(1 / (sampling_res - 1)).
/// Step lattices for different deltas nest whenever the deltas differ by a
/// power of rho.
double dt_modulus(const BivariateFn& f, double delta1, double delta2, int sampling_res = 128,
                  double h_min = 1e-3);

struct ConvergenceRow {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slack = 0.0;
  bool all_pass = true;
};

/// ||f^{alpha_n} - f|| against (||alpha_n|| / (1 - ||alpha_n||)) ||f - Lf||.
ConvergenceTable convergence_table_alpha(const BivariateFn& f, const PerturbOperator& op, const Net& net,
                                         const std::vector<ScaleFunction>& alphas, SolverConfig config = {});

/// ||f^alpha_{L_n} - f|| against (||alpha|| / (1 - ||alpha||)) ||f - L_n f||.
ConvergenceTable convergence_table_operator(const BivariateFn& f, const ScaleFunction& alpha, const Net& net,
                                            const std::vector<PerturbOperator>& ops, SolverConfig config = {});

}  // namespace fsk
