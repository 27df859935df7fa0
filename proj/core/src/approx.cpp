#include "fsk/approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsk/analysis.hpp"
#include "fsk/error.hpp"

namespace fsk {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kLawsonMaxIter = 200;
constexpr double kLawsonGap = 1e-6;
constexpr double kPruneRatio = 1e-13;

struct Fit {
  VectorXd coef;
  double sup_error = 0.0;
  // Certified lower bound on the discrete minimax error.
  double lower_bound = 0.0;
  int iterations = 0;
};

double max_abs(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Fit least_squares(const MatrixXd& a, const VectorXd& b) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  if (qr.rank() < a.cols()) {
    std::ostringstream msg;
    msg << "design matrix has rank " << qr.rank() << " < " << a.cols() << "; refine the grid";
    throw Error(Errc::rank_deficient, msg.str());
  }
  Fit fit;
  fit.coef = qr.solve(b);
  const VectorXd r = b - a * fit.coef;
  fit.sup_error = max_abs(r);
  // Uniform weights: the RMS residual of the least-squares fit.
  fit.lower_bound = r.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, r.size())));
  fit.iterations = 1;
  return fit;
}

// Lawson's algorithm: reweight by |residual| until the weighted least-squares
// lower bound meets the attained sup error.
Fit minimax(const MatrixXd& a, const VectorXd& b) {
  Fit best = least_squares(a, b);
  const double scale = std::max(1.0, max_abs(b));
  if (best.sup_error <= 1e-14 * scale) {
    best.lower_bound = best.sup_error;
    return best;
  }
  const auto rows = static_cast<std::size_t>(a.rows());
  std::vector<Eigen::Index> active(rows);
  for (std::size_t k = 0; k < rows; ++k) active[k] = static_cast<Eigen::Index>(k);
  std::vector<double> w(rows, 1.0 / static_cast<double>(rows));
  VectorXd residual = b - a * best.coef;

  for (int it = 1; it <= kLawsonMaxIter; ++it) {
    // Reweight, normalize and prune.
    double total = 0.0;
    for (Eigen::Index r : active) {
      auto& wr = w[static_cast<std::size_t>(r)];
      wr *= std::abs(residual(r));
      total += wr;
    }
    if (!(total > 0.0)) break;
    double wmax = 0.0;
    for (Eigen::Index r : active) {
      auto& wr = w[static_cast<std::size_t>(r)];
      wr /= total;
      wmax = std::max(wmax, wr);
    }
    std::erase_if(active, [&](Eigen::Index r) { return w[static_cast<std::size_t>(r)] < kPruneRatio * wmax; });
    if (static_cast<Eigen::Index>(active.size()) < a.cols()) break;

    MatrixXd aw(static_cast<Eigen::Index>(active.size()), a.cols());
    VectorXd bw(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double s = std::sqrt(w[static_cast<std::size_t>(active[k])]);
      aw.row(static_cast<Eigen::Index>(k)) = s * a.row(active[k]);
      bw(static_cast<Eigen::Index>(k)) = s * b(active[k]);
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(aw);
    VectorXd coef = qr.solve(bw);
    residual = b - a * coef;
    const double err = max_abs(residual);
    // Weights sum to one, so this bounds every candidate's sup error from below.
    best.lower_bound = std::max(best.lower_bound, (bw - aw * coef).norm());
    if (err < best.sup_error) {
      best.coef = coef;
      best.sup_error = err;
    }
    best.iterations = it + 1;
    if (best.sup_error - best.lower_bound <= kLawsonGap * best.sup_error) break;
  }
  return best;
}

Fit fit(const MatrixXd& a, const VectorXd& b, ApproxNorm norm) {
  return norm == ApproxNorm::l2 ? least_squares(a, b) : minimax(a, b);
}

void check_grid(int grid_res, std::size_t dimension) {
  if (grid_res < 2 || static_cast<std::size_t>(grid_res) * static_cast<std::size_t>(grid_res) < 4 * dimension) {
    std::ostringstream msg;
    msg << "grid " << grid_res << "^2 is too coarse for " << dimension << " basis functions";
    throw Error(Errc::rank_deficient, msg.str());
  }
}

VectorXd samples(const SampledField& grid, const BivariateFn& f) {
  const SampledField s = sample(grid, f);
  return Eigen::Map<const VectorXd>(s.values().data(), static_cast<Eigen::Index>(s.size()));
}

MatrixXd design(const SampledField& grid, const PolySpace& space) {
  MatrixXd a(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(space.dimension()));
  for (std::size_t k = 0; k < space.dimension(); ++k) a.col(static_cast<Eigen::Index>(k)) = samples(grid, space.monomial(k));
  return a;
}

ApproxResult to_result(const Fit& fit, int grid_res, ApproxNorm norm) {
  ApproxResult r;
  r.coefficients.assign(fit.coef.data(), fit.coef.data() + fit.coef.size());
  r.sup_error = fit.sup_error;
  r.lower_bound = std::min(fit.lower_bound, fit.sup_error);
  r.grid_res = grid_res;
  r.method = norm == ApproxNorm::l2 ? "least-squares" : "minimax-irls";
  r.iterations = fit.iterations;
  return r;
}

ApproxResult best_approx_on(const BivariateFn& f, const PolySpace& space, const SampledField& grid, int grid_res,
                            ApproxNorm norm) {
  check_grid(grid_res, space.dimension());
  return to_result(fit(design(grid, space), samples(grid, f), norm), grid_res, norm);
}

MatrixXd fractal_design(const PolySpace& space, const ScaleFunction& alpha, const PerturbOperator& op, const Net& net,
                        int grid_res, SolverConfig config) {
  config.grid_res = grid_res;
  config.engine = Engine::grid;
  const SampledField grid = SampledField::on_net(net, grid_res, grid_res);
  MatrixXd a(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(space.dimension()));
  for (std::size_t k = 0; k < space.dimension(); ++k) {
    const AlphaSurface image(space.monomial(k), op, alpha, net, config);
    const SampledField& col = image.field();
    a.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const VectorXd>(col.values().data(), static_cast<Eigen::Index>(col.size()));
  }
  return a;
}

}  // namespace

PolySpace::PolySpace(int m, int n, Rect domain, DegreeConvention convention)
    : m_(m), n_(n), domain_(domain), convention_(convention) {
  if (m < 0 || n < 0) throw Error(Errc::validation_error, "polynomial degrees must be non-negative");
  if (convention == DegreeConvention::total) {
    for (int d = 0; d <= m + n; ++d)
      for (int j = 0; j <= d; ++j) exponents_.emplace_back(d - j, j);
  } else {
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= m; ++i) exponents_.emplace_back(i, j);
  }
}

Point2 PolySpace::to_reference(double x, double y) const {
  return {2.0 * (x - domain_.x0) / domain_.width() - 1.0, 2.0 * (y - domain_.y0) / domain_.height() - 1.0};
}

double PolySpace::basis(std::size_t k, double x, double y) const {
  const Point2 r = to_reference(x, y);
  const auto [i, j] = exponents_[k];
  return std::pow(r.x, i) * std::pow(r.y, j);
}

double PolySpace::evaluate(std::span<const double> coefficients, double x, double y) const {
  if (coefficients.size() != exponents_.size())
    throw Error(Errc::shape_mismatch, "coefficient count does not match the space dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < exponents_.size(); ++k) s += coefficients[k] * basis(k, x, y);
  return s;
}

BivariateFn PolySpace::polynomial(std::vector<double> coefficients) const {
  if (coefficients.size() != exponents_.size())
    throw Error(Errc::shape_mismatch, "coefficient count does not match the space dimension");
  return [space = *this, c = std::move(coefficients)](double x, double y) { return space.evaluate(c, x, y); };
}

BivariateFn PolySpace::monomial(std::size_t k) const {
  return [space = *this, k](double x, double y) { return space.basis(k, x, y); };
}

PolySpace poly_basis(int m, int n, Rect domain, DegreeConvention convention) {
  return PolySpace(m, n, domain, convention);
}

ApproxResult best_approx(const BivariateFn& f, const PolySpace& space, int grid_res, ApproxNorm norm) {
  check_grid(grid_res, space.dimension());
  return best_approx_on(f, space, SampledField::uniform(space.domain(), grid_res, grid_res), grid_res, norm);
}

AlphaSurface fractal_polynomial(const PolySpace& space, std::vector<double> coefficients, const PerturbOperator& op,
                                const ScaleFunction& alpha, const Net& net, SolverConfig config) {
  return build_alpha_surface(space.polynomial(std::move(coefficients)), op, alpha, net, config);
}

ApproxResult best_fractal_approx(const BivariateFn& f, int m, int n, const ScaleFunction& alpha,
                                 const PerturbOperator& op, const Net& net, int grid_res, ApproxNorm norm,
                                 SolverConfig config) {
  const PolySpace space = poly_basis(m, n, net.domain());
  check_grid(grid_res, space.dimension());
  const SampledField grid = SampledField::on_net(net, grid_res, grid_res);
  return to_result(fit(fractal_design(space, alpha, op, net, grid_res, config), samples(grid, f), norm), grid_res,
                   norm);
}

EpsilonResult epsilon_fractal_polynomial(const BivariateFn& f, double eps, const PerturbOperator& op, const Net& net,
                                         const EpsilonOptions& options) {
  if (!(eps > 0.0)) throw Error(Errc::validation_error, "epsilon must be positive");
  SolverConfig config = options.solver;
  config.grid_res = options.grid_res;
  config.engine = Engine::grid;
  const SampledField grid = SampledField::on_net(net, options.grid_res, options.grid_res);
  const SampledField fs = sample(grid, f);

  // Second stage: alpha from the threshold, then the achieved error.
  auto finish = [&](EpsilonResult r) -> std::optional<EpsilonResult> {
    r.p_sup = sup_norm(sample(grid, r.p));
    r.threshold = (eps / 2.0) / (eps / 2.0 + op.norms().id_minus * r.p_sup);
    r.alpha = 0.9 * r.threshold;
    AlphaSurface pa = build_alpha_surface(r.p, op, ScaleFunction::constant(r.alpha), net, config);
    r.achieved_error = sup_norm(combine(1.0, fs, -1.0, pa.field()));
    r.p_alpha = pa;
    if (r.achieved_error < eps) return r;
    return std::nullopt;
  };

  for (int d = 0; d <= options.max_degree; ++d) {
    const int m = (d + 1) / 2;
    const int n = d / 2;
    const PolySpace space = poly_basis(m, n, net.domain());
    const ApproxResult fit = best_approx_on(f, space, grid, options.grid_res, ApproxNorm::sup);
    if (!(fit.sup_error < eps / 2.0)) continue;
    EpsilonResult r;
    r.p = space.polynomial(fit.coefficients);
    r.stage_one_method = "minimax";
    r.m = m;
    r.n = n;
    r.coefficients = fit.coefficients;
    r.stage_one_error = fit.sup_error;
    if (auto done = finish(std::move(r))) return *done;
  }
  for (int k = 1; 2 * k <= options.max_degree; ++k) {
    EpsilonResult r;
    r.p = bernstein_operator(k, k, net.domain()).apply(f);
    r.stage_one_error = sup_norm(combine(1.0, fs, -1.0, sample(grid, r.p)));
    if (!(r.stage_one_error < eps / 2.0)) continue;
    r.stage_one_method = "bernstein";
    r.m = k;
    r.n = k;
    if (auto done = finish(std::move(r))) return *done;
  }
  std::ostringstream msg;
  msg << "no polynomial of total degree <= " << options.max_degree << " reaches eps = " << eps;
  throw Error(Errc::degree_budget_exceeded, msg.str());
}

ChainReport verify_approx_chain(const BivariateFn& f, int m, int n, const ScaleFunction& alpha,
                                const PerturbOperator& op, const Net& net, int grid_res, double slack,
                                SolverConfig config) {
  config.grid_res = grid_res;
  config.engine = Engine::grid;
  const PolySpace space = poly_basis(m, n, net.domain());
  const SampledField grid = SampledField::on_net(net, grid_res, grid_res);
  const ApproxResult plain = best_approx_on(f, space, grid, grid_res, ApproxNorm::sup);
  const ApproxResult frac = best_fractal_approx(f, m, n, alpha, op, net, grid_res, ApproxNorm::sup, config);
  const SampledField fs = sample(grid, f);

  ChainReport r;
  r.m = m;
  r.n = n;
  r.e = plain.sup_error;
  r.e_alpha = frac.sup_error;
  r.f_sup = sup_norm(fs);
  r.alpha_sup = alpha.sup();
  r.id_minus = op.norms().id_minus;
  r.coeff_e = (1.0 + r.alpha_sup * (r.id_minus - 1.0)) / (1.0 - r.alpha_sup);
  r.coeff_f = r.alpha_sup * r.id_minus / (1.0 - r.alpha_sup);
  r.rhs = r.coeff_e * r.e + r.coeff_f * r.f_sup;
  const AlphaSurface candidate = fractal_polynomial(space, plain.coefficients, op, alpha, net, config);
  r.candidate_error = sup_norm(combine(1.0, fs, -1.0, candidate.field()));
  r.slack = slack;
  r.pass = r.e_alpha <= r.rhs + slack;
  return r;
}

}  // namespace fsk
