#include "fsk/alpha.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "fsk/error.hpp"

namespace fsk {
namespace {

constexpr double kScaleMargin = 1e-9;
constexpr double kCornerTol = 1e-12;

double grid_sup(const BivariateFn& fn, Rect domain, int res) {
  SampledField field = sample(SampledField::uniform(domain, res, res), fn);
  double s = 0.0;
  for (double v : field.values()) s = std::max(s, std::abs(v));
  return s;
}

std::array<Point2, 4> corners(Rect d) { return {{{d.x0, d.y0}, {d.x1, d.y0}, {d.x0, d.y1}, {d.x1, d.y1}}}; }

bool same_rect(Rect a, Rect b) {
  const double tol = 1e-12 * std::max({1.0, std::abs(a.x0), std::abs(a.x1), std::abs(a.y0), std::abs(a.y1)});
  return std::abs(a.x0 - b.x0) <= tol && std::abs(a.x1 - b.x1) <= tol && std::abs(a.y0 - b.y0) <= tol &&
         std::abs(a.y1 - b.y1) <= tol;
}

// sup ||f - Lf|| / ||f|| over random trigonometric test functions.
double sampled_id_minus_lower(const PerturbOperator::Apply& apply, Rect domain) {
  constexpr int kTrials = 24;
  constexpr int kRes = 65;
  std::mt19937_64 rng(0x5eedf00dULL);
  std::uniform_real_distribution<double> freq(-8.0, 8.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const SampledField grid = SampledField::uniform(domain, kRes, kRes);
  double best = 0.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    std::array<double, 12> c{};
    for (int r = 0; r < 3; ++r) {
      c[4 * r] = amp(rng);
      c[4 * r + 1] = freq(rng);
      c[4 * r + 2] = freq(rng);
      c[4 * r + 3] = phase(rng);
    }
    BivariateFn f = [c, domain](double x, double y) {
      const double u = (x - domain.x0) / domain.width();
      const double v = (y - domain.y0) / domain.height();
      double s = 0.0;
      for (int r = 0; r < 3; ++r) s += c[4 * r] * std::cos(c[4 * r + 1] * u + c[4 * r + 2] * v + c[4 * r + 3]);
      return s;
    };
    BivariateFn lf = apply(f);
    double fn = 0.0;
    double diff = 0.0;
    for (int iy = 0; iy < kRes; ++iy) {
      for (int ix = 0; ix < kRes; ++ix) {
        const double fv = f(grid.x(ix), grid.y(iy));
        fn = std::max(fn, std::abs(fv));
        diff = std::max(diff, std::abs(fv - lf(grid.x(ix), grid.y(iy))));
      }
    }
    if (fn > 0.0) best = std::max(best, diff / fn);
  }
  return best;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int r = 1; r <= k; ++r) c = c * (n - k + r) / r;
  return c;
}

void bernstein_weights(int m, double t, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) out[static_cast<std::size_t>(i)] = binomial(m, i) * std::pow(t, i) * std::pow(1.0 - t, m - i);
}

}  // namespace

ScaleFunction ScaleFunction::constant(double c) {
  if (!std::isfinite(c) || std::abs(c) > 1.0 - kScaleMargin) {
    std::ostringstream msg;
    msg << "constant scale " << c << " is not below 1 in modulus";
    throw Error(Errc::inadmissible_scale, msg.str());
  }
  ScaleFunction s;
  s.fn_ = [c](double, double) { return c; };
  s.sup_ = std::abs(c);
  s.constant_ = c;
  return s;
}

ScaleFunction::ScaleFunction(BivariateFn fn, Rect domain, int res) : fn_(std::move(fn)) {
  if (!fn_) throw Error(Errc::validation_error, "scale function is empty");
  sup_ = grid_sup(fn_, domain, std::max(res, 2));
  if (!std::isfinite(sup_) || sup_ > 1.0 - kScaleMargin) {
    std::ostringstream msg;
    msg << "scale function sup estimate " << sup_ << " is not below 1";
    throw Error(Errc::inadmissible_scale, msg.str());
  }
}

const char* to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::multiplication: return "multiplication";
    case OperatorKind::composition: return "composition";
    case OperatorKind::bernstein: return "bernstein";
  }
  return "unknown";
}

PerturbOperator::PerturbOperator(OperatorKind kind, Rect domain, Apply apply, NormData norms,
                                 std::string description)
    : kind_(kind), domain_(domain), apply_(std::move(apply)), norms_(norms), description_(std::move(description)) {}

PerturbOperator multiplication_operator(BivariateFn t, Rect domain, int res, std::string description) {
  if (!t) throw Error(Errc::validation_error, "multiplier is empty");
  for (Point2 c : corners(domain)) {
    const double v = t(c.x, c.y);
    if (!(std::abs(v - 1.0) <= kCornerTol)) {
      std::ostringstream msg;
      msg << "t(" << c.x << ", " << c.y << ") = " << v << ", expected 1";
      throw Error(Errc::corner_value_violation, msg.str());
    }
  }
  const double id_minus = grid_sup([&t](double x, double y) { return 1.0 - t(x, y); }, domain, res);
  if (id_minus <= 1e-12) throw Error(Errc::identity_operator, "t is identically 1, so L is the identity");
  NormData norms;
  norms.norm = grid_sup(t, domain, res);
  norms.norm_exact = true;
  norms.id_minus = id_minus;
  norms.id_minus_exact = true;
  PerturbOperator::Apply apply = [t](const BivariateFn& f) -> BivariateFn {
    return [t, f](double x, double y) { return t(x, y) * f(x, y); };
  };
  norms.id_minus_lower = sampled_id_minus_lower(apply, domain);
  return PerturbOperator(OperatorKind::multiplication, domain, std::move(apply), norms, std::move(description));
}

PerturbOperator composition_operator(PlaneMap t_map, Rect domain, int res, std::string description) {
  if (!t_map) throw Error(Errc::validation_error, "composition map is empty");
  for (Point2 c : corners(domain)) {
    const Point2 img = t_map(c.x, c.y);
    if (!(std::abs(img.x - c.x) <= kCornerTol && std::abs(img.y - c.y) <= kCornerTol)) {
      std::ostringstream msg;
      msg << "t(" << c.x << ", " << c.y << ") = (" << img.x << ", " << img.y << ") does not fix the corner";
      throw Error(Errc::corner_fix_violation, msg.str());
    }
  }
  const SampledField grid = SampledField::uniform(domain, res, res);
  double moved = 0.0;
  const double slack = 1e-12 * std::max(domain.width(), domain.height());
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const Point2 img = t_map(grid.x(ix), grid.y(iy));
      if (!(img.x >= domain.x0 - slack && img.x <= domain.x1 + slack && img.y >= domain.y0 - slack &&
            img.y <= domain.y1 + slack))
        throw Error(Errc::out_of_domain, "composition map leaves the domain");
      moved = std::max({moved, std::abs(img.x - grid.x(ix)), std::abs(img.y - grid.y(iy))});
    }
  }
  if (moved <= 1e-12) throw Error(Errc::identity_map, "composition map is the identity");
  PerturbOperator::Apply apply = [t_map, domain](const BivariateFn& f) -> BivariateFn {
    return [t_map, f, domain](double x, double y) {
      const Point2 p = t_map(x, y);
      return f(std::clamp(p.x, domain.x0, domain.x1), std::clamp(p.y, domain.y0, domain.y1));
    };
  };
  NormData norms;
  norms.norm = 1.0;
  norms.norm_exact = true;
  norms.id_minus = 2.0;
  norms.id_minus_exact = false;
  norms.id_minus_lower = sampled_id_minus_lower(apply, domain);
  return PerturbOperator(OperatorKind::composition, domain, std::move(apply), norms, std::move(description));
}

PerturbOperator bernstein_operator(int m, int n, Rect domain) {
  if (m < 1 || n < 1) throw Error(Errc::degree_too_small, "Bernstein degrees must be at least 1");
  PerturbOperator::Apply apply = [m, n, domain](const BivariateFn& f) -> BivariateFn {
    auto samples = std::make_shared<std::vector<double>>(static_cast<std::size_t>((m + 1) * (n + 1)));
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= m; ++i)
        (*samples)[static_cast<std::size_t>(k * (m + 1) + i)] =
            f(domain.x0 + domain.width() * i / m, domain.y0 + domain.height() * k / n);
    return [m, n, domain, samples](double x, double y) {
      thread_local std::vector<double> px;
      thread_local std::vector<double> py;
      bernstein_weights(m, (x - domain.x0) / domain.width(), px);
      bernstein_weights(n, (y - domain.y0) / domain.height(), py);
      double s = 0.0;
      for (int k = 0; k <= n; ++k) {
        double row = 0.0;
        for (int i = 0; i <= m; ++i) row += (*samples)[static_cast<std::size_t>(k * (m + 1) + i)] * px[static_cast<std::size_t>(i)];
        s += row * py[static_cast<std::size_t>(k)];
      }
      return s;
    };
  };
  NormData norms;
  norms.norm = 1.0;
  norms.norm_exact = true;
  norms.id_minus = 2.0;
  norms.id_minus_exact = false;
  norms.id_minus_lower = sampled_id_minus_lower(apply, domain);
  std::ostringstream name;
  name << "bernstein(" << m << "," << n << ")";
  return PerturbOperator(OperatorKind::bernstein, domain, std::move(apply), norms, name.str());
}

AlphaSurface::AlphaSurface(BivariateFn f, PerturbOperator op, ScaleFunction alpha, Net net, SolverConfig config) {
  if (!f) throw Error(Errc::validation_error, "seed function is empty");
  if (!same_rect(op.domain(), net.domain()))
    throw Error(Errc::validation_error, "operator domain differs from the net domain");
  BivariateFn lf = op.apply(f);
  AffineMaps ux = build_affine_maps(net, Axis::x);
  AffineMaps vy = build_affine_maps(net, Axis::y);

  ZAffineParts parts;
  parts.slope = [alpha, ux, vy](int i, int j, double x, double y) { return alpha(ux[i](x), vy[j](y)); };
  parts.offset = [alpha, ux, vy, f, lf](int i, int j, double x, double y) {
    const double u = ux[i](x);
    const double v = vy[j](y);
    return f(u, v) - alpha(u, v) * lf(x, y);
  };
  Lattice knots(net.n() + 1, net.m() + 1);
  for (int l = 0; l <= net.m(); ++l)
    for (int k = 0; k <= net.n(); ++k) knots(k, l) = f(net.x(k), net.y(l));

  VerticalMapFamily::Parts family{net,   ux, vy, {}, parts, Lattice(net.n(), net.m(), alpha.sup()),
                                  knots, f};
  state_ = std::make_shared<const State>(
      State{f, lf, op, alpha, FractalSurface(VerticalMapFamily(std::move(family)), config)});
}

AlphaSurface build_alpha_surface(BivariateFn f, const PerturbOperator& op, const ScaleFunction& alpha,
                                 const Net& net, SolverConfig config) {
  return AlphaSurface(std::move(f), op, alpha, net, config);
}

double perturbation_bound(const AlphaSurface& surface) {
  const int res = surface.surface().config().grid_res;
  const SampledField grid = SampledField::on_net(surface.net(), res, res);
  const BivariateFn& f = surface.f();
  const BivariateFn& lf = surface.lf();
  const SampledField diff = sample(grid, [&f, &lf](double x, double y) { return f(x, y) - lf(x, y); });
  double d = 0.0;
  for (double v : diff.values()) d = std::max(d, std::abs(v));
  const double a = surface.alpha().sup();
  return a / (1.0 - a) * d;
}

NormBounds operator_norm_bounds(const PerturbOperator& op, const ScaleFunction& alpha) {
  const double a = alpha.sup();
  const double l = op.norms().norm;
  const double d = op.norms().id_minus;
  NormBounds b;
  b.fractal_norm_upper = 1.0 + a * d / (1.0 - a);
  b.invertibility_threshold = 1.0 / (1.0 + d);
  if (a * l < 1.0) {
    b.inverse_norm_upper = (1.0 + a) / (1.0 - a * l);
    b.bounded_below_constant = (1.0 - a * l) / (1.0 + a);
  } else {
    std::ostringstream msg;
    msg << "||alpha|| * ||L|| = " << a * l << " is not below 1";
    b.absent_reason = msg.str();
  }
  return b;
}

namespace {

double field_sup(const SampledField& f) {
  double s = 0.0;
  for (double v : f.values()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

NeumannResult apply_inverse_neumann(const BivariateFn& g, const PerturbOperator& op, const ScaleFunction& alpha,
                                    const Net& net, double tol, SolverConfig config, int max_terms) {
  if (!(tol > 0.0)) throw Error(Errc::validation_error, "Neumann tolerance must be positive");
  const double a = alpha.sup();
  const double d = op.norms().id_minus;
  if (!(a * (1.0 + d) < 1.0)) {
    std::ostringstream msg;
    msg << "||alpha|| (1 + ||Id - L||) = " << a * (1.0 + d) << " is not below 1";
    throw Error(Errc::precondition_violated, msg.str());
  }
  const double q = a * d / (1.0 - a);
  const int res = config.grid_res;
  SolverConfig inner = config;
  inner.engine = Engine::grid;
  inner.tol = std::min(config.tol, 1e-2 * tol * (1.0 - q));

  const SampledField grid = SampledField::on_net(net, res, res);
  auto fractal = [&](const SampledField& h) {
    return AlphaSurface(as_function(h), op, alpha, net, inner).field();
  };

  NeumannResult result{sample(grid, g), 0, 0, 0.0};
  const SampledField target = result.f_hat;
  const double stop = tol * (1.0 - q) / 2.0;

  // Partial sums of sum_k (Id - F)^k rhs.
  auto series = [&](const SampledField& rhs) {
    SampledField sum = rhs;
    SampledField term = rhs;
    ++result.terms;
    while (true) {
      SampledField next = combine(1.0, term, -1.0, fractal(term));
      if (field_sup(next) < stop) break;
      sum = combine(1.0, sum, 1.0, next);
      term = std::move(next);
      if (++result.terms > max_terms)
        throw Error(Errc::max_terms_exceeded,
                    "Neumann series did not reach tolerance within " + std::to_string(max_terms) + " terms");
    }
    return sum;
  };

  result.f_hat = series(target);
  constexpr int kMaxRefinements = 4;
  while (true) {
    const SampledField defect = combine(1.0, fractal(result.f_hat), -1.0, target);
    result.residual = field_sup(defect);
    if (result.residual <= tol || result.refinements >= kMaxRefinements) break;
    result.f_hat = combine(1.0, result.f_hat, -1.0, series(defect));
    ++result.refinements;
  }
  return result;
}

}  // namespace fsk
