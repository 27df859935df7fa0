#include "fsk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsk/error.hpp"
#include "fsk/parallel.hpp"

namespace fsk {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SampledField difference(const SampledField& grid, const BivariateFn& a, const BivariateFn& b) {
  return sample(grid, [&a, &b](double x, double y) { return a(x, y) - b(x, y); });
}

}  // namespace

double sup_norm(const SampledField& field) {
  double s = 0.0;
  for (double v : field.values()) s = std::max(s, std::abs(v));
  return s;
}

double lp_norm(const SampledField& field, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "L^p exponent " << p << " must be at least 1";
    throw Error(Errc::bad_exponent, msg.str());
  }
  const int nx = field.nx();
  const int ny = field.ny();
  std::vector<double> rows(static_cast<std::size_t>(ny - 1), 0.0);
  parallel_for(rows.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const int iy = static_cast<int>(r);
      const double hy = field.y(iy + 1) - field.y(iy);
      double acc = 0.0;
      for (int ix = 0; ix + 1 < nx; ++ix) {
        const double hx = field.x(ix + 1) - field.x(ix);
        const double mid =
            0.25 * (field.at(ix, iy) + field.at(ix + 1, iy) + field.at(ix, iy + 1) + field.at(ix + 1, iy + 1));
        acc += std::pow(std::abs(mid), p) * hx * hy;
      }
      rows[r] = acc;
    }
  }, 8);
  double total = 0.0;
  for (double r : rows) total += r;
  return std::pow(total, 1.0 / p);
}

LpBoundReport verify_lp_bound(const AlphaSurface& surface, double p, double slack) {
  const SampledField& fa = surface.field();
  const SampledField f = sample(fa, surface.f());
  const double a = surface.alpha().sup();
  LpBoundReport r;
  r.p = p;
  r.slack = slack;
  r.lhs = lp_norm(combine(1.0, fa, -1.0, f), p);
  r.rhs = a / (1.0 - a) * lp_norm(difference(fa, surface.f(), surface.lf()), p);
  r.pass = r.lhs <= r.rhs + slack;
  return r;
}

BoxCountReport box_count_dimension(const SampledField& field, int k_min, int k_max) {
  if (k_min < 0 || k_max < k_min + 1) throw Error(Errc::validation_error, "box counting needs 0 <= k_min < k_max");
  if (!field.is_uniform()) throw Error(Errc::resolution_too_coarse, "box counting needs a uniform grid");
  const long cells = 1L << k_max;
  if ((field.nx() - 1) % cells != 0 || (field.ny() - 1) % cells != 0) {
    std::ostringstream msg;
    msg << "grid " << field.nx() << " x " << field.ny() << " cannot resolve 2^" << k_max << " columns per axis";
    throw Error(Errc::resolution_too_coarse, msg.str());
  }
  const Rect d = field.domain();
  BoxCountReport report;
  for (int k = k_min; k <= k_max; ++k) {
    const int columns = 1 << k;
    const int sx = (field.nx() - 1) / columns;
    const int sy = (field.ny() - 1) / columns;
    const double eps = d.width() / columns;
    std::vector<double> per_row(static_cast<std::size_t>(columns), 0.0);
    parallel_for(per_row.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t cy = begin; cy < end; ++cy) {
        double count = 0.0;
        for (int cx = 0; cx < columns; ++cx) {
          double lo = field.at(cx * sx, static_cast<int>(cy) * sy);
          double hi = lo;
          for (int iy = static_cast<int>(cy) * sy; iy <= (static_cast<int>(cy) + 1) * sy; ++iy) {
            for (int ix = cx * sx; ix <= (cx + 1) * sx; ++ix) {
              const double v = field.at(ix, iy);
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          count += std::floor((hi - lo) / eps) + 1.0;
        }
        per_row[cy] = count;
      }
    }, 1);
    double total = 0.0;
    for (double c : per_row) total += c;
    report.levels.push_back(k);
    report.scales.push_back(eps);
    report.counts.push_back(total);
  }
  auto fit_from = [&](std::size_t first) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = first; k < report.scales.size(); ++k) {
      xs.push_back(std::log(1.0 / report.scales[k]));
      ys.push_back(std::log(report.counts[k]));
    }
    return fit_line(xs, ys);
  };
  LineFit fit = fit_from(0);
  if (fit.residual > 0.05 && report.scales.size() >= 4) {
    fit = fit_from(2);
    report.dropped = 2;
  }
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.residual = fit.residual;
  report.dimension = fit.slope;
  return report;
}

double dt_modulus(const BivariateFn& f, double delta1, double delta2, int sampling_res, double h_min) {
  if (!(delta1 > 0.0 && delta1 <= 1.0 && delta2 > 0.0 && delta2 <= 1.0))
    throw Error(Errc::validation_error, "modulus steps must lie in (0, 1]");
  if (sampling_res < 2) throw Error(Errc::validation_error, "sampling_res must be at least 2");
  if (!(h_min > 0.0 && h_min < 1.0)) throw Error(Errc::validation_error, "h_min must lie in (0, 1)");
  const double rho = std::pow(h_min, 1.0 / (sampling_res - 1));
  auto steps = [&](double delta) {
    std::vector<double> h;
    // Relative slack keeps the lattice end point stable under rounding.
    for (double v = delta; v >= h_min * (1.0 - 1e-12); v *= rho) h.push_back(v);
    if (h.empty()) h.push_back(delta);
    return h;
  };
  const std::vector<double> h1 = steps(delta1);
  const std::vector<double> h2 = steps(delta2);
  std::vector<double> grid(static_cast<std::size_t>(sampling_res));
  for (int k = 0; k < sampling_res; ++k) grid[static_cast<std::size_t>(k)] = -1.0 + 2.0 * k / (sampling_res - 1);
  grid.back() = 1.0;

  auto inside = [](double t) { return t >= -1.0 && t <= 1.0; };
  std::vector<double> per_row(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const double y = grid[b];
      const double py = std::sqrt(std::max(0.0, 1.0 - y * y));
      double best = 0.0;
      for (double x : grid) {
        const double px = std::sqrt(std::max(0.0, 1.0 - x * x));
        const double centre = f(x, y);
        for (double a : h1) {
          const double dx = a * px;
          if (!inside(x + dx) || !inside(x - dx)) continue;
          for (double c : h2) {
            const double dy = c * py;
            if (!inside(y + dy) || !inside(y - dy)) continue;
            best = std::max(best, std::abs(f(x + dx, y + dy) - 2.0 * centre + f(x - dx, y - dy)));
          }
        }
      }
      per_row[b] = best;
    }
  }, 1);
  return *std::max_element(per_row.begin(), per_row.end());
}

ConvergenceTable convergence_table_alpha(const BivariateFn& f, const PerturbOperator& op, const Net& net,
                                         const std::vector<ScaleFunction>& alphas, SolverConfig config) {
  ConvergenceTable table;
  table.slack = 2.0 * config.tol;
  for (const auto& alpha : alphas) {
    AlphaSurface s = build_alpha_surface(f, op, alpha, net, config);
    ConvergenceRow row;
    std::ostringstream label;
    label << "alpha=" << alpha.sup();
    row.label = label.str();
    row.measured = sup_norm(combine(1.0, s.field(), -1.0, sample(s.field(), f)));
    row.bound = perturbation_bound(s);
    row.pass = row.measured <= row.bound + table.slack;
    table.all_pass = table.all_pass && row.pass;
    table.rows.push_back(row);
  }
  return table;
}

ConvergenceTable convergence_table_operator(const BivariateFn& f, const ScaleFunction& alpha, const Net& net,
                                            const std::vector<PerturbOperator>& ops, SolverConfig config) {
  ConvergenceTable table;
  table.slack = 2.0 * config.tol;
  for (const auto& op : ops) {
    AlphaSurface s = build_alpha_surface(f, op, alpha, net, config);
    ConvergenceRow row;
    row.label = op.describe();
    row.measured = sup_norm(combine(1.0, s.field(), -1.0, sample(s.field(), f)));
    row.bound = perturbation_bound(s);
    row.pass = row.measured <= row.bound + table.slack;
    table.all_pass = table.all_pass && row.pass;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace fsk
