#include "fsk/ifs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "fsk/parallel.hpp"

namespace fsk {
namespace {

double clamp_to(double t, std::span<const double> knots) { return std::clamp(t, knots.front(), knots.back()); }

std::string cell_name(int i, int j) {
  std::ostringstream out;
  out << "F_{" << i << "," << j << "}";
  return out.str();
}

void keep_worst(std::vector<Defect>& worst, Defect d, std::size_t limit = 8) {
  worst.push_back(std::move(d));
  std::sort(worst.begin(), worst.end(), [](const Defect& a, const Defect& b) { return a.value > b.value; });
  if (worst.size() > limit) worst.resize(limit);
}

// Quantized position used to de-duplicate orbit points.
struct PointKey {
  std::int64_t kx;
  std::int64_t ky;
  bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.kx) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.ky) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class PointIndex {
 public:
  explicit PointIndex(Rect domain) : domain_(domain) {}

  PointKey key(double x, double y) const {
    return {std::llround((x - domain_.x0) / domain_.width() * kScale),
            std::llround((y - domain_.y0) / domain_.height() * kScale)};
  }

  // Returns the index of an existing point at (x, y), or inserts `next`.
  std::pair<std::size_t, bool> insert(double x, double y, std::size_t next) {
    auto [it, inserted] = map_.emplace(key(x, y), next);
    return {it->second, inserted};
  }

  // Nearby lookup tolerant to rounding across a quantization boundary.
  std::optional<std::size_t> find(double x, double y, const std::vector<OrbitPoint>& points) const {
    const PointKey k = key(x, y);
    std::optional<std::size_t> best;
    double best_dist = 1e-9 * std::max(domain_.width(), domain_.height());
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = map_.find({k.kx + dx, k.ky + dy});
        if (it == map_.end()) continue;
        const auto& p = points[it->second];
        double dist = std::max(std::abs(p.x - x), std::abs(p.y - y));
        if (dist <= best_dist) {
          best_dist = dist;
          best = it->second;
        }
      }
    }
    return best;
  }

 private:
  static constexpr double kScale = 68719476736.0;  // 2^36
  Rect domain_;
  std::unordered_map<PointKey, std::size_t, PointKeyHash> map_;
};

}  // namespace

VerticalMapFamily::VerticalMapFamily(Parts parts) : parts_(std::move(parts)) {
  const int n = parts_.net.n();
  const int m = parts_.net.m();
  if (parts_.ux.count() != n || parts_.vy.count() != m)
    throw Error(Errc::shape_mismatch, "horizontal map counts do not match the net");
  if (parts_.gamma.nx() != n || parts_.gamma.ny() != m)
    throw Error(Errc::shape_mismatch, "gamma lattice must be N x M");
  if (parts_.knot_values.nx() != n + 1 || parts_.knot_values.ny() != m + 1)
    throw Error(Errc::shape_mismatch, "knot values must be (N+1) x (M+1)");
  for (double g : parts_.gamma.values())
    if (!(g >= 0.0 && g < 1.0)) throw Error(Errc::inadmissible_scale, "Lipschitz constants must lie in [0, 1)");
  if (!parts_.evaluator) {
    if (!parts_.affine) throw Error(Errc::validation_error, "family needs an evaluator or z-affine parts");
    auto affine = *parts_.affine;
    parts_.evaluator = [affine](int i, int j, double x, double y, double z) {
      return affine.slope(i, j, x, y) * z + affine.offset(i, j, x, y);
    };
  }
  if (!parts_.initial_guess) parts_.initial_guess = [](double, double) { return 0.0; };
}

Point2 VerticalMapFamily::preimage(Cell cell, double x, double y) const {
  return {clamp_to(parts_.ux[cell.i].inverse(x), parts_.net.xs()),
          clamp_to(parts_.vy[cell.j].inverse(y), parts_.net.ys())};
}

GridOperator::AxisPlan GridOperator::plan_axis(const AffineMaps& maps, std::span<const double> knots,
                                               std::span<const double> nodes) {
  AxisPlan plan;
  plan.cell.resize(nodes.size());
  plan.preimage.resize(nodes.size());
  plan.stencil.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int i = locate_interval(knots, nodes[k]);
    const double pre = clamp_to(maps[i].inverse(nodes[k]), knots);
    plan.cell[k] = i;
    plan.preimage[k] = pre;
    plan.stencil[k] = locate_stencil(nodes, pre);
  }
  return plan;
}

GridOperator::GridOperator(const VerticalMapFamily& family, const SampledField& grid)
    : grid_(grid.with_values(std::vector<double>(grid.size(), 0.0))) {
  if (!grid.contains_knots(family.net()))
    throw Error(Errc::resolution_mismatch, "grid must span the net domain and contain every knot");
  px_ = plan_axis(family.ux(), family.net().xs(), grid.xs());
  py_ = plan_axis(family.vy(), family.net().ys(), grid.ys());
  if (const ZAffineParts* affine = family.affine()) {
    slope_.resize(grid.size());
    offset_.resize(grid.size());
    const auto nx = static_cast<std::size_t>(grid.nx());
    parallel_for(static_cast<std::size_t>(grid.ny()), [&](std::size_t begin, std::size_t end) {
      for (std::size_t iy = begin; iy < end; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const std::size_t n = iy * nx + ix;
          const int i = px_.cell[ix];
          const int j = py_.cell[iy];
          slope_[n] = affine->slope(i, j, px_.preimage[ix], py_.preimage[iy]);
          offset_[n] = affine->offset(i, j, px_.preimage[ix], py_.preimage[iy]);
        }
      }
    }, 4);
    for (double s : slope_) contraction_ = std::max(contraction_, std::abs(s));
  } else {
    family_ = std::make_shared<const VerticalMapFamily>(family);
    contraction_ = family.max_gamma();
  }
}

SampledField GridOperator::apply(const SampledField& g) const {
  if (!g.same_grid(grid_)) throw Error(Errc::resolution_mismatch, "field is not on the operator's grid");
  const auto nx = static_cast<std::size_t>(grid_.nx());
  std::vector<double> out(grid_.size());
  parallel_for(static_cast<std::size_t>(grid_.ny()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t iy = begin; iy < end; ++iy) {
      const Stencil sy = py_.stencil[iy];
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const Stencil sx = px_.stencil[ix];
        auto row = [&](int r) {
          const double v0 = g.at(sx.lower, r);
          return sx.weight == 0.0 ? v0 : v0 + sx.weight * (g.at(sx.lower + 1, r) - v0);
        };
        double z = row(sy.lower);
        if (sy.weight != 0.0) z += sy.weight * (row(sy.lower + 1) - z);
        const std::size_t n = iy * nx + ix;
        out[n] = family_ ? (*family_)(px_.cell[ix], py_.cell[iy], px_.preimage[ix], py_.preimage[iy], z)
                         : slope_[n] * z + offset_[n];
      }
    }
  }, 4);
  return grid_.with_values(std::move(out));
}

SampledField rb_apply(const VerticalMapFamily& family, const SampledField& g) {
  return GridOperator(family, g).apply(g);
}

MaxIterExceeded::MaxIterExceeded(SolveResult best)
    : Error(Errc::max_iter_exceeded,
            "fixed-point iteration stopped after " + std::to_string(best.iterations) +
                " sweeps with residual " + std::to_string(best.residual)),
      best_(std::make_shared<const SolveResult>(std::move(best))) {}

int default_max_iter(double tol, double initial_residual, double contraction) {
  if (!(contraction > 0.0)) return 16;
  const double steps = std::log(tol / (1.0 + initial_residual)) / std::log(contraction);
  const double bounded = std::clamp(std::ceil(steps), 0.0, 1e6);
  return static_cast<int>(bounded) + 16;
}

namespace {

double sup_distance(const SampledField& a, const SampledField& b) {
  double d = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) d = std::max(d, std::abs(va[k] - vb[k]));
  return d;
}

}  // namespace

SolveResult fixed_point_solve(const GridOperator& op, SampledField initial, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw Error(Errc::validation_error, "solver tolerance must be positive");
  SolveResult result{std::move(initial), 0, 0.0, 0.0, {}, false};
  int max_iter = options.max_iter;
  while (true) {
    SampledField next = op.apply(result.field);
    const double r = sup_distance(next, result.field);
    ++result.iterations;
    result.history.push_back(r);
    if (result.iterations == 1) {
      result.initial_residual = r;
      if (max_iter <= 0) max_iter = default_max_iter(options.tol, r, op.contraction());
    }
    result.field = std::move(next);
    result.residual = r;
    if (r <= options.tol) {
      result.converged = true;
      return result;
    }
    if (result.iterations >= max_iter) throw MaxIterExceeded(std::move(result));
  }
}

SolveResult fixed_point_solve(const VerticalMapFamily& family, int nx, int ny, const SolveOptions& options) {
  SampledField grid = SampledField::on_net(family.net(), nx, ny);
  GridOperator op(family, grid);
  SampledField start = sample(grid, [&family](double x, double y) { return family.initial_guess(x, y); });
  return fixed_point_solve(op, std::move(start), options);
}

SurfaceOrbit orbit_evaluate(const VerticalMapFamily& family, std::span<const OrbitPoint> seed, int depth,
                            std::size_t point_budget) {
  if (depth < 0) throw Error(Errc::validation_error, "orbit depth must be non-negative");
  const Net& net = family.net();
  PointIndex index(net.domain());
  SurfaceOrbit orbit;
  orbit.depth = depth;
  std::vector<std::size_t> frontier;
  auto add = [&](OrbitPoint p) {
    auto [idx, inserted] = index.insert(p.x, p.y, orbit.points.size());
    if (!inserted) return;
    if (orbit.points.size() + 1 > point_budget)
      throw Error(Errc::point_budget_exceeded,
                  "orbit exceeds the budget of " + std::to_string(point_budget) + " points");
    orbit.points.push_back(p);
    frontier.push_back(idx);
  };
  for (OrbitPoint p : seed) {
    p.level = 0;
    add(p);
  }
  for (int level = 1; level <= depth; ++level) {
    std::vector<std::size_t> parents;
    parents.swap(frontier);
    for (std::size_t parent : parents) {
      const OrbitPoint p = orbit.points[parent];
      for (int i = 1; i <= net.n(); ++i) {
        const double x = family.ux()[i](p.x);
        for (int j = 1; j <= net.m(); ++j) {
          add({x, family.vy()[j](p.y), family(i, j, p.x, p.y, p.z), level});
        }
      }
    }
  }
  return orbit;
}

SurfaceOrbit orbit_evaluate(const VerticalMapFamily& family, int depth, std::size_t point_budget) {
  const Net& net = family.net();
  std::vector<OrbitPoint> seed;
  seed.reserve(static_cast<std::size_t>((net.n() + 1) * (net.m() + 1)));
  for (int l = 0; l <= net.m(); ++l)
    for (int k = 0; k <= net.n(); ++k) seed.push_back({net.x(k), net.y(l), family.knot_values()(k, l), 0});
  return orbit_evaluate(family, seed, depth, point_budget);
}

OrbitCheck orbit_residual(const VerticalMapFamily& family, const SurfaceOrbit& orbit) {
  const Net& net = family.net();
  PointIndex index(net.domain());
  for (std::size_t k = 0; k < orbit.points.size(); ++k) index.insert(orbit.points[k].x, orbit.points[k].y, k);
  OrbitCheck check;
  for (const auto& p : orbit.points) {
    const Cell cell = locate_cell(net, clamp_to(p.x, net.xs()), clamp_to(p.y, net.ys()));
    const Point2 pre = family.preimage(cell, p.x, p.y);
    auto found = index.find(pre.x, pre.y, orbit.points);
    if (!found) {
      ++check.missing_preimages;
      continue;
    }
    const double rhs = family(cell.i, cell.j, pre.x, pre.y, orbit.points[*found].z);
    check.max_residual = std::max(check.max_residual, std::abs(p.z - rhs));
    ++check.checked;
  }
  return check;
}

int pointwise_depth(const VerticalMapFamily& family, double tol) {
  const double q = family.max_gamma();
  if (!(q > 0.0)) return 1;
  const Net& net = family.net();
  const Rect d = net.domain();
  constexpr int kProbe = 33;
  double r0 = 0.0;
  for (int b = 0; b < kProbe; ++b) {
    for (int a = 0; a < kProbe; ++a) {
      const double x = d.x0 + d.width() * a / (kProbe - 1);
      const double y = d.y0 + d.height() * b / (kProbe - 1);
      const Cell c = locate_cell(net, x, y);
      const Point2 pre = family.preimage(c, x, y);
      const double t = family(c.i, c.j, pre.x, pre.y, family.initial_guess(pre.x, pre.y));
      r0 = std::max(r0, std::abs(t - family.initial_guess(x, y)));
    }
  }
  // ||f - g0|| <= ||T g0 - g0|| / (1 - q); the probe underestimates the sup,
  // hence the factor 2 and the extra steps.
  const double bound = 2.0 * r0 / (1.0 - q) + 1e-300;
  if (bound <= tol) return 1;
  const double steps = std::ceil(std::log(tol / bound) / std::log(q)) + 4.0;
  return static_cast<int>(std::clamp(steps, 1.0, 200000.0));
}

double pointwise_evaluate(const VerticalMapFamily& family, double x, double y, int depth,
                          std::optional<Cell> first_cell) {
  const Net& net = family.net();
  if (!net.domain().contains(x, y))
    throw Error(Errc::out_of_domain, "point outside the surface domain");
  if (first_cell) {
    const Cell c = *first_cell;
    if (c.i < 1 || c.i > net.n() || c.j < 1 || c.j > net.m() || x < net.x(c.i - 1) || x > net.x(c.i) ||
        y < net.y(c.j - 1) || y > net.y(c.j))
      throw Error(Errc::out_of_domain, "point is not in the closure of the requested cell");
  }
  depth = std::max(depth, 1);
  std::vector<Cell> cells(static_cast<std::size_t>(depth));
  std::vector<Point2> chain(static_cast<std::size_t>(depth) + 1);
  chain[0] = {x, y};
  for (int k = 0; k < depth; ++k) {
    const Point2 p = chain[static_cast<std::size_t>(k)];
    const Cell c = (k == 0 && first_cell) ? *first_cell : locate_cell(net, p.x, p.y);
    cells[static_cast<std::size_t>(k)] = c;
    chain[static_cast<std::size_t>(k) + 1] = family.preimage(c, p.x, p.y);
  }
  const Point2 tail = chain.back();
  double value = family.initial_guess(tail.x, tail.y);
  for (int k = depth - 1; k >= 0; --k) {
    const Cell c = cells[static_cast<std::size_t>(k)];
    const Point2 pre = chain[static_cast<std::size_t>(k) + 1];
    value = family(c.i, c.j, pre.x, pre.y, value);
  }
  return value;
}

ConformanceReport verify_corner_conditions(const VerticalMapFamily& family, const Lattice& data, double tol) {
  const Net& net = family.net();
  if (data.nx() != net.n() + 1 || data.ny() != net.m() + 1)
    throw Error(Errc::shape_mismatch, "corner data must be (N+1) x (M+1)");
  ConformanceReport report;
  report.tolerance = tol;
  const std::array<std::pair<int, Edge>, 2> xs{{{0, Edge::start}, {net.n(), Edge::end}}};
  const std::array<std::pair<int, Edge>, 2> ys{{{0, Edge::start}, {net.m(), Edge::end}}};
  for (int i = 1; i <= net.n(); ++i) {
    for (int j = 1; j <= net.m(); ++j) {
      for (auto [k, ek] : xs) {
        for (auto [l, el] : ys) {
          const double value = family(i, j, net.x(k), net.y(l), data(k, l));
          const double expected = data(tau(i, ek), tau(j, el));
          const double defect = std::abs(value - expected);
          report.corner_defect = std::max(report.corner_defect, defect);
          if (defect > 0.0) {
            std::ostringstream where;
            where << cell_name(i, j) << " at corner (" << k << "," << l << ")";
            keep_worst(report.worst, {where.str(), defect});
          }
        }
      }
    }
  }
  report.pass = report.corner_defect <= tol;
  return report;
}

ConformanceReport verify_corner_conditions(const VerticalMapFamily& family, double tol) {
  return verify_corner_conditions(family, family.knot_values(), tol);
}

ConformanceReport verify_matching_conditions(const VerticalMapFamily& family, int n_samples, double tol) {
  if (n_samples < 2) throw Error(Errc::validation_error, "matching check needs at least 2 samples");
  const Net& net = family.net();
  const Rect d = net.domain();
  const double zlo = family.knot_values().min() - 1.0;
  const double zhi = family.knot_values().max() + 1.0;
  const std::array<double, 3> zs{zlo, 0.5 * (zlo + zhi), zhi};
  ConformanceReport report;
  report.tolerance = tol;

  auto record = [&](double defect, const std::string& lhs, const std::string& rhs, const char* axis, double at) {
    report.matching_defect = std::max(report.matching_defect, defect);
    if (defect > 0.0) {
      std::ostringstream where;
      where << lhs << " vs " << rhs << " on shared " << axis << "-line " << at;
      keep_worst(report.worst, {where.str(), defect});
    }
  };

  for (int i = 1; i < net.n(); ++i) {
    const double xa = clamp_to(family.ux()[i].inverse(net.x(i)), net.xs());
    const double xb = clamp_to(family.ux()[i + 1].inverse(net.x(i)), net.xs());
    for (int j = 1; j <= net.m(); ++j) {
      double worst = 0.0;
      for (int s = 0; s < n_samples; ++s) {
        const double y = d.y0 + d.height() * s / (n_samples - 1);
        for (double z : zs) worst = std::max(worst, std::abs(family(i, j, xa, y, z) - family(i + 1, j, xb, y, z)));
      }
      record(worst, cell_name(i, j), cell_name(i + 1, j), "x", net.x(i));
    }
  }
  for (int j = 1; j < net.m(); ++j) {
    const double ya = clamp_to(family.vy()[j].inverse(net.y(j)), net.ys());
    const double yb = clamp_to(family.vy()[j + 1].inverse(net.y(j)), net.ys());
    for (int i = 1; i <= net.n(); ++i) {
      double worst = 0.0;
      for (int s = 0; s < n_samples; ++s) {
        const double x = d.x0 + d.width() * s / (n_samples - 1);
        for (double z : zs) worst = std::max(worst, std::abs(family(i, j, x, ya, z) - family(i, j + 1, x, yb, z)));
      }
      record(worst, cell_name(i, j), cell_name(i, j + 1), "y", net.y(j));
    }
  }
  report.pass = report.matching_defect <= tol;
  return report;
}

ConformanceReport merge(const ConformanceReport& a, const ConformanceReport& b) {
  ConformanceReport out;
  out.corner_defect = std::max(a.corner_defect, b.corner_defect);
  out.matching_defect = std::max(a.matching_defect, b.matching_defect);
  out.tolerance = std::min(a.tolerance, b.tolerance);
  for (const auto& d : a.worst) keep_worst(out.worst, d);
  for (const auto& d : b.worst) keep_worst(out.worst, d);
  out.pass = a.pass && b.pass;
  return out;
}

struct FractalSurface::Cache {
  std::once_flag solved;
  std::optional<SolveResult> solution;
  std::once_flag depth_once;
  int depth = 1;
};

FractalSurface::FractalSurface(VerticalMapFamily family, SolverConfig config)
    : family_(std::make_shared<const VerticalMapFamily>(std::move(family))),
      config_(config),
      cache_(std::make_shared<Cache>()) {}

SolveResult FractalSurface::solve(int nx, int ny) const {
  return fixed_point_solve(*family_, nx, ny, {config_.tol, config_.max_iter});
}

const SolveResult& FractalSurface::solution() const {
  std::call_once(cache_->solved, [this] { cache_->solution = solve(config_.grid_res, config_.grid_res); });
  return *cache_->solution;
}

int FractalSurface::pointwise_depth() const {
  std::call_once(cache_->depth_once, [this] { cache_->depth = fsk::pointwise_depth(*family_, config_.tol); });
  return cache_->depth;
}

double FractalSurface::value(double x, double y) const {
  if (!family_->net().domain().contains(x, y))
    throw Error(Errc::out_of_domain, "point outside the surface domain");
  if (config_.engine == Engine::pointwise) return pointwise_evaluate(*family_, x, y, pointwise_depth());
  return solution().field.interpolate(x, y);
}

std::vector<double> FractalSurface::evaluate(std::span<const Point2> points) const {
  for (const auto& p : points)
    if (!family_->net().domain().contains(p.x, p.y))
      throw Error(Errc::out_of_domain, "point outside the surface domain");
  if (config_.engine == Engine::grid) solution();
  else pointwise_depth();
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) out[k] = value(points[k].x, points[k].y);
  });
  return out;
}

SampledField FractalSurface::evaluate_grid(int nx, int ny) const {
  if (config_.engine == Engine::pointwise) {
    const int depth = pointwise_depth();
    return sample(SampledField::on_net(family_->net(), nx, ny),
                  [this, depth](double x, double y) { return pointwise_evaluate(*family_, x, y, depth); });
  }
  if (nx == config_.grid_res && ny == config_.grid_res) return solution().field;
  return solve(nx, ny).field;
}

SurfaceOrbit FractalSurface::orbit(int depth, std::size_t point_budget) const {
  return orbit_evaluate(*family_, depth, point_budget);
}

}  // namespace fsk
