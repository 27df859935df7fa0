#include "fsk/field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "fsk/error.hpp"
#include "fsk/parallel.hpp"

namespace fsk {
namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  t.back() = hi;
  return t;
}

std::vector<double> cellwise(std::span<const double> knots, int res) {
  const int cells = static_cast<int>(knots.size()) - 1;
  const int per_cell = std::max(1, (res - 1 + cells - 1) / cells);
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(cells * per_cell + 1));
  for (int c = 0; c < cells; ++c) {
    const double lo = knots[static_cast<std::size_t>(c)];
    const double hi = knots[static_cast<std::size_t>(c + 1)];
    for (int k = 0; k < per_cell; ++k) t.push_back(lo + (hi - lo) * k / per_cell);
  }
  t.push_back(knots.back());
  return t;
}

bool uniform_nodes(std::span<const double> t, double rel_tol) {
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - t[k - 1] - h) > rel_tol * (t.back() - t.front())) return false;
  return true;
}

bool has_node(std::span<const double> nodes, double t) {
  const double tol = 1e-12 * (nodes.back() - nodes.front());
  auto it = std::lower_bound(nodes.begin(), nodes.end(), t - tol);
  return it != nodes.end() && std::abs(*it - t) <= tol;
}

}  // namespace

SampledField::SampledField(std::vector<double> xs, std::vector<double> ys, std::vector<double> values)
    : xs_(std::move(xs)), ys_(std::move(ys)), values_(std::move(values)) {
  if (xs_.size() < 2 || ys_.size() < 2)
    throw Error(Errc::shape_mismatch, "a sampled field needs at least 2 nodes per axis");
  if (values_.size() != xs_.size() * ys_.size()) {
    std::ostringstream msg;
    msg << "value count " << values_.size() << " != " << xs_.size() << " x " << ys_.size();
    throw Error(Errc::shape_mismatch, msg.str());
  }
  for (const auto* t : {&xs_, &ys_})
    for (std::size_t k = 1; k < t->size(); ++k)
      if (!((*t)[k] > (*t)[k - 1])) throw Error(Errc::non_increasing_knots, "grid nodes must increase");
}

SampledField::SampledField(std::vector<double> xs, std::vector<double> ys)
    : SampledField(xs, ys, std::vector<double>(xs.size() * ys.size(), 0.0)) {}

SampledField SampledField::uniform(Rect domain, int nx, int ny) {
  return SampledField(linspace(domain.x0, domain.x1, nx), linspace(domain.y0, domain.y1, ny));
}

SampledField SampledField::on_net(const Net& net, int nx, int ny) {
  return SampledField(cellwise(net.xs(), nx), cellwise(net.ys(), ny));
}

double SampledField::mesh_width() const {
  double h = 0.0;
  for (const auto* t : {&xs_, &ys_})
    for (std::size_t k = 1; k < t->size(); ++k) h = std::max(h, (*t)[k] - (*t)[k - 1]);
  return h;
}

bool SampledField::is_uniform(double rel_tol) const {
  return uniform_nodes(xs_, rel_tol) && uniform_nodes(ys_, rel_tol);
}

bool SampledField::same_grid(const SampledField& other) const {
  return xs_ == other.xs_ && ys_ == other.ys_;
}

bool SampledField::contains_knots(const Net& net) const {
  if (std::abs(xs_.front() - net.xs().front()) > 1e-12 || std::abs(xs_.back() - net.xs().back()) > 1e-12 ||
      std::abs(ys_.front() - net.ys().front()) > 1e-12 || std::abs(ys_.back() - net.ys().back()) > 1e-12)
    return false;
  for (double t : net.xs())
    if (!has_node(xs_, t)) return false;
  for (double t : net.ys())
    if (!has_node(ys_, t)) return false;
  return true;
}

Stencil locate_stencil(std::span<const double> nodes, double t) {
  const int last = static_cast<int>(nodes.size()) - 1;
  if (t <= nodes.front()) return {0, 0.0};
  if (t >= nodes.back()) return {last, 0.0};
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  int upper = static_cast<int>(it - nodes.begin());
  int lower = upper - 1;
  const double lo = nodes[static_cast<std::size_t>(lower)];
  const double hi = nodes[static_cast<std::size_t>(upper)];
  double w = (t - lo) / (hi - lo);
  if (w < 1e-10) w = 0.0;
  if (w > 1.0 - 1e-10) return {upper, 0.0};
  return {lower, w};
}

double SampledField::interpolate(double x, double y) const {
  const Stencil sx = locate_stencil(xs_, x);
  const Stencil sy = locate_stencil(ys_, y);
  auto row = [&](int iy) {
    const double v0 = at(sx.lower, iy);
    return sx.weight == 0.0 ? v0 : v0 + sx.weight * (at(sx.lower + 1, iy) - v0);
  };
  const double bottom = row(sy.lower);
  if (sy.weight == 0.0) return bottom;
  return bottom + sy.weight * (row(sy.lower + 1) - bottom);
}

SampledField SampledField::with_values(std::vector<double> values) const {
  return SampledField(xs_, ys_, std::move(values));
}

SampledField sample(const SampledField& grid, const BivariateFn& fn) {
  std::vector<double> values(grid.size());
  const int nx = grid.nx();
  parallel_for(static_cast<std::size_t>(grid.ny()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t iy = begin; iy < end; ++iy) {
      const double y = grid.y(static_cast<int>(iy));
      for (int ix = 0; ix < nx; ++ix) values[iy * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix)] = fn(grid.x(ix), y);
    }
  }, 4);
  return grid.with_values(std::move(values));
}

SampledField combine(double a, const SampledField& lhs, double b, const SampledField& rhs) {
  if (!lhs.same_grid(rhs)) throw Error(Errc::resolution_mismatch, "combine: fields live on different grids");
  std::vector<double> values(lhs.size());
  auto l = lhs.values();
  auto r = rhs.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = a * l[k] + b * r[k];
  return lhs.with_values(std::move(values));
}

BivariateFn as_function(SampledField field) {
  auto shared = std::make_shared<const SampledField>(std::move(field));
  return [shared](double x, double y) { return shared->interpolate(x, y); };
}

}  // namespace fsk
