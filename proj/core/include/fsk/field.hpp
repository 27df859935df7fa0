#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fsk/net.hpp"

namespace fsk {

using BivariateFn = std::function<double(double, double)>;

/// Samples of a bivariate function on a tensor grid. Node (ix, iy) sits at
/// (xs[ix], ys[iy]); values are row-major with rows along y:
/// values[iy * nx + ix].
class SampledField {
 public:
  SampledField(std::vector<double> xs, std::vector<double> ys, std::vector<double> values);
  SampledField(std::vector<double> xs, std::vector<double> ys);

  /// nx by ny equispaced nodes covering `domain`.
  static SampledField uniform(Rect domain, int nx, int ny);

  /// Grid that is uniform inside each net cell and contains every knot.
  /// Each cell gets ceil((res - 1) / N) subdivisions along x (likewise y), so
  /// a uniform net with (res - 1) divisible by N yields exactly res nodes.
  static SampledField on_net(const Net& net, int nx, int ny);

  int nx() const { return static_cast<int>(xs_.size()); }
  int ny() const { return static_cast<int>(ys_.size()); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double x(int ix) const { return xs_[static_cast<std::size_t>(ix)]; }
  double y(int iy) const { return ys_[static_cast<std::size_t>(iy)]; }
  double at(int ix, int iy) const { return values_[index(ix, iy)]; }
  double& at(int ix, int iy) { return values_[index(ix, iy)]; }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * xs_.size() + static_cast<std::size_t>(ix);
  }

  Rect domain() const { return {xs_.front(), xs_.back(), ys_.front(), ys_.back()}; }
  /// Largest node spacing over both axes.
  double mesh_width() const;
  bool is_uniform(double rel_tol = 1e-12) const;
  bool same_grid(const SampledField& other) const;
  /// True when every net knot is a grid node (to 1e-12 relative).
  bool contains_knots(const Net& net) const;

  /// Bilinear interpolation; clamps to the domain.
  double interpolate(double x, double y) const;
  /// Copy of the grid with new values (size must match).
  SampledField with_values(std::vector<double> values) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> values_;
};

/// Fills `grid`'s nodes with fn(x, y); evaluation is data-parallel.
SampledField sample(const SampledField& grid, const BivariateFn& fn);

/// a * lhs + b * rhs on a shared grid.
SampledField combine(double a, const SampledField& lhs, double b, const SampledField& rhs);

/// Continuous function view of a field via bilinear interpolation.
BivariateFn as_function(SampledField field);

/// Position of t within a sorted node list: lower node index and the
/// fractional weight of the upper node. Snaps to a node when within
/// 1e-10 of the local spacing; weight 0 means t sits on node `lower`, which
/// may then be the last node.
struct Stencil {
  int lower = 0;
  double weight = 0.0;
};
Stencil locate_stencil(std::span<const double> nodes, double t);

}  // namespace fsk
