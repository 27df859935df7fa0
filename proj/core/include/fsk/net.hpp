#pragma once

#include <span>
#include <vector>

namespace fsk {

struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool operator==(const Rect&) const = default;
};

inline constexpr Rect kUnitSquare{0.0, 1.0, 0.0, 1.0};

enum class Axis { x, y };

/// Endpoint label for tau: `start` is knot 0, `end` is knot N (or M).
enum class Edge { start, end };

/// Rectangular net x_0 < ... < x_N, y_0 < ... < y_M with N, M >= 2.
class Net {
 public:
  Net(std::vector<double> xs, std::vector<double> ys);

  int n() const { return static_cast<int>(xs_.size()) - 1; }
  int m() const { return static_cast<int>(ys_.size()) - 1; }
  double x(int k) const { return xs_[static_cast<std::size_t>(k)]; }
  double y(int l) const { return ys_[static_cast<std::size_t>(l)]; }
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::span<const double> knots(Axis axis) const { return axis == Axis::x ? xs() : ys(); }
  Rect domain() const { return {xs_.front(), xs_.back(), ys_.front(), ys_.back()}; }
  bool is_uniform(double rel_tol = 1e-12) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

Net build_net(std::vector<double> xs, std::vector<double> ys);
Net uniform_net(int n, int m, Rect domain = kUnitSquare);

/// t -> a t + b.
struct AffineMap {
  double a = 1.0;
  double b = 0.0;

  double operator()(double t) const { return a * t + b; }
  double inverse(double s) const { return (s - b) / a; }
};

/// `alternating` is the parity rule (odd maps keep orientation, even maps
/// reverse it). `preserving` keeps every map orientation-preserving; it breaks
/// the matching conditions and exists for mismatch-injection tests.
enum class Orientation { alternating, preserving };

/// The family u_1..u_N (or v_1..v_M), indexed from 1.
class AffineMaps {
 public:
  AffineMaps(Axis axis, std::vector<AffineMap> maps) : axis_(axis), maps_(std::move(maps)) {}

  Axis axis() const { return axis_; }
  int count() const { return static_cast<int>(maps_.size()); }
  const AffineMap& operator[](int i) const { return maps_[static_cast<std::size_t>(i - 1)]; }
  double contraction(int i) const;
  double max_contraction() const;

 private:
  Axis axis_;
  std::vector<AffineMap> maps_;
};

AffineMaps build_affine_maps(const Net& net, Axis axis,
                             Orientation orientation = Orientation::alternating);

/// Index map tau(i, .): odd i -> (i-1, i), even i -> (i, i-1).
int tau(int i, Edge boundary);

struct Cell {
  int i = 1;
  int j = 1;
  bool operator==(const Cell&) const = default;
};

/// 1-based interval index under the half-open convention [t_{k-1}, t_k) with
/// the last interval closed. Throws OutOfDomain outside [t_0, t_N].
int locate_interval(std::span<const double> knots, double t);

Cell locate_cell(const Net& net, double x, double y);

/// Values attached to the knots (x_k, y_l), k = 0..nx-1, l = 0..ny-1.
class Lattice {
 public:
  Lattice() = default;
  Lattice(int nx, int ny, double fill = 0.0)
      : nx_(nx), ny_(ny), values_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double& operator()(int k, int l) { return values_[index(k, l)]; }
  double operator()(int k, int l) const { return values_[index(k, l)]; }
  std::span<const double> values() const { return values_; }
  double max_abs() const;
  double min() const;
  double max() const;

 private:
  std::size_t index(int k, int l) const {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(k);
  }
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> values_;
};

}  // namespace fsk
