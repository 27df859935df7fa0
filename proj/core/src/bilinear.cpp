#include "fsk/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "fsk/error.hpp"

namespace fsk {
namespace {

void check_lattice(const Lattice& values, const Net& net, const char* name) {
  if (values.nx() != net.n() + 1 || values.ny() != net.m() + 1) {
    std::ostringstream msg;
    msg << name << " lattice is " << values.nx() << " x " << values.ny() << ", expected " << net.n() + 1 << " x "
        << net.m() + 1;
    throw Error(Errc::shape_mismatch, msg.str());
  }
}

}  // namespace

BilinearData make_bilinear_data(const Net& net, Lattice z, Lattice s) {
  check_lattice(z, net, "z");
  check_lattice(s, net, "s");
  for (double v : s.values())
    if (!(std::abs(v) < 1.0)) throw Error(Errc::inadmissible_scale, "every scaling value needs |s| < 1");
  return {std::move(z), std::move(s)};
}

double CornerBilinear::operator()(double x, double y) const {
  const double xn = domain.x1;
  const double x0 = domain.x0;
  const double ym = domain.y1;
  const double y0 = domain.y0;
  return ((xn - x) * (ym - y) * z00 + (x - x0) * (ym - y) * zn0 + (xn - x) * (y - y0) * z0m +
          (x - x0) * (y - y0) * znm) /
         ((xn - x0) * (ym - y0));
}

CornerBilinear corner_bilinear(const BilinearData& data, const Net& net) {
  check_lattice(data.z, net, "z");
  const int n = net.n();
  const int m = net.m();
  return {net.domain(), data.z(0, 0), data.z(n, 0), data.z(0, m), data.z(n, m)};
}

PiecewiseBilinear::PiecewiseBilinear(Net net, Lattice values) : net_(std::move(net)), values_(std::move(values)) {
  check_lattice(values_, net_, "value");
}

double PiecewiseBilinear::operator()(double x, double y) const {
  const Cell c = locate_cell(net_, x, y);
  const double x0 = net_.x(c.i - 1);
  const double x1 = net_.x(c.i);
  const double y0 = net_.y(c.j - 1);
  const double y1 = net_.y(c.j);
  const double tx = (x - x0) / (x1 - x0);
  const double ty = (y - y0) / (y1 - y0);
  const double v00 = values_(c.i - 1, c.j - 1);
  const double v10 = values_(c.i, c.j - 1);
  const double v01 = values_(c.i - 1, c.j);
  const double v11 = values_(c.i, c.j);
  const double bottom = v00 + tx * (v10 - v00);
  const double top = v01 + tx * (v11 - v01);
  return bottom + ty * (top - bottom);
}

PiecewiseBilinear piecewise_bilinear(const Lattice& values, const Net& net) { return PiecewiseBilinear(net, values); }

VerticalMapFamily bilinear_family(const Net& net, const BilinearData& data, Orientation orientation,
                                  const std::optional<Lattice>& h_values) {
  check_lattice(data.z, net, "z");
  check_lattice(data.s, net, "s");
  auto g = std::make_shared<const CornerBilinear>(corner_bilinear(data, net));
  auto h = std::make_shared<const PiecewiseBilinear>(net, h_values ? *h_values : data.z);
  auto s = std::make_shared<const PiecewiseBilinear>(net, data.s);
  AffineMaps ux = build_affine_maps(net, Axis::x, orientation);
  AffineMaps vy = build_affine_maps(net, Axis::y, orientation);

  ZAffineParts parts;
  parts.slope = [s, ux, vy](int i, int j, double x, double y) { return (*s)(ux[i](x), vy[j](y)); };
  parts.offset = [s, h, g, ux, vy](int i, int j, double x, double y) {
    const double u = ux[i](x);
    const double v = vy[j](y);
    return (*h)(u, v) - (*s)(u, v) * (*g)(x, y);
  };
  // S is bilinear on each cell, so |S| peaks at a cell corner.
  Lattice gamma(net.n(), net.m());
  for (int j = 1; j <= net.m(); ++j)
    for (int i = 1; i <= net.n(); ++i)
      gamma(i - 1, j - 1) = std::max({std::abs(data.s(i - 1, j - 1)), std::abs(data.s(i, j - 1)),
                                      std::abs(data.s(i - 1, j)), std::abs(data.s(i, j))});
  BivariateFn initial = [h](double x, double y) { return (*h)(x, y); };
  return VerticalMapFamily({net, ux, vy, {}, parts, gamma, data.z, initial});
}

FractalSurface build_bilinear_fis(const BilinearData& data, const Net& net, SolverConfig config) {
  return FractalSurface(bilinear_family(net, data), config);
}

bool steadiness_check(const BilinearData& data) {
  const Lattice& s = data.s;
  for (int j = 1; j < s.ny(); ++j) {
    for (int i = 1; i < s.nx(); ++i) {
      const std::array<double, 4> v{s(i - 1, j - 1), s(i, j - 1), s(i - 1, j), s(i, j)};
      const bool nonneg = std::all_of(v.begin(), v.end(), [](double t) { return t >= 0.0; });
      const bool nonpos = std::all_of(v.begin(), v.end(), [](double t) { return t <= 0.0; });
      if (!nonneg && !nonpos) return false;
    }
  }
  return true;
}

std::array<double, 4> gamma_sums(const BilinearData& data, const Net& net) {
  const PiecewiseBilinear s(net, data.s);
  const AffineMaps ux = build_affine_maps(net, Axis::x);
  const AffineMaps vy = build_affine_maps(net, Axis::y);
  const Rect d = net.domain();
  const std::array<Point2, 4> corners{{{d.x0, d.y0}, {d.x0, d.y1}, {d.x1, d.y0}, {d.x1, d.y1}}};
  std::array<double, 4> sums{};
  for (std::size_t c = 0; c < corners.size(); ++c) {
    for (int i = 1; i <= net.n(); ++i) {
      for (int j = 1; j <= net.m(); ++j) {
        const double u = std::clamp(ux[i](corners[c].x), d.x0, d.x1);
        const double v = std::clamp(vy[j](corners[c].y), d.y0, d.y1);
        sums[c] += std::abs(s(u, v));
      }
    }
  }
  return sums;
}

double gamma_constant(const BilinearData& data, const Net& net) {
  const auto sums = gamma_sums(data, net);
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  if (*hi - *lo > 1e-10) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "corner sums differ: " << sums[0] << ", " << sums[1] << ", " << sums[2] << ", " << sums[3];
    throw Error(Errc::unbalanced_scaling, msg.str());
  }
  return sums[0];
}

bool co_bilinear_check(const BilinearData& data, const Net& net) {
  const CornerBilinear g = corner_bilinear(data, net);
  for (int l = 0; l <= net.m(); ++l)
    for (int k = 0; k <= net.n(); ++k)
      if (!(std::abs(data.z(k, l) - g(net.x(k), net.y(l))) <= 1e-12)) return false;
  return true;
}

DimensionVerdict theoretical_box_dimension(const BilinearData& data, const Net& net) {
  if (net.n() != net.m()) throw Error(Errc::hypothesis_unmet, "the dimension formula needs M = N");
  DimensionVerdict v;
  v.steady = steadiness_check(data);
  if (!v.steady) throw Error(Errc::hypothesis_unmet, "scaling factors are not steady");
  try {
    v.gamma = gamma_constant(data, net);
  } catch (const Error& e) {
    throw Error(Errc::hypothesis_unmet, std::string("scaling is unbalanced (") + e.what() + ")");
  }
  v.balanced = true;
  v.co_bilinear = co_bilinear_check(data, net);
  const double n = net.n();
  v.predicted = (v.gamma > n && !v.co_bilinear) ? 1.0 + std::log(v.gamma) / std::log(n) : 2.0;
  return v;
}

}  // namespace fsk
