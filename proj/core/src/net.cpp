#include "fsk/net.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsk/error.hpp"

namespace fsk {
namespace {

void check_knots(const std::vector<double>& knots, const char* name) {
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k] > knots[k - 1]) || !std::isfinite(knots[k]) || !std::isfinite(knots[k - 1])) {
      std::ostringstream msg;
      msg << name << "[" << k - 1 << "] = " << knots[k - 1] << " is not below " << name << "[" << k
          << "] = " << knots[k];
      throw Error(Errc::non_increasing_knots, msg.str());
    }
  }
  if (knots.size() < 3) {
    std::ostringstream msg;
    msg << name << " has " << (knots.empty() ? 0 : knots.size() - 1) << " intervals; at least 2 required";
    throw Error(Errc::too_few_intervals, msg.str());
  }
}

bool uniform_spacing(std::span<const double> t, double rel_tol) {
  double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs((t[k] - t[k - 1]) - h) > rel_tol * (t.back() - t.front())) return false;
  return true;
}

}  // namespace

Net::Net(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  check_knots(xs_, "xs");
  check_knots(ys_, "ys");
}

bool Net::is_uniform(double rel_tol) const {
  return uniform_spacing(xs_, rel_tol) && uniform_spacing(ys_, rel_tol);
}

Net build_net(std::vector<double> xs, std::vector<double> ys) { return Net(std::move(xs), std::move(ys)); }

Net uniform_net(int n, int m, Rect domain) {
  auto line = [](int count, double lo, double hi) {
    std::vector<double> t(static_cast<std::size_t>(std::max(count, 0)) + 1);
    for (int k = 0; k <= count; ++k) t[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / count;
    if (count > 0) t.back() = hi;
    return t;
  };
  return Net(line(n, domain.x0, domain.x1), line(m, domain.y0, domain.y1));
}

double AffineMaps::contraction(int i) const { return std::abs((*this)[i].a); }

double AffineMaps::max_contraction() const {
  double q = 0.0;
  for (const auto& map : maps_) q = std::max(q, std::abs(map.a));
  return q;
}

AffineMaps build_affine_maps(const Net& net, Axis axis, Orientation orientation) {
  auto t = net.knots(axis);
  const double lo = t.front();
  const double hi = t.back();
  const int count = static_cast<int>(t.size()) - 1;
  std::vector<AffineMap> maps;
  maps.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    // Endpoint images: u(lo) = start, u(hi) = finish.
    double start = t[static_cast<std::size_t>(tau(i, Edge::start))];
    double finish = t[static_cast<std::size_t>(tau(i, Edge::end))];
    if (orientation == Orientation::preserving) {
      start = t[static_cast<std::size_t>(i - 1)];
      finish = t[static_cast<std::size_t>(i)];
    }
    const double a = (finish - start) / (hi - lo);
    const double b = start - a * lo;
    maps.push_back({a, b});
  }
  return AffineMaps(axis, std::move(maps));
}

int tau(int i, Edge boundary) {
  const bool odd = (i % 2) != 0;
  if (boundary == Edge::start) return odd ? i - 1 : i;
  return odd ? i : i - 1;
}

int locate_interval(std::span<const double> knots, double t) {
  if (!(t >= knots.front() && t <= knots.back())) {
    std::ostringstream msg;
    msg << "coordinate " << t << " outside [" << knots.front() << ", " << knots.back() << "]";
    throw Error(Errc::out_of_domain, msg.str());
  }
  // First knot strictly greater than t closes the interval containing t.
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  int idx = static_cast<int>(it - knots.begin());
  return std::min(idx, static_cast<int>(knots.size()) - 1);
}

Cell locate_cell(const Net& net, double x, double y) {
  return {locate_interval(net.xs(), x), locate_interval(net.ys(), y)};
}

double Lattice::max_abs() const {
  double v = 0.0;
  for (double s : values_) v = std::max(v, std::abs(s));
  return v;
}

double Lattice::min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }

double Lattice::max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

}  // namespace fsk
