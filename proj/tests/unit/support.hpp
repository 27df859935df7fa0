#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "fsk/alpha.hpp"
#include "fsk/field.hpp"

namespace fsk::test {

inline double sin_sin(double x, double y) {
  return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

inline double bump(double x, double y) { return 1.0 + x * (1.0 - x) * y * (1.0 - y); }

inline PerturbOperator bump_operator() { return multiplication_operator(bump); }

inline double max_diff(const SampledField& a, const SampledField& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

/// Smooth random function: a short random trigonometric sum.
inline BivariateFn random_smooth(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> freq(-6.0, 6.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::array<double, 12> c{};
  for (double& v : c) v = freq(rng);
  for (int r = 0; r < 3; ++r) c[4 * r] = unit(rng);
  return [c](double x, double y) {
    double s = 0.0;
    for (int r = 0; r < 3; ++r) s += c[4 * r] * std::cos(c[4 * r + 1] * x + c[4 * r + 2] * y + c[4 * r + 3]);
    return s;
  };
}

}  // namespace fsk::test
