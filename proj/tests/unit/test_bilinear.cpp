#include <cmath>

#include "doctest.h"
#include "fsk/bilinear.hpp"
#include "fsk/error.hpp"
#include "support.hpp"

using namespace fsk;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no fsk::Error thrown");
  return Errc::validation_error;
}

Lattice wavy(const Net& net) {
  Lattice z(net.n() + 1, net.m() + 1);
  for (int l = 0; l <= net.m(); ++l)
    for (int k = 0; k <= net.n(); ++k) z(k, l) = std::cos(0.9 * k) * std::sin(0.4 + 1.1 * l) + 0.2 * k;
  return z;
}

}  // namespace

TEST_SUITE("bilinear") {
  TEST_CASE("data validation") {
    const Net net = uniform_net(3, 2);
    CHECK(code_of([&] { make_bilinear_data(net, Lattice(3, 3), Lattice(4, 3)); }) == Errc::shape_mismatch);
    CHECK(code_of([&] { make_bilinear_data(net, Lattice(4, 3), Lattice(4, 2)); }) == Errc::shape_mismatch);
    Lattice s(4, 3, 0.2);
    s(2, 1) = -1.0;
    CHECK(code_of([&] { make_bilinear_data(net, Lattice(4, 3), s); }) == Errc::inadmissible_scale);
    CHECK(code_of([&] { piecewise_bilinear(Lattice(2, 2), net); }) == Errc::shape_mismatch);
  }

  TEST_CASE("corner and piecewise bilinear interpolants") {
    const Net net = build_net({0, 0.25, 1}, {-1, 0, 0.5, 2});
    const BilinearData d = make_bilinear_data(net, wavy(net), Lattice(3, 4, 0.1));
    const CornerBilinear g = corner_bilinear(d, net);
    CHECK(g(0, -1) == doctest::Approx(d.z(0, 0)));
    CHECK(g(1, -1) == doctest::Approx(d.z(2, 0)));
    CHECK(g(0, 2) == doctest::Approx(d.z(0, 3)));
    CHECK(g(1, 2) == doctest::Approx(d.z(2, 3)));
    CHECK(g(0.5, 0.5) == doctest::Approx(0.25 * (d.z(0, 0) + d.z(2, 0) + d.z(0, 3) + d.z(2, 3))));

    const PiecewiseBilinear h = piecewise_bilinear(d.z, net);
    for (int l = 0; l <= 3; ++l)
      for (int k = 0; k <= 2; ++k) CHECK(h(net.x(k), net.y(l)) == doctest::Approx(d.z(k, l)));
    CHECK(h(0.125, -0.5) == doctest::Approx(0.25 * (d.z(0, 0) + d.z(1, 0) + d.z(0, 1) + d.z(1, 1))));
  }

  TEST_CASE("gamma sums for constant scalings") {
    const Net net = uniform_net(4, 4);
    const BilinearData d = make_bilinear_data(net, wavy(net), Lattice(5, 5, -0.5));
    const auto sums = gamma_sums(d, net);
    for (double s : sums) CHECK(s == doctest::Approx(8.0));
    CHECK(gamma_constant(d, net) == doctest::Approx(8.0));
    CHECK(steadiness_check(d));
  }

  TEST_CASE("unbalanced and unsteady scalings") {
    const Net net = uniform_net(3, 3);
    Lattice s(4, 4, 0.3);
    s(0, 0) = 0.9;
    const BilinearData d = make_bilinear_data(net, wavy(net), s);
    CHECK(code_of([&] { gamma_constant(d, net); }) == Errc::unbalanced_scaling);
    CHECK(code_of([&] { theoretical_box_dimension(d, net); }) == Errc::hypothesis_unmet);

    Lattice mixed(4, 4, 0.3);
    mixed(1, 1) = -0.3;
    CHECK_FALSE(steadiness_check(make_bilinear_data(net, wavy(net), mixed)));
    CHECK(code_of([&] { theoretical_box_dimension(make_bilinear_data(net, wavy(net), mixed), net); }) ==
          Errc::hypothesis_unmet);

    const Net rect = uniform_net(3, 2);
    CHECK(code_of([&] { theoretical_box_dimension(make_bilinear_data(rect, wavy(rect), Lattice(4, 3, 0.5)), rect); }) ==
          Errc::hypothesis_unmet);
  }

  TEST_CASE("dimension verdicts") {
    const Net net = uniform_net(4, 4);
    DimensionVerdict v = theoretical_box_dimension(make_bilinear_data(net, wavy(net), Lattice(5, 5, 0.5)), net);
    CHECK(v.steady);
    CHECK(v.balanced);
    CHECK_FALSE(v.co_bilinear);
    CHECK(v.gamma == doctest::Approx(8.0));
    CHECK(v.predicted == doctest::Approx(2.5));

    v = theoretical_box_dimension(make_bilinear_data(net, wavy(net), Lattice(5, 5, 0.2)), net);
    CHECK(v.gamma == doctest::Approx(3.2));
    CHECK(v.predicted == 2.0);

    Lattice flat(5, 5);
    for (int l = 0; l <= 4; ++l)
      for (int k = 0; k <= 4; ++k) flat(k, l) = 1 + 0.25 * k - 0.5 * 0.25 * l + 0.0625 * k * l;
    const BilinearData co = make_bilinear_data(net, flat, Lattice(5, 5, 0.9));
    CHECK(co_bilinear_check(co, net));
    v = theoretical_box_dimension(co, net);
    CHECK(v.co_bilinear);
    CHECK(v.predicted == 2.0);
  }

  TEST_CASE("co-bilinear data reproduce the corner bilinear function") {
    const Net net = uniform_net(3, 3);
    Lattice z(4, 4);
    for (int l = 0; l <= 3; ++l)
      for (int k = 0; k <= 3; ++k) z(k, l) = 2 - net.x(k) + 3 * net.x(k) * net.y(l);
    const BilinearData d = make_bilinear_data(net, z, Lattice(4, 4, 0.7));
    const FractalSurface s = build_bilinear_fis(d, net, {97, 1e-12});
    const CornerBilinear g = corner_bilinear(d, net);
    const SampledField& f = s.solution().field;
    CHECK(fsk::test::max_diff(f, sample(f, [&g](double x, double y) { return g(x, y); })) <= 1e-11);
  }

  TEST_CASE("zero scalings give the piecewise bilinear interpolant") {
    const Net net = build_net({0, 0.4, 1}, {0, 0.3, 0.8, 1});
    const BilinearData d = make_bilinear_data(net, wavy(net), Lattice(3, 4, 0.0));
    const FractalSurface s = build_bilinear_fis(d, net, {129, 1e-12});
    const PiecewiseBilinear h = piecewise_bilinear(d.z, net);
    const SampledField& f = s.solution().field;
    CHECK(fsk::test::max_diff(f, sample(f, [&h](double x, double y) { return h(x, y); })) <= 1e-13);
  }

  TEST_CASE("attractor interpolates the data and satisfies conformance") {
    const Net net = build_net({0, 0.3, 0.65, 1}, {0, 0.5, 1});
    Lattice s(4, 3);
    for (int l = 0; l <= 2; ++l)
      for (int k = 0; k <= 3; ++k) s(k, l) = 0.3 + 0.1 * std::sin(k + 2.0 * l);
    const BilinearData d = make_bilinear_data(net, wavy(net), s);
    const FractalSurface surf = build_bilinear_fis(d, net, {129, 1e-12});
    for (int l = 0; l <= 2; ++l)
      for (int k = 0; k <= 3; ++k) CHECK(std::abs(surf.value(net.x(k), net.y(l)) - d.z(k, l)) <= 1e-10);
    const ConformanceReport r =
        merge(verify_corner_conditions(surf.family()), verify_matching_conditions(surf.family()));
    CHECK(r.pass);
    CHECK(surf.family().max_gamma() <= s.max_abs() + 1e-15);
  }
}
