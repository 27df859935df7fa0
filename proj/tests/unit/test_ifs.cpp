#include <cmath>
#include <random>

#include "doctest.h"
#include "fsk/alpha.hpp"
#include "fsk/bilinear.hpp"
#include "fsk/error.hpp"
#include "fsk/ifs.hpp"
#include "support.hpp"

using namespace fsk;
using fsk::test::bump_operator;
using fsk::test::max_diff;
using fsk::test::sin_sin;

namespace {

AlphaSurface standard(double alpha, const Net& net = uniform_net(2, 2), SolverConfig cfg = {}) {
  return build_alpha_surface(sin_sin, bump_operator(), ScaleFunction::constant(alpha), net, cfg);
}

BilinearData sample_data(const Net& net, double s) {
  Lattice z(net.n() + 1, net.m() + 1);
  for (int l = 0; l <= net.m(); ++l)
    for (int k = 0; k <= net.n(); ++k) z(k, l) = std::sin(1.3 * k + 0.7 * l) + 0.1 * k * l;
  return make_bilinear_data(net, z, Lattice(net.n() + 1, net.m() + 1, s));
}

}  // namespace

TEST_SUITE("ifs") {
  TEST_CASE("zero scale makes the operator constant") {
    const AlphaSurface s = standard(0.0);
    const SampledField grid = SampledField::on_net(s.net(), 65, 65);
    std::mt19937_64 rng(1);
    const SampledField g = sample(grid, fsk::test::random_smooth(rng));
    const SampledField tg = rb_apply(s.family(), g);
    CHECK(max_diff(tg, sample(grid, sin_sin)) <= 1e-15);

    const SolveResult r = fixed_point_solve(s.family(), 65, 65, {1e-10, 0});
    CHECK(r.iterations == 1);
    CHECK(r.converged);
  }

  TEST_CASE("RB operator contracts at rate max gamma") {
    const AlphaSurface s = standard(0.3);
    const SampledField grid = SampledField::on_net(s.net(), 129, 129);
    const GridOperator op(s.family(), grid);
    CHECK(op.contraction() == doctest::Approx(0.3));
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
      const SampledField g1 = sample(grid, fsk::test::random_smooth(rng));
      const SampledField g2 = sample(grid, fsk::test::random_smooth(rng));
      CHECK(max_diff(op.apply(g1), op.apply(g2)) <= 0.3 * max_diff(g1, g2) + 1e-12);
    }
  }

  TEST_CASE("iteration count follows the contraction rate") {
    // 201 nodes per axis: pullback chains never terminate at the knots, so the
    // residual shrinks by exactly the scale factor each sweep.
    const AlphaSurface s = standard(0.5);
    const double tol = 1e-8;
    const SolveResult r = fixed_point_solve(s.family(), 201, 201, {tol, 0});
    const double predicted = 1 + std::ceil(std::log(tol / r.initial_residual) / std::log(0.5));
    CHECK(std::abs(r.iterations - predicted) <= 2);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= 0.5 * r.history[k - 1] + 1e-15);
  }

  TEST_CASE("solution interpolates the knot values") {
    for (const Net& net : {uniform_net(2, 2), build_net({0, 0.3, 0.45, 1}, {0, 0.6, 1})}) {
      const AlphaSurface s = standard(0.4, net, {129, 1e-10});
      const SampledField& f = s.field();
      for (int l = 0; l <= net.m(); ++l)
        for (int k = 0; k <= net.n(); ++k)
          CHECK(std::abs(f.interpolate(net.x(k), net.y(l)) - sin_sin(net.x(k), net.y(l))) <= 1e-10);
    }
  }

  TEST_CASE("max_iter exhaustion carries the best iterate") {
    const AlphaSurface s = standard(0.9);
    try {
      fixed_point_solve(s.family(), 201, 201, {1e-12, 3});
      FAIL("expected MaxIterExceeded");
    } catch (const MaxIterExceeded& e) {
      CHECK(e.code() == Errc::max_iter_exceeded);
      CHECK(e.best().iterations == 3);
      CHECK_FALSE(e.best().converged);
      CHECK(e.best().field.nx() == 201);
    }
    CHECK(default_max_iter(1e-10, 1.0, 0.5) == static_cast<int>(std::ceil(std::log(1e-10 / 2.0) / std::log(0.5))) + 16);
    CHECK(default_max_iter(1e-10, 1.0, 0.0) == 16);
  }

  TEST_CASE("grids without the knots are rejected") {
    const AlphaSurface s = standard(0.3);
    try {
      rb_apply(s.family(), SampledField::uniform(kUnitSquare, 4, 4));
      FAIL("expected ResolutionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::resolution_mismatch);
    }
  }

  TEST_CASE("orbit depth 0 and 1") {
    const AlphaSurface s = standard(0.3);
    const SurfaceOrbit o0 = orbit_evaluate(s.family(), 0);
    CHECK(o0.points.size() == 9);
    const SurfaceOrbit o1 = orbit_evaluate(s.family(), 1);
    CHECK(o1.points.size() <= 36);
    CHECK(o1.points.size() == 25);
    const OrbitCheck c = orbit_residual(s.family(), o1);
    CHECK(c.max_residual <= 1e-12);
    CHECK(c.missing_preimages == 0);
  }

  TEST_CASE("point budget guard") {
    const AlphaSurface s = standard(0.3);
    try {
      orbit_evaluate(s.family(), 6, 1000);
      FAIL("expected PointBudgetExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::point_budget_exceeded);
    }
  }

  TEST_CASE("orbit and grid engines agree") {
    const AlphaSurface s = standard(0.3, uniform_net(2, 2), {257, 1e-12});
    const SurfaceOrbit orbit = orbit_evaluate(s.family(), 6);
    double worst = 0.0;
    for (const auto& p : orbit.points) worst = std::max(worst, std::abs(s.field().interpolate(p.x, p.y) - p.z));
    CHECK(worst <= 1e-11);
  }

  TEST_CASE("orbit and pointwise engines agree on an irregular net") {
    const Net net = build_net({0, 0.2, 0.7, 1}, {0, 0.45, 1});
    const AlphaSurface s = standard(0.35, net);
    const SurfaceOrbit orbit = orbit_evaluate(s.family(), 3);
    const OrbitCheck c = orbit_residual(s.family(), orbit);
    CHECK(c.max_residual <= 1e-12);
    CHECK(c.missing_preimages == 0);
    const int depth = pointwise_depth(s.family(), 1e-12);
    double worst = 0.0;
    for (std::size_t k = 0; k < orbit.points.size(); k += 7) {
      const auto& p = orbit.points[k];
      worst = std::max(worst, std::abs(pointwise_evaluate(s.family(), p.x, p.y, depth) - p.z));
    }
    CHECK(worst <= 1e-11);
  }

  TEST_CASE("edge continuity across shared grid lines") {
    const Net net = build_net({0, 0.4, 1}, {0, 0.25, 0.5, 1});
    const AlphaSurface s = standard(0.45, net);
    const int depth = pointwise_depth(s.family(), 1e-13);
    for (double y : {0.1, 0.33, 0.8}) {
      const double left = pointwise_evaluate(s.family(), 0.4, y, depth, Cell{1, locate_cell(net, 0.4, y).j});
      const double right = pointwise_evaluate(s.family(), 0.4, y, depth, Cell{2, locate_cell(net, 0.4, y).j});
      CHECK(std::abs(left - right) <= 1e-10);
    }
    for (double x : {0.05, 0.5, 0.9}) {
      const int i = locate_cell(net, x, 0.5).i;
      const double below = pointwise_evaluate(s.family(), x, 0.5, depth, Cell{i, 2});
      const double above = pointwise_evaluate(s.family(), x, 0.5, depth, Cell{i, 3});
      CHECK(std::abs(below - above) <= 1e-10);
    }
    CHECK_THROWS_AS(pointwise_evaluate(s.family(), 0.7, 0.1, depth, Cell{1, 1}), Error);
  }

  TEST_CASE("pointwise engine matches the grid engine") {
    SolverConfig pw;
    pw.engine = Engine::pointwise;
    const AlphaSurface grid = standard(0.3, uniform_net(2, 2), {257, 1e-12});
    const AlphaSurface point = standard(0.3, uniform_net(2, 2), pw);
    for (double x : {0.0, 0.125, 0.5, 0.75, 1.0})
      for (double y : {0.0, 0.25, 0.375, 1.0}) CHECK(std::abs(grid.value(x, y) - point.value(x, y)) <= 1e-9);
    CHECK_THROWS_AS(point.value(1.5, 0.0), Error);
  }

  TEST_CASE("conformance passes for constructed families") {
    const Net net = build_net({0, 0.3, 0.55, 1}, {0, 0.5, 1});
    const AlphaSurface s = standard(0.4, net);
    ConformanceReport r = merge(verify_corner_conditions(s.family()), verify_matching_conditions(s.family()));
    CHECK(r.pass);
    CHECK(r.corner_defect <= 1e-12);
    CHECK(r.matching_defect <= 1e-12);

    const VerticalMapFamily b = bilinear_family(net, sample_data(net, 0.4));
    r = merge(verify_corner_conditions(b), verify_matching_conditions(b));
    CHECK(r.pass);
  }

  TEST_CASE("corrupted families fail conformance") {
    const Net net = uniform_net(3, 3);
    const BilinearData data = sample_data(net, 0.4);
    Lattice h = data.z;
    h(1, 2) += 0.1;
    const ConformanceReport corner = verify_corner_conditions(bilinear_family(net, data, Orientation::alternating, h),
                                                              data.z);
    CHECK_FALSE(corner.pass);
    CHECK(corner.corner_defect >= 0.09);
    CHECK_FALSE(corner.worst.empty());

    const ConformanceReport matching =
        verify_matching_conditions(bilinear_family(net, data, Orientation::preserving));
    CHECK_FALSE(matching.pass);
  }

  TEST_CASE("vertical maps are Lipschitz in z with constant gamma") {
    const Net net = build_net({0, 0.3, 1}, {0, 0.6, 0.8, 1});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> z(-5.0, 5.0);
    const AlphaSurface s = build_alpha_surface(
        sin_sin, bump_operator(), ScaleFunction([](double x, double y) { return 0.5 * x * y - 0.2; }, kUnitSquare),
        net);
    Lattice slopes(net.n() + 1, net.m() + 1);
    for (int l = 0; l <= net.m(); ++l)
      for (int k = 0; k <= net.n(); ++k) slopes(k, l) = 0.8 * std::cos(1.0 * k + 2.0 * l);
    const VerticalMapFamily b = bilinear_family(net, make_bilinear_data(net, sample_data(net, 0).z, slopes));
    for (const VerticalMapFamily* fam : {&s.family(), &b}) {
      for (int t = 0; t < 500; ++t) {
        const int i = 1 + static_cast<int>(u(rng) * net.n()) % net.n();
        const int j = 1 + static_cast<int>(u(rng) * net.m()) % net.m();
        const double x = u(rng);
        const double y = u(rng);
        const double z1 = z(rng);
        const double z2 = z(rng);
        CHECK(std::abs((*fam)(i, j, x, y, z1) - (*fam)(i, j, x, y, z2)) <=
              fam->gamma(i, j) * std::abs(z1 - z2) * (1 + 1e-12) + 1e-14);
      }
    }
  }

  TEST_CASE("general evaluators match the z-affine fast path") {
    const Net net = uniform_net(2, 3);
    const VerticalMapFamily affine = bilinear_family(net, sample_data(net, 0.45));
    VerticalMapFamily::Parts parts{net,
                                   affine.ux(),
                                   affine.vy(),
                                   [&affine](int i, int j, double x, double y, double z) { return affine(i, j, x, y, z); },
                                   std::nullopt,
                                   Lattice(2, 3, 0.45),
                                   affine.knot_values(),
                                   [&affine](double x, double y) { return affine.initial_guess(x, y); }};
    const VerticalMapFamily general(parts);
    CHECK(general.affine() == nullptr);
    const SolveResult a = fixed_point_solve(affine, 97, 97, {1e-11, 0});
    const SolveResult g = fixed_point_solve(general, 97, 97, {1e-11, 0});
    CHECK(max_diff(a.field, g.field) <= 1e-13);
  }

  TEST_CASE("families validate their parts") {
    const Net net = uniform_net(2, 2);
    const VerticalMapFamily ok = bilinear_family(net, sample_data(net, 0.2));
    VerticalMapFamily::Parts bad{net, ok.ux(), ok.vy(), {}, *ok.affine(), Lattice(2, 2, 1.0), ok.knot_values(), {}};
    CHECK_THROWS_AS(VerticalMapFamily{bad}, Error);
    bad.gamma = Lattice(3, 2, 0.1);
    CHECK_THROWS_AS(VerticalMapFamily{bad}, Error);
  }
}
