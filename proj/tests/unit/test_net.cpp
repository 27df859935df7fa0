#include "doctest.h"
#include "fsk/error.hpp"
#include "fsk/net.hpp"

using namespace fsk;

TEST_SUITE("net") {
  TEST_CASE("build_net validates knots") {
    const Net net = build_net({0, 0.5, 1}, {0, 0.5, 1});
    CHECK(net.n() == 2);
    CHECK(net.m() == 2);

    try {
      build_net({0, 0, 1}, {0, 1, 2});
      FAIL("expected NonIncreasingKnots");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::non_increasing_knots);
    }
    try {
      build_net({0, 1}, {0, 0.5, 1});
      FAIL("expected TooFewIntervals");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::too_few_intervals);
    }
  }

  TEST_CASE("affine maps solve the endpoint conditions") {
    const AffineMaps u = build_affine_maps(uniform_net(2, 2), Axis::x);
    CHECK(u[1].a == doctest::Approx(0.5));
    CHECK(u[1].b == doctest::Approx(0.0));
    CHECK(u[2].a == doctest::Approx(-0.5));
    CHECK(u[2].b == doctest::Approx(1.0));

    const Net skewed = build_net({0, 0.25, 1}, {0, 0.5, 1});
    const AffineMaps v = build_affine_maps(skewed, Axis::x);
    CHECK(v[1].a == doctest::Approx(0.25));
    CHECK(v[1].b == doctest::Approx(0.0));
    CHECK(v[2].a == doctest::Approx(-0.75));
    CHECK(v[2].b == doctest::Approx(1.0));
    CHECK(v.max_contraction() == doctest::Approx(0.75));
  }

  TEST_CASE("maps hit the parity-dependent endpoints exactly") {
    const Net net = build_net({-1, -0.2, 0.1, 0.7, 2}, {0, 1, 3});
    for (Axis axis : {Axis::x, Axis::y}) {
      const auto t = net.knots(axis);
      const AffineMaps maps = build_affine_maps(net, axis);
      for (int i = 1; i <= maps.count(); ++i) {
        CHECK(maps[i](t.front()) == doctest::Approx(t[static_cast<std::size_t>(tau(i, Edge::start))]).epsilon(1e-15));
        CHECK(maps[i](t.back()) == doctest::Approx(t[static_cast<std::size_t>(tau(i, Edge::end))]).epsilon(1e-15));
        CHECK(maps.contraction(i) < 1.0);
      }
      // Adjacent maps share the preimage of their common knot.
      for (int i = 1; i < maps.count(); ++i) {
        const double a = maps[i].inverse(t[static_cast<std::size_t>(i)]);
        const double b = maps[i + 1].inverse(t[static_cast<std::size_t>(i)]);
        CHECK(a == doctest::Approx(b).epsilon(1e-14));
        CHECK(a == doctest::Approx(i % 2 == 1 ? t.back() : t.front()).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("tau") {
    CHECK(tau(1, Edge::start) == 0);
    CHECK(tau(1, Edge::end) == 1);
    CHECK(tau(2, Edge::start) == 2);
    CHECK(tau(2, Edge::end) == 1);
    CHECK(tau(3, Edge::start) == 2);
    for (int i = 1; i < 10; ++i) {
      for (Edge e : {Edge::start, Edge::end}) {
        CHECK((tau(i, e) == i - 1 || tau(i, e) == i));
      }
      CHECK(tau(i, Edge::start) != tau(i, Edge::end));
    }
  }

  TEST_CASE("locate_cell uses half-open cells") {
    const Net net = uniform_net(2, 2);
    CHECK(locate_cell(net, 0.3, 0.7) == Cell{1, 2});
    CHECK(locate_cell(net, 0.5, 0.5) == Cell{2, 2});
    CHECK(locate_cell(net, 1.0, 1.0) == Cell{2, 2});
    CHECK(locate_cell(net, 0.0, 0.0) == Cell{1, 1});
    try {
      locate_cell(net, 1.5, 0.5);
      FAIL("expected OutOfDomain");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_domain);
    }
  }

  TEST_CASE("locate_cell is total and its cell contains the point") {
    const Net net = build_net({0, 0.1, 0.35, 0.8, 1}, {-2, -1, 0.5});
    for (int a = 0; a <= 50; ++a) {
      for (int b = 0; b <= 50; ++b) {
        const double x = a / 50.0;
        const double y = -2 + 2.5 * b / 50.0;
        const Cell c = locate_cell(net, x, y);
        CHECK(x >= net.x(c.i - 1));
        CHECK(x <= net.x(c.i));
        CHECK(y >= net.y(c.j - 1));
        CHECK(y <= net.y(c.j));
        if (c.i < net.n()) CHECK(x < net.x(c.i));
        if (c.j < net.m()) CHECK(y < net.y(c.j));
      }
    }
  }

  TEST_CASE("lattice statistics") {
    Lattice l(2, 3, 1.0);
    l(1, 2) = -4.0;
    CHECK(l.max_abs() == 4.0);
    CHECK(l.min() == -4.0);
    CHECK(l.max() == 1.0);
  }
}
