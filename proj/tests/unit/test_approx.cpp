#include <cmath>

#include "doctest.h"
#include "fsk/approx.hpp"
#include "fsk/error.hpp"
#include "support.hpp"

using namespace fsk;
using fsk::test::bump_operator;
using fsk::test::sin_sin;

TEST_SUITE("approx") {
  TEST_CASE("polynomial spaces") {
    CHECK(poly_basis(2, 2).dimension() == 15);
    CHECK(poly_basis(2, 3, kUnitSquare, DegreeConvention::tensor).dimension() == 12);
    CHECK(poly_basis(0, 0).dimension() == 1);
    const PolySpace s(1, 1, Rect{0, 4, -1, 1});
    const Point2 r = s.to_reference(3, 0.5);
    CHECK(r.x == doctest::Approx(0.5));
    CHECK(r.y == doctest::Approx(0.5));
    const std::vector<double> c(s.dimension(), 1.0);
    double expect = 0.0;
    for (const auto& [i, j] : s.exponents()) expect += std::pow(0.5, i) * std::pow(0.5, j);
    CHECK(s.evaluate(c, 3, 0.5) == doctest::Approx(expect));
  }

  TEST_CASE("fits reproduce members of the space") {
    const PolySpace s(2, 1);
    const BivariateFn f = [](double x, double y) { return 1 - 2 * x + x * x * y - 0.5 * y; };
    for (ApproxNorm norm : {ApproxNorm::l2, ApproxNorm::sup}) {
      const ApproxResult r = best_approx(f, s, 65, norm);
      CHECK(r.sup_error <= 1e-12);
      const BivariateFn p = s.polynomial(r.coefficients);
      CHECK(p(0.3, 0.8) == doctest::Approx(f(0.3, 0.8)).epsilon(1e-12));
    }
  }

  TEST_CASE("minimax line for x squared") {
    // Best uniform linear approximation of x^2 on [0, 1] has error 1/8,
    // attained at x = 0, 1/2, 1 which are grid nodes.
    const PolySpace s(1, 0);
    const BivariateFn f = [](double x, double) { return x * x; };
    const ApproxResult ls = best_approx(f, s, 129, ApproxNorm::l2);
    const ApproxResult mm = best_approx(f, s, 129, ApproxNorm::sup);
    CHECK(mm.method == "minimax-irls");
    // The certified band brackets the grid optimum; Lawson closes it only
    // linearly, so the estimate is held to 1e-4 relative.
    CHECK(mm.lower_bound <= 0.125 + 1e-15);
    CHECK(mm.sup_error >= 0.125 - 1e-12);
    CHECK(mm.sup_error <= 0.125 * (1 + 1e-4));
    CHECK(mm.lower_bound >= 0.125 * (1 - 2e-3));
    CHECK(mm.sup_error <= ls.sup_error);
    CHECK(ls.lower_bound < mm.lower_bound);
  }

  TEST_CASE("rank deficiency") {
    try {
      best_approx(sin_sin, poly_basis(2, 2), 3);
      FAIL("expected RankDeficient");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::rank_deficient);
    }
  }

  TEST_CASE("fractal polynomials interpolate the polynomial at the knots") {
    const Net net = build_net({0, 0.4, 1}, {0, 0.5, 1});
    const PolySpace s(1, 1, kUnitSquare, DegreeConvention::tensor);
    const std::vector<double> c{0.5, 1.0, -2.0, 0.25};
    const AlphaSurface pa = fractal_polynomial(s, c, bump_operator(), ScaleFunction::constant(0.4), net);
    const BivariateFn p = s.polynomial(c);
    for (int l = 0; l <= 2; ++l)
      for (int k = 0; k <= 2; ++k) CHECK(std::abs(pa.value(net.x(k), net.y(l)) - p(net.x(k), net.y(l))) <= 1e-10);
  }

  TEST_CASE("fractal approximation chain inequality") {
    const Net net = uniform_net(2, 2);
    for (double a : {0.05, 0.3}) {
      const ChainReport r =
          verify_approx_chain(sin_sin, 2, 2, ScaleFunction::constant(a), bump_operator(), net, 65, 2e-6, {65, 1e-11});
      CHECK(r.pass);
      CHECK(r.e_alpha <= r.candidate_error + 2e-6);
      CHECK(r.e_alpha <= r.rhs + r.slack);
    }
  }

  TEST_CASE("epsilon fractal polynomial") {
    const Net net = uniform_net(2, 2);
    const BivariateFn f = [](double x, double y) { return std::exp(x * y); };
    EpsilonOptions opt;
    opt.grid_res = 65;
    opt.solver = {65, 1e-11};
    const EpsilonResult r = epsilon_fractal_polynomial(f, 0.05, bump_operator(), net, opt);
    CHECK(r.stage_one_error < 0.025);
    CHECK(r.achieved_error < 0.05);
    CHECK(r.alpha == doctest::Approx(0.9 * r.threshold));
    CHECK(r.threshold == doctest::Approx(0.025 / (0.025 + 0.0625 * r.p_sup)));
    REQUIRE(r.p_alpha.has_value());
    CHECK(r.p_alpha->alpha().sup() == doctest::Approx(r.alpha));

    EpsilonOptions tiny = opt;
    tiny.max_degree = 2;
    try {
      epsilon_fractal_polynomial(sin_sin, 1e-9, bump_operator(), net, tiny);
      FAIL("expected DegreeBudgetExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degree_budget_exceeded);
    }
  }
}
