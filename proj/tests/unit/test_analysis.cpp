#include <cmath>

#include "doctest.h"
#include "fsk/analysis.hpp"
#include "fsk/error.hpp"
#include "support.hpp"

using namespace fsk;
using fsk::test::bump_operator;
using fsk::test::sin_sin;

TEST_SUITE("analysis") {
  TEST_CASE("sup and Lp norms") {
    const SampledField two = sample(SampledField::uniform(Rect{0, 2, 0, 1}, 33, 17), [](double, double) { return -2.0; });
    CHECK(sup_norm(two) == 2.0);
    CHECK(lp_norm(two, 1) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(lp_norm(two, 2) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));

    const SampledField x = sample(SampledField::uniform(kUnitSquare, 257, 257), [](double x, double) { return x; });
    CHECK(lp_norm(x, 2) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-5));
    CHECK(lp_norm(x, 1) == doctest::Approx(0.5).epsilon(1e-12));
    try {
      lp_norm(x, 0.5);
      FAIL("expected BadExponent");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::bad_exponent);
    }
  }

  TEST_CASE("Lp perturbation bound") {
    const AlphaSurface s = build_alpha_surface(sin_sin, bump_operator(), ScaleFunction::constant(0.3), uniform_net(2, 2));
    for (double p : {1.0, 2.0, 3.5}) {
      const LpBoundReport r = verify_lp_bound(s, p);
      CHECK(r.pass);
      CHECK(r.lhs <= r.rhs + r.slack);
      CHECK(r.lhs > 0.0);
    }
  }

  TEST_CASE("box counting of a plane is exactly two") {
    const SampledField plane = sample(SampledField::uniform(kUnitSquare, 513, 513), [](double x, double y) { return x + y; });
    const BoxCountReport r = box_count_dimension(plane, 3, 9);
    CHECK(r.levels.size() == 7);
    CHECK(r.dimension == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.residual <= 1e-9);
    CHECK(r.dropped == 0);
  }

  TEST_CASE("box counting needs a fine uniform grid") {
    const SampledField coarse = SampledField::uniform(kUnitSquare, 100, 100);
    try {
      box_count_dimension(coarse, 3, 9);
      FAIL("expected ResolutionTooCoarse");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::resolution_too_coarse);
    }
    const SampledField irregular = SampledField::on_net(build_net({0, 0.3, 1}, {0, 0.5, 1}), 513, 513);
    CHECK_THROWS_AS(box_count_dimension(irregular, 3, 9), Error);
  }

  TEST_CASE("Ditzian-Totik modulus") {
    CHECK(dt_modulus([](double x, double y) { return 3 * x - y + 1; }, 0.5, 0.5, 65) <= 1e-14);
    // Second difference of x^2 is 2 (delta phi(x))^2, largest at x = 0.
    CHECK(dt_modulus([](double x, double) { return x * x; }, 0.2, 0.2, 129) == doctest::Approx(2 * 0.04).epsilon(1e-12));
    const double coarse = dt_modulus([](double x, double y) { return std::sin(3 * x) * std::cos(2 * y); }, 0.4, 0.4, 65);
    const double fine = dt_modulus([](double x, double y) { return std::sin(3 * x) * std::cos(2 * y); }, 0.1, 0.1, 65);
    CHECK(fine < coarse);
    CHECK_THROWS_AS(dt_modulus([](double, double) { return 0.0; }, 0.0, 0.5), Error);
  }

  TEST_CASE("convergence tables") {
    const Net net = uniform_net(2, 2);
    std::vector<ScaleFunction> alphas;
    for (int n = 1; n <= 5; ++n) alphas.push_back(ScaleFunction::constant(0.5 / n));
    const ConvergenceTable t = convergence_table_alpha(sin_sin, bump_operator(), net, alphas, {129, 1e-10});
    CHECK(t.all_pass);
    REQUIRE(t.rows.size() == 5);
    for (std::size_t k = 1; k < t.rows.size(); ++k) CHECK(t.rows[k].measured < t.rows[k - 1].measured);

    std::vector<PerturbOperator> ops;
    for (int n : {1, 2, 4, 8, 16}) ops.push_back(bernstein_operator(n, n));
    const ConvergenceTable u = convergence_table_operator(sin_sin, ScaleFunction::constant(0.4), net, ops, {129, 1e-10});
    CHECK(u.all_pass);
    CHECK(u.rows.back().measured < u.rows.front().measured);
  }
}
