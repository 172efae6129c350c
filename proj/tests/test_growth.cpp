#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "wvlab/growth.hpp"

using namespace wvlab;
using testutil::exp_pole_a;
using testutil::exp_pole_B;
using testutil::power_law_a;
using testutil::power_law_B;

namespace {

Real eps_direct(Real r, Real a, Real beta, Real delta) {
  const Real L = std::pow(std::log(a), 1 + delta);
  return std::min((1 - r) / (2 * std::pow(a, beta) * L), 1 / (std::pow(a, 1 - beta) * L));
}

GrowthParams params_with_r0(Real r0) {
  GrowthParams p;
  p.r0 = r0;
  return p;
}

}  // namespace

TEST_CASE("circle maximum for catalog functions") {
  const TractSpec tract;
  const auto pl = max_on_circle(FunctionSpec::power_law(2), tract, 0.9L);
  CHECK(pl.B == doctest::Approx(4.605170).epsilon(1e-6));
  CHECK(std::abs(pl.B - power_law_B(2, 0.9L)) <= 1e-8L * pl.B);
  CHECK(pl.theta == 0);

  const auto ep = max_on_circle(FunctionSpec::exp_pole(1, 1), tract, 0.5L);
  CHECK(std::abs(ep.B - 2) <= 1e-8L * 2);
  CHECK(ep.theta == 0);
}

TEST_CASE("circle maximum dominates v at random angles") {
  const TractSpec tract;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0, 2 * M_PI);
  const std::vector<FunctionSpec> specs{
      FunctionSpec::power_law(2), FunctionSpec::exp_pole(1, 1),
      FunctionSpec::product({FunctionSpec::power_law(1), FunctionSpec::exp_pole(0.5L, 2)})};
  for (const auto& spec : specs) {
    for (const Real r : {0.6L, 0.9L, 0.97L}) {
      const Real B = max_on_circle(spec, tract, r).B;
      for (int i = 0; i < 128; ++i) CHECK(B >= v_eval(spec, tract, std::polar(r, static_cast<Real>(angle(rng)))));
    }
  }
}

TEST_CASE("an off-axis maximum is located") {
  // f = 1/(1 - z e^{-i}) peaks at theta = 1.
  std::vector<Complex> c;
  for (int n = 0; n < 200; ++n) c.push_back(std::polar(Real(1), -static_cast<Real>(n)));
  const auto m = max_modulus_on_circle(c, 0.5L);
  // at a quadratic peak theta is resolved only to about the square root of the working precision
  CHECK(m.theta == doctest::Approx(1).epsilon(1e-8));
  CHECK(m.B == doctest::Approx(std::log(Real(2))).epsilon(1e-12));
}

TEST_CASE("a(r) from finite differences") {
  const TractSpec tract;
  const GrowthParams params;
  const Real step = GridSpec{}.span / (GridSpec{}.points - 1);
  const auto pl = compute_sample(FunctionSpec::power_law(2), tract, 0.9L, params, step);
  CHECK(std::abs(pl.a - 18) <= 0.1L);
  CHECK(pl.eps == doctest::Approx(static_cast<double>(eps_direct(0.9L, pl.a, 0.25L, 0.5L))));
  const auto ep = compute_sample(FunctionSpec::exp_pole(1, 1), tract, 0.9L, params, step);
  CHECK(std::abs(ep.a - 90) <= 1);
  CHECK_FALSE(pl.suspect);
  CHECK_FALSE(ep.suspect);

  // B identically 0 where |f| < R everywhere on the circle.
  const TractSpec high{1e6L, {0.999999L, 0}};
  const auto flat = a_estimate(FunctionSpec::power_law(2), high, 0.5L, 0, 0.01L);
  CHECK(flat.a == 0);
}

TEST_CASE("epsilon schedule") {
  CHECK(epsilon(0.9L, 18, 0.25L, 0.5L) == doctest::Approx(0.004940).epsilon(1e-3));
  CHECK(epsilon(0.9L, 18, 0.25L, 0.5L) == doctest::Approx(static_cast<double>(eps_direct(0.9L, 18, 0.25L, 0.5L))));
  CHECK(epsilon(0.9L, 90, 0.25L, 0.5L) == doctest::Approx(static_cast<double>(eps_direct(0.9L, 90, 0.25L, 0.5L))));
  for (const Real r : {0.5L, 0.9L, 0.999L})
    for (const Real a : {2.0L, 18.0L, 1e4L}) {
      const Real first = (1 - r) / (2 * std::pow(a, 0.25L) * std::pow(std::log(a), 1.5L));
      CHECK(epsilon(r, a, 0.25L, 0.5L) <= first);
    }
  CHECK_THROWS_AS(epsilon(0.9L, 1.5L, 0.25L, 0.5L), Error);
}

TEST_CASE("order estimates on closed-form profiles") {
  const GrowthParams p = params_with_r0(0.3L);
  const auto pl = testutil::closed_form_profile([](Real r) { return power_law_B(2, r); },
                                                [](Real r) { return power_law_a(2, r); }, p);
  const auto e1 = testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 1, r); },
                                                [](Real r) { return exp_pole_a(1, 1, r); }, p);
  const auto e2 = testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 2, r); },
                                                [](Real r) { return exp_pole_a(1, 2, r); }, p);
  CHECK(std::abs(*pl.order_estimate - 0) <= 0.1L);
  CHECK(std::abs(*e1.order_estimate - 1) <= 0.1L);
  CHECK(std::abs(*e2.order_estimate - 2) <= 0.15L);

  std::vector<GrowthSample> few(pl.samples.begin(), pl.samples.begin() + 10);
  CHECK_THROWS_AS(order_estimate(few), Error);
}

TEST_CASE("least-squares slope of a line") {
  const std::vector<Real> xs{0, 1, 2, 3, 4};
  const std::vector<Real> ys{1, 3, 5, 7, 9};
  CHECK(least_squares_slope(xs, ys) == doctest::Approx(2));
}

TEST_CASE("validated r0 for closed forms") {
  const GrowthParams p = params_with_r0(0.3L);
  const auto pl = testutil::closed_form_profile([](Real r) { return power_law_B(2, r); },
                                                [](Real r) { return power_law_a(2, r); }, p);
  const Real bound = 1 - std::exp(Real(-1));
  CHECK(pl.params.r0 >= bound - 1e-15L);
  // the previous grid point fails
  const Real prev_x = pl.samples.front().x - pl.grid_step;
  CHECK(-std::expm1(-prev_x) < bound);

  const auto e1 = testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 1, r); },
                                                [](Real r) { return exp_pole_a(1, 1, r); }, p);
  CHECK(e1.params.r0 >= 0.5L);
  CHECK(e1.params.r0 < 0.5L + 0.02L);

  // bounded polynomial 1 + z/2: v <= log 1.5 < 2
  const auto poly = FunctionSpec::power_series({{1, 0}, {0.5L, 0}});
  CHECK_THROWS_AS(build_profile(poly, TractSpec{0.5L, {0.5L, 0}}, p, GridSpec{6, 24}), Error);
}

TEST_CASE("computed profile matches closed forms") {
  const TractSpec tract;
  const GridSpec grid{12, 64};
  for (int which = 0; which < 2; ++which) {
    const auto spec = which == 0 ? FunctionSpec::power_law(2) : FunctionSpec::exp_pole(1, 1);
    const auto prof = build_profile(spec, tract, params_with_r0(0.3L), grid);
    REQUIRE(prof.samples.size() > 32);
    for (const auto& s : prof.samples) {
      const Real B = which == 0 ? power_law_B(2, s.r) : exp_pole_B(1, 1, s.r);
      const Real a = which == 0 ? power_law_a(2, s.r) : exp_pole_a(1, 1, s.r);
      CHECK(std::abs(s.B - B) <= 1e-6L * std::max<Real>(1, B));
      CHECK(std::abs(s.a - a) <= 0.02L * a);
      CHECK(s.B >= 2);
      CHECK(s.a >= 2);
      CHECK(s.eps > 0);
      CHECK(s.eps <= (1 - s.r) / (2 * std::pow(s.a, 0.25L) * std::pow(std::log(s.a), 1.5L)));
      CHECK(s.eps <= 1);
    }
    const auto inv = check_invariants(prof);
    CHECK(inv.B_non_decreasing);
    CHECK(inv.B_convex_in_log_r);
    CHECK(inv.a_non_decreasing);

    // eps strictly decreasing on the last quartile
    const auto& s = prof.samples;
    for (std::size_t i = s.size() - s.size() / 4; i < s.size(); ++i) CHECK(s[i].eps < s[i - 1].eps);

    // B <= C a + C with C fitted once
    Real C = 0;
    for (const auto& t : s) C = std::max(C, t.B / (t.a + 1));
    CHECK(C < 10);
  }
}

TEST_CASE("serial and parallel sampling agree") {
  const auto spec = FunctionSpec::exp_pole(1, 1);
  const GridSpec grid{6, 24};
  const auto a = sample_grid(spec, {}, params_with_r0(0.5L), grid, {}, Execution::Serial);
  const auto b = sample_grid(spec, {}, params_with_r0(0.5L), grid, {}, Execution::Parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].B == b[i].B);
    CHECK(a[i].a == b[i].a);
  }
}

TEST_CASE("interpolation in x") {
  const GrowthParams p = params_with_r0(0.3L);
  const auto e1 = testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 1, r); },
                                                [](Real r) { return exp_pole_a(1, 1, r); }, p);
  const auto& s = e1.samples;
  CHECK(interpolate_in_x(s, s[10].x, &GrowthSample::a) == doctest::Approx(static_cast<double>(s[10].a)));
  const Real mid = (s[10].x + s[11].x) / 2;
  CHECK(interpolate_in_x(s, mid, &GrowthSample::a) == doctest::Approx(static_cast<double>((s[10].a + s[11].a) / 2)));
}

TEST_CASE("positive-order windows") {
  CHECK(window_end(0.99L, 0.5L) == doctest::Approx(0.999).epsilon(1e-12));

  GrowthParams p = params_with_r0(0.3L);
  p.rho0 = 0.5L;
  const auto e2 = testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 2, r); },
                                                [](Real r) { return exp_pole_a(1, 2, r); }, p);
  // diagnostic (1-r)^{1.5} a^{0.5} at r = 0.99 with a = 2r/(1-r)^3
  const Real expected = std::pow(Real(0.01), 1.5L) * std::sqrt(2 * 0.99L / std::pow(Real(0.01), 3));
  CHECK(expected == doctest::Approx(1.407).epsilon(1e-3));
  try {
    positive_order_window(e2, 0.99L);
    FAIL("window should be rejected");
  } catch (const WindowRejectedError& e) {
    CHECK(e.diagnostic() == doctest::Approx(static_cast<double>(expected)).epsilon(1e-3));
  }
  // For k = 2 the diagnostic is sqrt(2r) < 10 at every r; k = 3 gives accepted windows.
  const auto e3 = testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 3, r); },
                                                [](Real r) { return exp_pole_a(1, 3, r); }, p);
  const auto w = positive_order_window(e3, 0.99L);
  CHECK(w.r_n_prime == doctest::Approx(0.999).epsilon(1e-12));
  CHECK(w.diagnostic == doctest::Approx(static_cast<double>(std::pow(Real(0.01), 1.5L) *
                                                            std::sqrt(3 * 0.99L / std::pow(Real(0.01), 4))))
                            .epsilon(1e-3));

  // rho0 above the order
  GrowthParams high = p;
  high.rho0 = 5;
  auto e3_high = e3;
  e3_high.params = high;
  try {
    positive_order_window(e3_high, 0.99L);
    FAIL("precondition should fail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PreconditionFailed);
  }
  auto no_rho = e3;
  no_rho.params.rho0.reset();
  CHECK_THROWS_AS(positive_order_window(no_rho, 0.99L), Error);
}
