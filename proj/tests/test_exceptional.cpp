#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "wvlab/exceptional.hpp"

using namespace wvlab;
using testutil::exp_pole_a;
using testutil::exp_pole_B;
using testutil::power_law_a;
using testutil::power_law_B;

namespace {

std::vector<Real> grid(Real lo, Real hi, int n) {
  std::vector<Real> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * i / (n - 1));
  return xs;
}

GrowthProfile power_law_profile(Real span = 12, int points = 512) {
  GrowthParams p;
  p.r0 = 0.3L;
  return testutil::closed_form_profile([](Real r) { return power_law_B(2, r); },
                                       [](Real r) { return power_law_a(2, r); }, p, GridSpec{span, points});
}

GrowthProfile exp_pole_profile(Real span = 12, int points = 512) {
  GrowthParams p;
  p.r0 = 0.3L;
  return testutil::closed_form_profile([](Real r) { return exp_pole_B(1, 1, r); },
                                       [](Real r) { return exp_pole_a(1, 1, r); }, p, GridSpec{span, points});
}

void check_report_shape(const FailureSetReport& rep) {
  Real width = 0;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    CHECK(rep.cells[i].x_lo < rep.cells[i].x_hi);
    if (i > 0) CHECK(rep.cells[i - 1].x_hi < rep.cells[i].x_lo);
    width += rep.cells[i].x_hi - rep.cells[i].x_lo;
  }
  CHECK(rep.linear_measure >= 0);
  CHECK(std::abs(rep.linear_measure - width) <= 1e-12L);
  CHECK(std::abs(rep.log_measure - rep.linear_measure) <= 1e-9L);
}

}  // namespace

TEST_CASE("failure cells from explicit flags") {
  const auto xs = grid(0, 9, 10);
  std::vector<char> f(10, 0);
  f[3] = f[4] = 1;
  f[9] = 1;
  const auto rep = make_failure_report(ConditionId::L5, xs, f);
  REQUIRE(rep.cells.size() == 2);
  CHECK(rep.cells[0].x_lo == 2);
  CHECK(rep.cells[0].x_hi == 5);
  CHECK(rep.cells[1].x_lo == 8);
  CHECK(rep.cells[1].x_hi == 9);
  CHECK(rep.linear_measure == doctest::Approx(4));
  CHECK(rep.fraction_failing == doctest::Approx(0.3));
  check_report_shape(rep);
  CHECK(log_measure_up_to(rep, 3) == doctest::Approx(1));
  CHECK(log_measure_up_to(rep, 100) == doctest::Approx(4));
}

TEST_CASE("growth lemma: constant A") {
  const auto xs = grid(2, 14, 200);
  const std::vector<Real> A(xs.size(), 5);
  const auto [plus, minus] = growth_lemma_failure_set(xs, A, 0.5L, 0.5L);
  CHECK(plus.linear_measure == 0);
  CHECK(minus.linear_measure == 0);
  CHECK(plus.cells.empty());
}

TEST_CASE("growth lemma: A = e^x and A = x") {
  const auto xs = grid(2, 14, 512);
  for (int which = 0; which < 2; ++which) {
    std::vector<Real> A;
    for (const Real x : xs) A.push_back(which == 0 ? std::exp(x) : x);
    const auto [plus, minus] = growth_lemma_failure_set(xs, A, 0.5L, 0.5L);
    check_report_shape(plus);
    check_report_shape(minus);
    CHECK(plus.linear_measure < 12);
    CHECK(minus.linear_measure < 12);
    // the tail of the grid passes both conditions
    for (std::size_t i = xs.size() / 2; i < xs.size(); ++i) {
      CHECK_FALSE(plus.failing[i]);
      CHECK_FALSE(minus.failing[i]);
    }
  }
}

TEST_CASE("growth lemma rejects decreasing A") {
  const auto xs = grid(2, 4, 5);
  const std::vector<Real> A{5, 6, 5.5L, 7, 8};
  try {
    growth_lemma_failure_set(xs, A, 0.5L, 0.5L);
    FAIL("expected NotMonotone");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotMonotone);
  }
}

TEST_CASE("L7 for the power law follows the closed-form inequality") {
  const auto prof = power_law_profile();
  const auto E = e_set_failure(prof);
  // (1-r) a < B^{1+beta}  <=>  2r < (2x)^{1.25}
  for (std::size_t i = 0; i < prof.samples.size(); ++i) {
    const auto& s = prof.samples[i];
    const bool fails = !(2 * s.r < std::pow(2 * s.x, 1.25L));
    CHECK(static_cast<bool>(E.l7.failing[i]) == fails);
  }
  // failures only at small x
  for (std::size_t i = prof.samples.size() / 4; i < prof.samples.size(); ++i) CHECK_FALSE(E.l7.failing[i]);
  CHECK(E.l7.log_measure < 2);
}

TEST_CASE("L7 never fails for ExpPole k = 1") {
  const auto E = e_set_failure(exp_pole_profile());
  CHECK(E.l7.log_measure == 0);
  CHECK(E.l7.cells.empty());
}

TEST_CASE("exceptional set structure") {
  for (const auto& prof : {power_law_profile(), exp_pole_profile()}) {
    const auto E = e_set_failure(prof);
    for (const auto* rep : {&E.l5, &E.l6, &E.l7, &E.union_set, &E.e_set}) check_report_shape(*rep);
    for (std::size_t i = 0; i < prof.samples.size(); ++i) {
      const bool any = E.l5.failing[i] || E.l6.failing[i] || E.l7.failing[i];
      CHECK(static_cast<bool>(E.union_set.failing[i]) == any);
      CHECK(static_cast<bool>(E.in_e[i]) == (any || i < E.initial_end));
    }
    // the eight samples from r0' on all pass
    REQUIRE(E.initial_end + 8 <= prof.samples.size());
    for (std::size_t i = E.initial_end; i < E.initial_end + 8; ++i) CHECK_FALSE(E.union_set.failing[i]);
    CHECK(E.e_set.log_measure >= E.union_set.log_measure - 1e-12L);

    // conditions (5)/(6) hold at > 90% of the tail
    std::size_t ok = 0, total = 0;
    for (std::size_t i = prof.samples.size() / 2; i < prof.samples.size(); ++i, ++total)
      ok += !E.l5.failing[i] && !E.l6.failing[i];
    CHECK(static_cast<Real>(ok) > 0.9L * static_cast<Real>(total));
  }
}

TEST_CASE("union measure stays bounded as the span doubles") {
  for (int which = 0; which < 2; ++which) {
    const auto shortp = which ? exp_pole_profile(6, 256) : power_law_profile(6, 256);
    const auto longp = which ? exp_pole_profile(12, 512) : power_law_profile(12, 512);
    const Real m6 = e_set_failure(shortp).union_set.log_measure;
    const Real m12 = e_set_failure(longp).union_set.log_measure;
    CHECK(m12 <= m6 + 1.0L);
  }
}

TEST_CASE("E2 integral against its antiderivative") {
  // B from 2 to 20 for the power law gamma = 2: x from 1 to 10
  GrowthParams p;
  p.r0 = -std::expm1(-(1 + 1e-12L));  // B(r0) just above 2
  const auto prof = testutil::closed_form_profile([](Real r) { return power_law_B(2, r); },
                                                  [](Real r) { return power_law_a(2, r); }, p, GridSpec{9, 512});
  REQUIRE(prof.samples.front().B == doctest::Approx(2).epsilon(1e-10));
  REQUIRE(prof.samples.back().B == doctest::Approx(20).epsilon(1e-10));
  const auto e2 = e2_integral_check(prof);
  const Real expected = (std::pow(Real(2), -0.25L) - std::pow(Real(20), -0.25L)) / 0.25L;
  CHECK(expected == doctest::Approx(1.4720).epsilon(1e-4));
  CHECK(e2.closed_form == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  CHECK(std::abs(e2.numeric - e2.closed_form) <= 0.02L * e2.closed_form);

  for (const auto& q : {power_law_profile(), exp_pole_profile()}) {
    const auto v = e2_integral_check(q);
    CHECK(std::abs(v.numeric - v.closed_form) <= 0.02L * v.closed_form);
  }

  auto single = prof;
  single.samples.resize(1);
  const auto z = e2_integral_check(single);
  CHECK(z.numeric == 0);
  CHECK(z.closed_form == 0);
}

TEST_CASE("phi_hat for the power law at r = 0.9") {
  const auto spec = FunctionSpec::power_law(2);
  const TractSpec tract;
  const GrowthParams params;
  const auto s = compute_sample(spec, tract, 0.9L, params, GridSpec{}.span / (GridSpec{}.points - 1));
  const Real ph = phi_hat(spec, tract, s);
  CHECK(ph >= 0);
  CHECK(ph <= 0.01L);
  // same sampled maximum from the closed form
  Real oracle = 0;
  for (int j = 0; j < 33; ++j) {
    const Real t = s.r - s.eps + 2 * s.eps * j / 32;
    oracle = std::max(oracle, power_law_B(2, t) - s.B - s.a * std::log(t / s.r));
  }
  CHECK(std::abs(ph - oracle) <= 1e-9L);
}

TEST_CASE("local bound on a computed ExpPole profile") {
  const auto spec = FunctionSpec::exp_pole(1, 1);
  const TractSpec tract;
  GrowthParams params;
  params.r0 = 0.3L;
  const auto prof = build_profile(spec, tract, params, GridSpec{8, 48});
  const auto E = e_set_failure(prof);
  const auto fit = fit_local_bound(spec, tract, prof, E);
  CHECK(fit.c_fit > 0);
  REQUIRE(fit.phi_hat.size() == prof.samples.size());

  std::vector<Real> tail;
  for (std::size_t i = 0; i < prof.samples.size(); ++i) {
    CHECK(fit.phi_hat[i].has_value() == !E.in_e[i]);
    if (i >= prof.samples.size() / 2 && fit.phi_hat[i]) tail.push_back(*fit.phi_hat[i]);
  }
  // phi_hat decreases along the tail
  REQUIRE(tail.size() >= 8);
  const std::size_t h = tail.size() / 2;
  const Real first = *std::max_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(h));
  const Real second = *std::max_element(tail.begin() + static_cast<std::ptrdiff_t>(h), tail.end());
  CHECK(second <= first);

  std::size_t in_e = prof.samples.size(), off_e = prof.samples.size();
  for (std::size_t i = 0; i < prof.samples.size(); ++i) {
    if (E.in_e[i] && in_e == prof.samples.size()) in_e = i;
    if (!E.in_e[i] && off_e == prof.samples.size()) off_e = i;
  }
  REQUIRE(off_e < prof.samples.size());
  const auto res = b_local_bound_check(spec, tract, prof, E, off_e, fit.c_fit);
  CHECK(res.phi_hat == doctest::Approx(static_cast<double>(*fit.phi_hat[off_e])));
  if (in_e < prof.samples.size()) {
    try {
      b_local_bound_check(spec, tract, prof, E, in_e, fit.c_fit);
      FAIL("expected ExceptionalRadius");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ExceptionalRadius);
    }
  }
}
