#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wvlab/function_model.hpp"

using namespace wvlab;

namespace {

Complex direct_f(const FunctionSpec& spec, Complex z) {
  if (const auto* p = std::get_if<PowerLaw>(&spec.kind)) return std::pow(Complex(1) - z, -p->gamma);
  if (const auto* e = std::get_if<ExpPole>(&spec.kind)) return std::exp(e->c * std::pow(Complex(1) - z, -e->k));
  if (const auto* s = std::get_if<PowerSeries>(&spec.kind)) {
    Complex acc{0, 0};
    for (auto it = s->coefficients.rbegin(); it != s->coefficients.rend(); ++it) acc = acc * z + *it;
    return acc;
  }
  const auto& prod = std::get<Product>(spec.kind);
  Complex acc{1, 0};
  for (const auto& f : prod.factors) acc *= direct_f(f, z);
  return acc;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::PipelineError;
}

}  // namespace

TEST_CASE("eval_log closed-form values") {
  const auto pl = FunctionSpec::power_law(2);
  const auto ep = FunctionSpec::exp_pole(1, 1);
  CHECK(std::abs(eval_log(pl, {0, 0, 1})) == 0);
  const Complex e = eval_log(ep, {0, 0.9L, 16});
  CHECK(e.real() == doctest::Approx(10).epsilon(1e-14));
  CHECK(std::abs(e.imag()) < 1e-15L);
  const Complex p = eval_log(pl, {0, 0.9L, 16});
  CHECK(p.real() == doctest::Approx(-2 * std::log(0.1)).epsilon(1e-14));
  CHECK(p.real() == doctest::Approx(4.605170).epsilon(1e-6));
}

TEST_CASE("exp(eval_log) matches direct evaluation where feasible") {
  const std::vector<FunctionSpec> specs{
      FunctionSpec::power_law(2.5L), FunctionSpec::exp_pole(1, 1), FunctionSpec::exp_pole(0.5L, 2),
      FunctionSpec::power_series({{1, 0}, {0.5L, 0.2L}, {-0.3L, 0}, {0, 0.1L}}),
      FunctionSpec::product({FunctionSpec::power_law(1), FunctionSpec::exp_pole(1, 1)})};
  const std::vector<Complex> targets{{0.3L, 0.4L}, {-0.6L, 0.1L}, {0.8L, -0.5L}, {0.05L, -0.9L}};
  for (const auto& spec : specs) {
    for (const Complex t : targets) {
      const Complex l = eval_log(spec, {Complex{0.1L, 0}, t, 16});
      if (std::abs(l) > 50) continue;
      const Complex f = direct_f(spec, t);
      CHECK(std::abs(std::exp(l) - f) <= 1e-9L * std::abs(f));
    }
  }
}

TEST_CASE("eval_log is stable under doubling the step count") {
  const auto spec = FunctionSpec::exp_pole(1, 2);
  for (const Complex t : {Complex{0.95L, 0.2L}, Complex{-0.7L, -0.6L}, Complex{0.5L, 0.8L}}) {
    const Complex a = eval_log(spec, {0, t, 8});
    const Complex b = eval_log(spec, {0, t, 16});
    CHECK(std::abs(a - b) <= 1e-9L);
  }
}

TEST_CASE("eval_log of a product is the sum of the factors") {
  const auto f1 = FunctionSpec::power_law(1.5L);
  const auto f2 = FunctionSpec::exp_pole(2, 1);
  const auto prod = FunctionSpec::product({f1, f2});
  const LogPath path{{0.2L, 0.1L}, {0.7L, 0.6L}, 16};
  const Complex s = eval_log(f1, path) + eval_log(f2, path);
  CHECK(std::abs(eval_log(prod, path) - s) <= 1e-10L);
}

TEST_CASE("branch tracking follows log f around a zero") {
  // f(z) = z - 0.5: going around z = 0.5 on a square adds 2 pi i.
  const auto spec = FunctionSpec::power_series({{-0.5L, 0}, {1, 0}});
  const Complex a{0.8L, 0}, b{0.8L, 0.3L}, c{0.2L, 0.3L}, d{0.2L, -0.3L}, e{0.8L, -0.3L};
  Complex total = eval_log(spec, {a, b, 4}) - local_log(spec, a);
  total += eval_log(spec, {b, c, 4}) - local_log(spec, b);
  total += eval_log(spec, {c, d, 4}) - local_log(spec, c);
  total += eval_log(spec, {d, e, 4}) - local_log(spec, d);
  total += eval_log(spec, {e, a, 4}) - local_log(spec, e);
  CHECK(std::abs(total - Complex(0, kTwoPi)) < 1e-12L);
}

TEST_CASE("eval_log errors") {
  const auto zero_at_half = FunctionSpec::power_series({{-0.5L, 0}, {1, 0}});
  CHECK(code_of([&] { eval_log(zero_at_half, {0, 0.5L, 8}); }) == ErrorCode::ZeroOrPoleOnPath);
  CHECK(code_of([&] { eval_log(FunctionSpec::power_law(2), {0, 1.0L, 8}); }) == ErrorCode::OutsideDisc);
  CHECK(code_of([&] { eval_log(FunctionSpec::power_law(2), {0, Complex{0.9L, 0.9L}, 8}); }) ==
        ErrorCode::OutsideDisc);
}

TEST_CASE("logderiv_tower closed-form values") {
  const auto L = logderiv_tower(FunctionSpec::power_law(2), 0.5L, 2);
  CHECK(std::abs(L[0] - Real(4)) < 1e-15L);
  CHECK(std::abs(L[1] - Real(24)) < 1e-14L);
  const auto E = logderiv_tower(FunctionSpec::exp_pole(1, 1), 0, 1);
  CHECK(std::abs(E[0] - Real(1)) < 1e-15L);
  // ExpPole(1,1): L_2 = 2/(1-z)^3 + 1/(1-z)^4
  const Real r = 0.99L;
  const auto E2 = logderiv_tower(FunctionSpec::exp_pole(1, 1), r, 2);
  const Real w = 1 - r;
  CHECK(std::abs(E2[1] - (2 / (w * w * w) + 1 / (w * w * w * w))) <= 1e-15L * std::abs(E2[1]));
}

TEST_CASE("L_1 agrees with a central difference of eval_log") {
  const std::vector<FunctionSpec> specs{FunctionSpec::power_law(2), FunctionSpec::exp_pole(1, 1),
                                        FunctionSpec::exp_pole(1, 2),
                                        FunctionSpec::power_series({{1, 0}, {2, 0}, {0.5L, 0.5L}})};
  const Complex z{0.4L, 0.3L};
  const Real h = 1e-5L;
  for (const auto& spec : specs) {
    const Complex fd = (eval_log(spec, {z, z + h, 4}) - eval_log(spec, {z, z - h, 4})) / (2 * h);
    const Complex L1 = logderiv_tower(spec, z, 1)[0];
    CHECK(std::abs(fd - L1) <= 1e-6L * std::abs(L1));
  }
}

TEST_CASE("tower satisfies L_{q+1} = L_q L_1 + L_q'") {
  const auto spec = FunctionSpec::product({FunctionSpec::power_law(1.5L), FunctionSpec::exp_pole(0.7L, 1.5L)});
  const Complex z{0.3L, -0.4L};
  const Real h = 1e-4L;
  const auto L = logderiv_tower(spec, z, 4);
  for (int q = 1; q <= 3; ++q) {
    const auto k = static_cast<std::size_t>(q - 1);
    const Complex d = (logderiv_tower(spec, z + h, q)[k] - logderiv_tower(spec, z - h, q)[k]) / (2 * h);
    CHECK(std::abs(L[k + 1] - (L[k] * L[0] + d)) <= 1e-5L * std::abs(L[k + 1]));
  }
}

TEST_CASE("tower at a zero throws PoleOrZeroAt") {
  const auto spec = FunctionSpec::power_series({{-0.5L, 0}, {1, 0}});
  CHECK(code_of([&] { logderiv_tower(spec, 0.5L, 2); }) == ErrorCode::PoleOrZeroAt);
  CHECK(code_of([&] { logderiv_tower(FunctionSpec::power_law(2), 1.0L, 2); }) == ErrorCode::PoleOrZeroAt);
}

TEST_CASE("v_eval examples") {
  const TractSpec t{1, 0.5L};
  CHECK(v_eval(FunctionSpec::power_law(2), t, 0) == 0);
  CHECK(v_eval(FunctionSpec::power_law(2), t, 0.9L) == doctest::Approx(std::log(100.0)).epsilon(1e-14));
  CHECK(v_eval(FunctionSpec::exp_pole(1, 1), t, -0.5L) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // |f(-0.5)| = 1.5^{-2} < 1 for the power law: outside the tract
  CHECK(v_eval(FunctionSpec::power_law(2), t, -0.5L) == 0);
}

TEST_CASE("v_eval is non-negative and vanishes off the seed component") {
  // f(z) = z^2: |f| > 0.04 off the disc |z| <= 0.2, one component; with seed 0.5 the
  // whole annulus is the tract.
  const auto spec = FunctionSpec::power_series({{0, 0}, {0, 0}, {1, 0}});
  const TractSpec t{0.04L, 0.5L};
  CHECK(v_eval(spec, t, Complex{-0.5L, 0.01L}) == 0);  // segment to the seed crosses |z| < 0.2
  CHECK(v_eval(spec, t, Complex{0.1L, 0}) == 0);
  CHECK(v_eval(spec, t, Complex{0.6L, 0.2L}) > 0);
  for (int j = 0; j < 64; ++j) CHECK(v_eval(spec, t, std::polar(0.9L, kTwoPi * j / 64)) >= 0);
}

TEST_CASE("catalog oracle values") {
  const auto pl = catalog_oracle(FunctionSpec::power_law(2));
  CHECK(pl.B(0.9L) == doctest::Approx(4.605170).epsilon(1e-6));
  CHECK(pl.a(0.9L) == doctest::Approx(18.0).epsilon(1e-14));
  CHECK(pl.order() == 0);
  const auto ep = catalog_oracle(FunctionSpec::exp_pole(1, 1));
  CHECK(ep.B(0.9L) == doctest::Approx(10).epsilon(1e-14));
  CHECK(ep.a(0.9L) == doctest::Approx(90).epsilon(1e-13));
  CHECK(ep.order() == 1);
  CHECK(ep.theta_r(0.9L) == 0);
  CHECK(code_of([] { catalog_oracle(FunctionSpec::power_series({{1, 0}})); }) == ErrorCode::NoOracle);
}

TEST_CASE("spec validation") {
  CHECK(code_of([] { validate(FunctionSpec::power_law(0)); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { validate(FunctionSpec::exp_pole(-1, 1)); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { validate(FunctionSpec::exp_pole(1, 0)); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { validate(FunctionSpec::power_series({})); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { validate(FunctionSpec::product({})); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { validate(FunctionSpec::power_law(2), TractSpec{0, 0.5L}); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { validate(FunctionSpec::power_law(2), TractSpec{1, -0.5L}); }) == ErrorCode::InvalidSpec);
  validate(FunctionSpec::power_law(2), TractSpec{1, 0.5L});
}

TEST_CASE("coefficients load from CSV") {
  const auto path = std::filesystem::temp_directory_path() / "wvlab_coeffs_test.csv";
  {
    std::ofstream out(path);
    out << "n,re,im\n0,1,0\n3,0.5,-0.25\n1,2,0\n";
  }
  const auto c = load_coefficients_csv(path);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == Complex(1, 0));
  CHECK(c[1] == Complex(2, 0));
  CHECK(c[2] == Complex(0, 0));
  CHECK(c[3] == Complex(0.5L, -0.25L));
  std::filesystem::remove(path);
  CHECK(code_of([] { load_coefficients_csv("/nonexistent/coeffs.csv"); }) == ErrorCode::ConfigError);
}
