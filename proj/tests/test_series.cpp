#include <doctest.h>

#include <cmath>
#include <vector>

#include "wvlab/series.hpp"

using namespace wvlab;

namespace {

std::vector<Complex> exp_series(int degree) {
  std::vector<Complex> c;
  Real term = 1;
  for (int n = 0; n <= degree; ++n) {
    if (n > 0) term /= n;
    c.emplace_back(term, 0);
  }
  return c;
}

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc{0, 0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

TEST_CASE("series value and derivatives match Horner evaluation") {
  const std::vector<Complex> c{{1, 0}, {-2, 0.5L}, {0.25L, 0}, {0, 3}};
  const Complex z{0.3L, -0.7L};
  const auto v = series_derivative(c, z, 0);
  const Complex direct = horner(c, z);
  CHECK(std::abs(std::exp(v.log_scale) * v.sum - direct) <= 1e-15L * std::abs(direct));

  // f' = c1 + 2 c2 z + 3 c3 z^2
  const Complex d1 = c[1] + Real(2) * c[2] * z + Real(3) * c[3] * z * z;
  const auto v1 = series_derivative(c, z, 1);
  CHECK(std::abs(std::exp(v1.log_scale) * v1.sum - d1) <= 1e-15L * std::abs(d1));

  const auto v4 = series_derivative(c, z, 4);
  CHECK(std::abs(std::exp(v4.log_scale) * v4.sum) == 0);
}

TEST_CASE("series_log of a large exponential stays finite") {
  const auto c = exp_series(400);
  const Complex z{150, 0};
  const Complex l = series_log(c, z);
  CHECK(std::isfinite(l.real()));
  CHECK(l.real() == doctest::Approx(150).epsilon(1e-12));
  CHECK(std::abs(l.imag()) < 1e-15L);
}

TEST_CASE("log-derivative tower of e^z is identically 1") {
  const auto c = exp_series(80);
  const auto L = series_logderiv_tower(c, Complex{2, 1}, 4);
  REQUIRE(L.size() == 4);
  for (const auto& v : L) CHECK(std::abs(v - Real(1)) < 1e-12L);
}

TEST_CASE("tower at a zero of the polynomial throws") {
  const std::vector<Complex> c{{-1, 0}, {0, 0}, {1, 0}};  // z^2 - 1
  try {
    series_logderiv_tower(c, Complex{1, 0}, 2);
    FAIL("expected PoleOrZeroAt");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleOrZeroAt);
  }
}

TEST_CASE("maximum term and central index") {
  SUBCASE("e^z degree 40, r = 10: indices 9 and 10 tie, largest wins") {
    const auto c = exp_series(40);
    const auto mt = max_term_and_central_index(c, 10);
    CHECK(mt.N == 10);
    // brute force
    Real best = 0;
    std::size_t arg = 0;
    Real term = 1;
    for (std::size_t n = 0; n <= 40; ++n) {
      if (n > 0) term *= Real(10) / n;
      if (term >= best * (1 - 1e-12L)) {
        if (term > best) best = term;
        arg = n;
      }
    }
    CHECK(mt.N == arg);
    CHECK(mt.mu == doctest::Approx(static_cast<double>(best)).epsilon(1e-12));
  }
  SUBCASE("constant series") {
    const std::vector<Complex> c{{1, 0}};
    const auto mt = max_term_and_central_index(c, 3.7L);
    CHECK(mt.mu == 1);
    CHECK(mt.N == 0);
  }
  SUBCASE("geometric series at r = 0.9") {
    const std::vector<Complex> c(50, Complex{1, 0});
    const auto mt = max_term_and_central_index(c, 0.9L);
    CHECK(mt.mu == 1);
    CHECK(mt.N == 0);
  }
  SUBCASE("central index is non-decreasing in r") {
    const auto c = exp_series(60);
    std::size_t prev = 0;
    for (Real r = 0.5L; r < 25; r += 0.37L) {
      const auto mt = max_term_and_central_index(c, r);
      CHECK(mt.N >= prev);
      prev = mt.N;
    }
  }
}

TEST_CASE("maximum term is bounded by the maximum modulus") {
  const auto c = exp_series(60);
  for (Real r : {1.0L, 5.0L, 12.0L}) {
    const auto mt = max_term_and_central_index(c, r);
    // |e^z| is maximal at z = r on the circle
    CHECK(mt.log_mu <= r + 1e-12L);
  }
}
