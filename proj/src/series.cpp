#include "wvlab/series.hpp"

#include <cmath>
#include <limits>

namespace wvlab {

namespace {

constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

// log(n! / (n-q)!)
Real log_falling(std::size_t n, int q) {
  if (q == 0) return 0;
  return std::lgamma(static_cast<Real>(n) + 1) - std::lgamma(static_cast<Real>(n) - q + 1);
}

}  // namespace

ScaledSum series_derivative(std::span<const Complex> a, Complex z, int q) {
  if (q < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
  const auto uq = static_cast<std::size_t>(q);
  if (uq >= a.size()) return {kNegInf, Complex(0)};

  if (z == Complex(0)) {
    const Complex c = a[uq];
    if (c == Complex(0)) return {kNegInf, Complex(0)};
    const Real ls = std::log(std::abs(c)) + log_falling(uq, q);
    return {ls, c / std::abs(c)};
  }

  const Real log_abs_z = std::log(std::abs(z));
  const Real arg_z = std::arg(z);

  Real scale = kNegInf;
  for (std::size_t n = uq; n < a.size(); ++n) {
    if (a[n] == Complex(0)) continue;
    const Real lm = std::log(std::abs(a[n])) + log_falling(n, q) + static_cast<Real>(n - uq) * log_abs_z;
    if (lm > scale) scale = lm;
  }
  if (scale == kNegInf) return {kNegInf, Complex(0)};

  Complex sum(0);
  for (std::size_t n = uq; n < a.size(); ++n) {
    if (a[n] == Complex(0)) continue;
    const Real lm = std::log(std::abs(a[n])) + log_falling(n, q) + static_cast<Real>(n - uq) * log_abs_z;
    // unit(a_n) * |.| e^{i (n-q) arg z}; keeps real coefficients exactly real on the real axis
    sum += (a[n] / std::abs(a[n])) * std::polar(std::exp(lm - scale), static_cast<Real>(n - uq) * arg_z);
  }
  return {scale, sum};
}

Complex series_log(std::span<const Complex> a, Complex z) {
  const ScaledSum s = series_derivative(a, z, 0);
  if (s.sum == Complex(0) || s.log_scale == kNegInf) return Complex(kNegInf, 0);
  return Complex(s.log_scale, 0) + std::log(s.sum);
}

std::vector<Complex> series_logderiv_tower(std::span<const Complex> a, Complex z, int M) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "tower order M must be >= 1");
  const ScaledSum f = series_derivative(a, z, 0);
  if (f.sum == Complex(0) || f.log_scale == kNegInf)
    throw Error(ErrorCode::PoleOrZeroAt, "power series vanishes at probe point");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int q = 1; q <= M; ++q) {
    const ScaledSum d = series_derivative(a, z, q);
    if (d.sum == Complex(0) || d.log_scale == kNegInf) {
      out.emplace_back(0);
      continue;
    }
    out.push_back(std::exp(d.log_scale - f.log_scale) * (d.sum / f.sum));
  }
  return out;
}

MaxTerm max_term_and_central_index(std::span<const Complex> a, Real r) {
  if (a.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
  if (!(r > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const Real log_r = std::log(r);
  std::vector<Real> terms(a.size(), kNegInf);
  Real best = kNegInf;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a[n] == Complex(0)) continue;
    terms[n] = std::log(std::abs(a[n])) + static_cast<Real>(n) * log_r;
    if (terms[n] > best) best = terms[n];
  }
  if (best == kNegInf) return {kNegInf, 0, 0};
  const Real tie = 1e-12L * std::max<Real>(1, std::abs(best));
  std::size_t N = 0;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (terms[n] >= best - tie) N = n;
  return {best, std::exp(best), N};
}

}  // namespace wvlab
