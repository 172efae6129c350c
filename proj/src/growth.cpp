#include "wvlab/growth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wvlab/parallel.hpp"

namespace wvlab {

namespace {

constexpr Real kInvPhi = 0.618033988749894848204586834365638118L;  // 1/phi

struct Peak {
  Real theta;
  Real value;
};

// Golden-section maximisation of fn on [lo, hi].
template <typename Fn>
Peak golden_maximize(Fn&& fn, Real lo, Real hi, Real tol) {
  Real c = hi - kInvPhi * (hi - lo);
  Real d = lo + kInvPhi * (hi - lo);
  Real fc = fn(c);
  Real fd = fn(d);
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = fn(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = fn(d);
    }
  }
  return fc >= fd ? Peak{c, fc} : Peak{d, fd};
}

Real normalize_angle(Real theta) {
  Real t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0;
  return t;
}

}  // namespace

void validate(const GrowthParams& p) {
  if (!(p.r0 > 0 && p.r0 < 1)) throw Error(ErrorCode::InvalidArgument, "r0 must lie in (0,1)");
  if (!(p.beta > 0 && p.beta <= 0.5L)) throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, 1/2]");
  if (!(p.delta > 0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  if (p.rho0 && !(*p.rho0 > 0)) throw Error(ErrorCode::InvalidArgument, "rho0 must be > 0");
  if (p.M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
}

namespace {

// Dense scan plus golden-section refinement of max raw(theta) over the
// angles where member(theta) holds; raw <= 0 never counts.
template <typename Raw, typename Member>
CircleMax scan_circle(Raw&& raw_at, Member&& member, const ScanOptions& scan) {
  const int n = std::max(scan.samples, 16);
  const Real dtheta = kTwoPi / n;

  std::vector<Real> raw(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Real v = raw_at(dtheta * j);
    raw[static_cast<std::size_t>(j)] = std::isnan(v) ? -std::numeric_limits<Real>::infinity() : v;
  }

  // v = raw on the tract and 0 off it, so walk the samples in decreasing raw
  // order and stop at the first tract member.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw[static_cast<std::size_t>(a)] > raw[static_cast<std::size_t>(b)]; });

  int best = -1;
  for (int j : order) {
    if (!(raw[static_cast<std::size_t>(j)] > 0)) break;
    if (member(dtheta * j)) {
      best = j;
      break;
    }
  }
  if (best < 0) return {0, 0};

  Real B = raw[static_cast<std::size_t>(best)];
  Real theta = dtheta * best;

  // Refine around the best sample and the highest local maxima on the tract.
  std::vector<int> peaks{best};
  for (int j : order) {
    if (static_cast<int>(peaks.size()) >= scan.refine_peaks) break;
    const auto uj = static_cast<std::size_t>(j);
    if (!(raw[uj] > 0)) break;
    if (j == best) continue;
    const Real left = raw[static_cast<std::size_t>((j + n - 1) % n)];
    const Real right = raw[static_cast<std::size_t>((j + 1) % n)];
    if (raw[uj] >= left && raw[uj] >= right && member(dtheta * j)) peaks.push_back(j);
  }

  const Real B_sampled = B;
  for (int j : peaks) {
    const Real center = dtheta * j;
    const Peak p = golden_maximize(raw_at, center - dtheta, center + dtheta, scan.theta_tol);
    const Real margin = 1e-13L * std::max<Real>(1, std::abs(B));
    if (p.value > B + margin && p.value > B_sampled && member(p.theta)) {
      B = p.value;
      theta = normalize_angle(p.theta);
    }
  }
  return {B, theta};
}

}  // namespace

CircleMax max_on_circle(const FunctionSpec& spec, const TractSpec& tract, Real r, const ScanOptions& scan) {
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::InvalidArgument, "circle radius must lie in (0,1)");
  const Real log_R = std::log(tract.R);
  auto raw_at = [&](Real theta) { return log_modulus(spec, std::polar(r, theta)) - log_R; };
  auto member = [&](Real theta) { return in_tract(spec, tract, std::polar(r, theta), scan.membership_probes); };
  return scan_circle(raw_at, member, scan);
}

CircleMax max_modulus_on_circle(std::span<const Complex> coefficients, Real r, const ScanOptions& scan) {
  if (!(r > 0)) throw Error(ErrorCode::InvalidArgument, "circle radius must be positive");
  // Shift so that raw > 0 near the maximum; the shift is removed afterwards.
  const Real shift = max_term_and_central_index(coefficients, r).log_mu - 64;
  auto raw_at = [&](Real theta) { return series_log(coefficients, std::polar(r, theta)).real() - shift; };
  auto member = [](Real) { return true; };
  CircleMax m = scan_circle(raw_at, member, scan);
  m.B += shift;
  return m;
}

SlopeEstimate a_estimate(const FunctionSpec& spec, const TractSpec& tract, Real r, Real B_r, Real h,
                         const ScanOptions& scan) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  const Real r_hi = r * std::exp(h);
  if (!(r_hi < 1)) throw Error(ErrorCode::DomainError, "finite-difference stencil leaves the disc");
  auto B = [&](Real s) { return max_on_circle(spec, tract, s, scan).B; };

  const Real Bp = B(r_hi);
  const Real Bm = B(r * std::exp(-h));
  const Real Bp2 = B(r * std::exp(h / 2));
  const Real Bm2 = B(r * std::exp(-h / 2));

  const Real coarse = (Bp - Bm) / (2 * h);
  const Real fine = (Bp2 - Bm2) / h;
  const Real central = (4 * fine - coarse) / 3;
  const Real right = (Bp2 - B_r) / (h / 2);
  const Real left = (B_r - Bm2) / (h / 2);

  const Real gap = std::abs(right - left);
  const bool suspect = gap > 0.2L * std::max(std::abs(right), std::abs(left)) && gap > 1;
  const Real a = suspect ? std::max(right, left) : central;
  return {std::max<Real>(0, a), left, right, suspect};
}

Real epsilon(Real r, Real a, Real beta, Real delta) {
  if (!(a >= 2)) throw Error(ErrorCode::DomainError, fmt::format("epsilon needs a >= 2 (a = {})", static_cast<double>(a)));
  const Real log_term = std::pow(std::log(a), 1 + delta);
  const Real first = (1 - r) / (2 * std::pow(a, beta) * log_term);
  const Real second = 1 / (std::pow(a, 1 - beta) * log_term);
  return std::min(first, second);
}

GrowthSample compute_sample(const FunctionSpec& spec, const TractSpec& tract, Real r, const GrowthParams& params,
                            Real grid_step_x, const ScanOptions& scan) {
  GrowthSample s;
  s.r = r;
  s.x = -std::log1p(-r);
  const CircleMax cm = max_on_circle(spec, tract, r, scan);
  s.B = cm.B;
  s.theta = cm.theta;

  const Real w = 1 - r;
  Real h_x = grid_step_x / 4;
  SlopeEstimate est = a_estimate(spec, tract, r, s.B, h_x * w / r, scan);
  if (est.a >= 2) {
    const Real eps_x = epsilon(r, est.a, params.beta, params.delta) / w;
    if (eps_x < h_x) {
      h_x = eps_x;
      est = a_estimate(spec, tract, r, s.B, h_x * w / r, scan);
    }
  }
  s.a = est.a;
  s.suspect = est.suspect;
  s.eps = s.a >= 2 ? epsilon(r, s.a, params.beta, params.delta) : std::numeric_limits<Real>::quiet_NaN();
  return s;
}

std::vector<GrowthSample> sample_grid(const FunctionSpec& spec, const TractSpec& tract, const GrowthParams& params,
                                      const GridSpec& grid, const ScanOptions& scan, Execution exec) {
  if (grid.points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  if (!(grid.span > 0)) throw Error(ErrorCode::InvalidArgument, "grid span must be positive");
  const Real x0 = -std::log1p(-params.r0);
  const Real step = grid.span / (grid.points - 1);
  std::vector<GrowthSample> out(static_cast<std::size_t>(grid.points));
  detail::parallel_fill(out, exec, [&](std::size_t i) {
    const Real x = x0 + step * static_cast<Real>(i);
    return compute_sample(spec, tract, -std::expm1(-x), params, step, scan);
  });
  return out;
}

std::size_t validate_base_config(std::span<const GrowthSample> samples) {
  std::size_t i0 = samples.size();
  while (i0 > 0 && samples[i0 - 1].B >= 2 && samples[i0 - 1].a >= 2) --i0;
  if (i0 == samples.size())
    throw Error(ErrorCode::NeverAttained, "B(r) >= 2 and a(r) >= 2 never hold through the end of the grid");
  return i0;
}

GrowthProfile build_profile(const FunctionSpec& spec, const TractSpec& tract, const GrowthParams& params,
                            const GridSpec& grid, const ScanOptions& scan, Execution exec) {
  validate(params);
  validate(spec, tract);
  auto raw = sample_grid(spec, tract, params, grid, scan, exec);
  const std::size_t i0 = validate_base_config(raw);

  GrowthProfile p;
  p.params = params;
  p.grid = grid;
  p.x_start = -std::log1p(-params.r0);
  p.grid_step = grid.span / (grid.points - 1);
  p.first_grid_index = i0;
  p.samples.assign(raw.begin() + static_cast<std::ptrdiff_t>(i0), raw.end());
  p.params.r0 = p.samples.front().r;
  try {
    p.order_estimate = order_estimate(p.samples);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return p;
}

Real least_squares_slope(std::span<const Real> xs, std::span<const Real> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw Error(ErrorCode::InsufficientData, "slope needs two or more points");
  const Real mx = std::accumulate(xs.begin(), xs.end(), Real(0)) / n;
  const Real my = std::accumulate(ys.begin(), ys.end(), Real(0)) / n;
  Real sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

Real trailing_slope(std::span<const Real> xs, std::span<const Real> ys) {
  const std::size_t n = xs.size();
  if (n < 16) throw Error(ErrorCode::InsufficientData, "trailing slope needs at least 16 samples");
  Real best = -std::numeric_limits<Real>::infinity();
  for (std::size_t div : {16u, 8u, 4u}) {
    const std::size_t len = std::min(n, std::max<std::size_t>(16, n / div));
    best = std::max(best, least_squares_slope(xs.subspan(n - len), ys.subspan(n - len)));
  }
  return best;
}

Real order_estimate(std::span<const GrowthSample> samples) {
  std::vector<Real> xs, ys;
  for (const auto& s : samples) {
    if (s.B >= 2) {
      xs.push_back(s.x);
      ys.push_back(std::log(s.B));
    }
  }
  if (xs.size() < 16) throw Error(ErrorCode::InsufficientData, "order estimate needs 16 samples with B >= 2");
  return std::max<Real>(0, trailing_slope(xs, ys));
}

Real interpolate_in_x(std::span<const GrowthSample> s, Real x, Real GrowthSample::*field) {
  if (s.empty()) throw Error(ErrorCode::InsufficientData, "interpolation on an empty profile");
  if (s.size() == 1) return s.front().*field;
  auto it = std::upper_bound(s.begin(), s.end(), x, [](Real v, const GrowthSample& g) { return v < g.x; });
  std::size_t hi = static_cast<std::size_t>(it - s.begin());
  hi = std::clamp<std::size_t>(hi, 1, s.size() - 1);
  const auto& a = s[hi - 1];
  const auto& b = s[hi];
  const Real t = (x - a.x) / (b.x - a.x);
  return a.*field + t * (b.*field - a.*field);
}

Real window_end(Real r_n, Real rho0) { return 1 - std::pow(1 - r_n, 1 + rho0); }

PositiveOrderWindow positive_order_window(const GrowthProfile& profile, Real r_n, Real threshold) {
  const auto& p = profile.params;
  if (!p.rho0) throw Error(ErrorCode::PreconditionFailed, "rho0 is not set");
  const Real rho0 = *p.rho0;
  if (!profile.order_estimate || !(*profile.order_estimate > rho0))
    throw Error(ErrorCode::PreconditionFailed,
                fmt::format("order estimate {} does not exceed rho0 = {}",
                            profile.order_estimate ? static_cast<double>(*profile.order_estimate) : -1.0,
                            static_cast<double>(rho0)));

  std::vector<Real> xs, ys;
  for (const auto& s : profile.samples) {
    xs.push_back(s.x);
    ys.push_back(std::log(s.a));
  }
  const Real required = p.beta < 0.5L ? (1 + rho0) / (1 - 2 * p.beta) : std::numeric_limits<Real>::infinity();
  const Real slope = trailing_slope(xs, ys);
  if (!(slope > required))
    throw Error(ErrorCode::PreconditionFailed,
                fmt::format("growth of log a against x ({}) does not exceed (1+rho0)/(1-2beta) = {}",
                            static_cast<double>(slope), static_cast<double>(required)));

  if (!(r_n >= profile.samples.front().r && r_n <= profile.samples.back().r))
    throw Error(ErrorCode::InvalidArgument, "r_n outside the validated grid");
  const Real a_n = interpolate_in_x(profile.samples, -std::log1p(-r_n), &GrowthSample::a);
  const Real diag = std::pow(1 - r_n, 1 + rho0) * std::pow(a_n, 1 - 2 * p.beta);
  if (!(diag >= threshold))
    throw WindowRejectedError(diag, fmt::format("window diagnostic {} below threshold {}", static_cast<double>(diag),
                                                static_cast<double>(threshold)));
  return {r_n, window_end(r_n, rho0), diag};
}

ProfileInvariants check_invariants(const GrowthProfile& profile, Real tol) {
  ProfileInvariants inv;
  const auto& s = profile.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].B < s[i - 1].B - tol * std::max<Real>(1, s[i - 1].B)) inv.B_non_decreasing = false;
    const bool noisy = s[i].suspect || s[i - 1].suspect;
    if (!noisy && s[i].a < s[i - 1].a * (1 - 1e-3L)) inv.a_non_decreasing = false;
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const Real t0 = std::log(s[i - 1].r), t1 = std::log(s[i].r), t2 = std::log(s[i + 1].r);
    const Real left = (s[i].B - s[i - 1].B) / (t1 - t0);
    const Real right = (s[i + 1].B - s[i].B) / (t2 - t1);
    const Real d2 = (right - left) * (t2 - t0) / 2;
    const Real scaled = d2 / std::max<Real>(1, s[i].B);
    inv.worst_convexity = std::min(inv.worst_convexity, scaled);
    if (scaled < -tol) inv.B_convex_in_log_r = false;
  }
  return inv;
}

}  // namespace wvlab
