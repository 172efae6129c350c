#include "wvlab/exceptional.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "wvlab/parallel.hpp"

namespace wvlab {

namespace {

Real r_of_x(Real x) { return -std::expm1(-x); }

Real interpolate(std::span<const Real> xs, std::span<const Real> ys, Real x) {
  if (xs.size() == 1) return ys.front();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - xs.begin()), 1, xs.size() - 1);
  const Real t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
}

}  // namespace

std::string_view to_string(ConditionId id) {
  switch (id) {
    case ConditionId::G10Plus: return "G10+";
    case ConditionId::G10Minus: return "G10-";
    case ConditionId::L5: return "L5";
    case ConditionId::L6: return "L6";
    case ConditionId::L7: return "L7";
    case ConditionId::L14: return "L14";
    case ConditionId::Union: return "L5|L6|L7";
    case ConditionId::E: return "E";
  }
  return "?";
}

FailureSetReport make_failure_report(ConditionId id, std::span<const Real> xs, std::vector<char> failing) {
  if (failing.size() != xs.size()) throw Error(ErrorCode::InvalidArgument, "failure flags do not match the grid");
  FailureSetReport rep;
  rep.id = id;
  const std::size_t n = xs.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!failing[i]) continue;
    ++count;
    const Real lo = xs[i == 0 ? 0 : i - 1];
    const Real hi = xs[i + 1 < n ? i + 1 : i];
    if (!rep.cells.empty() && lo <= rep.cells.back().x_hi) {
      rep.cells.back().x_hi = std::max(rep.cells.back().x_hi, hi);
    } else {
      rep.cells.push_back({lo, hi, 0, 0});
    }
  }
  for (auto& c : rep.cells) {
    c.r_lo = r_of_x(c.x_lo);
    c.r_hi = r_of_x(c.x_hi);
    rep.linear_measure += c.x_hi - c.x_lo;
    // integral of dt/(1-t) over [r_lo, r_hi]
    rep.log_measure += std::log1p(-c.r_lo) - std::log1p(-c.r_hi);
  }
  rep.fraction_failing = n ? static_cast<Real>(count) / static_cast<Real>(n) : 0;
  rep.failing = std::move(failing);
  return rep;
}

Real log_measure_up_to(const FailureSetReport& report, Real x_max) {
  const Real r_max = r_of_x(x_max);
  Real m = 0;
  for (const auto& c : report.cells) {
    if (c.r_lo >= r_max) break;
    m += std::log1p(-c.r_lo) - std::log1p(-std::min(c.r_hi, r_max));
  }
  return m;
}

std::pair<FailureSetReport, FailureSetReport> growth_lemma_failure_set(std::span<const Real> xs,
                                                                       std::span<const Real> A, Real beta,
                                                                       Real delta) {
  if (xs.size() != A.size() || xs.empty()) throw Error(ErrorCode::InvalidArgument, "A must be sampled on the grid");
  if (!(beta > 0 && beta <= 0.5L) || !(delta > 0))
    throw Error(ErrorCode::InvalidArgument, "need 0 < beta <= 1/2 and delta > 0");
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!(A[i] > 1)) throw Error(ErrorCode::InvalidArgument, "growth lemma needs A(x) > 1");
    if (i > 0 && A[i] < A[i - 1] * (1 - 1e-9L))
      throw Error(ErrorCode::NotMonotone, fmt::format("A decreases at x = {}", static_cast<double>(xs[i])));
  }
  std::vector<char> plus(xs.size()), minus(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Real a = A[i];
    const Real shift = 1 / (std::pow(a, beta) * std::pow(std::log(a), 1 + delta));
    const Real bump = std::pow(a, 1 - beta);
    plus[i] = !(interpolate(xs, A, xs[i] + shift) < a + bump);
    minus[i] = !(interpolate(xs, A, xs[i] - shift) > a - bump);
  }
  return {make_failure_report(ConditionId::G10Plus, xs, std::move(plus)),
          make_failure_report(ConditionId::G10Minus, xs, std::move(minus))};
}

ExceptionalSet e_set_failure(const GrowthProfile& profile) {
  const auto& s = profile.samples;
  const std::size_t n = s.size();
  if (n == 0) throw Error(ErrorCode::InsufficientData, "empty profile");
  const Real beta = profile.params.beta;

  std::vector<Real> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = s[i].x;

  std::vector<char> f5(n), f6(n), f7(n);
  std::size_t coarse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real r = s[i].r, a = s[i].a, eps = s[i].eps;
    const Real bump = std::pow(a, 1 - beta);
    const Real a_plus = interpolate_in_x(s, -std::log1p(-(r + eps)), &GrowthSample::a);
    const Real a_minus = interpolate_in_x(s, -std::log1p(-(r - eps)), &GrowthSample::a);
    f5[i] = !(a_plus < a + bump);
    f6[i] = !(a_minus > a - bump);
    f7[i] = !((1 - r) * a < std::pow(s[i].B, 1 + beta));
    const Real cell = i + 1 < n ? s[i + 1].r - r : (i > 0 ? r - s[i - 1].r : eps);
    if (eps < cell) ++coarse;
  }

  ExceptionalSet E;
  E.coarse_fraction = static_cast<Real>(coarse) / static_cast<Real>(n);
  E.grid_too_coarse = E.coarse_fraction > 0.5L;

  std::vector<char> any(n);
  for (std::size_t i = 0; i < n; ++i) any[i] = f5[i] || f6[i] || f7[i];

  E.initial_end = n;
  constexpr std::size_t kRun = 8;
  for (std::size_t k = 0; k + kRun <= n; ++k) {
    if (std::none_of(any.begin() + static_cast<std::ptrdiff_t>(k), any.begin() + static_cast<std::ptrdiff_t>(k + kRun),
                     [](char c) { return c != 0; })) {
      E.initial_end = k;
      break;
    }
  }

  E.in_e.resize(n);
  for (std::size_t i = 0; i < n; ++i) E.in_e[i] = i < E.initial_end || any[i];

  E.l5 = make_failure_report(ConditionId::L5, xs, std::move(f5));
  E.l6 = make_failure_report(ConditionId::L6, xs, std::move(f6));
  E.l7 = make_failure_report(ConditionId::L7, xs, std::move(f7));
  E.union_set = make_failure_report(ConditionId::Union, xs, std::move(any));
  E.e_set = make_failure_report(ConditionId::E, xs, E.in_e);
  return E;
}

E2Integral e2_integral_check(const GrowthProfile& profile) {
  const auto& s = profile.samples;
  if (s.size() < 2) return {0, 0};
  const Real beta = profile.params.beta;
  auto integrand = [&](const GrowthSample& g) { return g.a / std::pow(g.B, 1 + beta) * (1 - g.r) / g.r; };
  Real sum = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    sum += (integrand(s[i]) + integrand(s[i + 1])) / 2 * (s[i + 1].x - s[i].x);
  const Real closed = (std::pow(s.front().B, -beta) - std::pow(s.back().B, -beta)) / beta;
  return {sum, closed};
}

Real phi_hat(const FunctionSpec& spec, const TractSpec& tract, const GrowthSample& sample, const ScanOptions& scan,
             int points) {
  if (!(sample.eps > 0)) throw Error(ErrorCode::DomainError, "phi_hat needs eps(r) > 0");
  if (points < 3) throw Error(ErrorCode::InvalidArgument, "phi_hat needs at least 3 points");
  const int mid = (points - 1) / 2;
  Real best = 0;
  for (int j = 0; j < points; ++j) {
    if (j == mid && (points % 2) == 1) continue;  // s = r: excess is 0
    const Real s = sample.r - sample.eps + 2 * sample.eps * static_cast<Real>(j) / (points - 1);
    const Real excess = max_on_circle(spec, tract, s, scan).B - sample.B - sample.a * std::log(s / sample.r);
    best = std::max(best, excess);
  }
  return best;
}

LocalBoundFit fit_local_bound(const FunctionSpec& spec, const TractSpec& tract, const GrowthProfile& profile,
                              const ExceptionalSet& E, const ScanOptions& scan, Execution exec) {
  const auto& s = profile.samples;
  const Real beta = profile.params.beta;
  LocalBoundFit fit;
  fit.phi_hat.resize(s.size());
  detail::parallel_fill(fit.phi_hat, exec, [&](std::size_t i) -> std::optional<Real> {
    if (E.in_e[i]) return std::nullopt;
    return phi_hat(spec, tract, s[i], scan);
  });

  fit.bound_ratio.resize(s.size());
  std::vector<Real> ratios;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!fit.phi_hat[i]) continue;
    const Real scale = std::pow(s[i].a, 1 - beta) * s[i].eps;
    fit.bound_ratio[i] = *fit.phi_hat[i] / scale;
    ratios.push_back(*fit.bound_ratio[i]);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95L * static_cast<Real>(ratios.size())));
    fit.c_fit = ratios[std::clamp<std::size_t>(rank, 1, ratios.size()) - 1];
  }

  std::vector<Real> xs(s.size());
  std::vector<char> over(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    xs[i] = s[i].x;
    over[i] = fit.bound_ratio[i] && *fit.bound_ratio[i] > 2 * fit.c_fit;
  }
  fit.l14 = make_failure_report(ConditionId::L14, xs, std::move(over));
  return fit;
}

LocalBoundResult b_local_bound_check(const FunctionSpec& spec, const TractSpec& tract, const GrowthProfile& profile,
                                     const ExceptionalSet& E, std::size_t index, Real c_fit,
                                     const ScanOptions& scan) {
  if (index >= profile.samples.size()) throw Error(ErrorCode::InvalidArgument, "sample index out of range");
  if (E.in_e[index]) throw Error(ErrorCode::ExceptionalRadius, "radius lies in the exceptional set");
  const auto& g = profile.samples[index];
  const Real phi = phi_hat(spec, tract, g, scan);
  const Real bound = 2 * c_fit * std::pow(g.a, 1 - profile.params.beta) * g.eps;
  return {phi, bound, phi <= bound};
}

}  // namespace wvlab
