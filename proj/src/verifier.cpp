#include "wvlab/verifier.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wvlab/parallel.hpp"

namespace wvlab {

namespace {

// e^g - 1 without cancellation for small g.
Complex expm1c(Complex g) {
  const Real x = g.real(), y = g.imag();
  const Real s = std::sin(y / 2);
  return {std::expm1(x) * std::cos(y) - 2 * s * s, std::exp(x) * std::sin(y)};
}

VerificationReport base_report(std::string check, Real r, int q, Real radius, int probes) {
  VerificationReport rep;
  rep.check = std::move(check);
  rep.r = r;
  rep.q = q;
  rep.disc_radius = radius;
  rep.probes = probes;
  return rep;
}

VerifierOptions with_profile(VerifierOptions opts, const GrowthProfile& profile) {
  opts.beta = profile.params.beta;
  opts.delta = profile.params.delta;
  return opts;
}

// Tail indices outside E.
std::vector<std::size_t> tail_indices(const GrowthProfile& profile, const ExceptionalSet& E, Real fraction) {
  std::vector<std::size_t> out;
  const std::size_t n = profile.samples.size();
  for (std::size_t i = tail_start(n, fraction); i < n; ++i)
    if (!E.in_e[i]) out.push_back(i);
  return out;
}

std::vector<std::optional<Real>> tail_series(const GrowthProfile& profile, Real fraction,
                                             const std::vector<std::size_t>& idx,
                                             const std::vector<Real>& values) {
  const std::size_t n = profile.samples.size();
  const std::size_t t0 = tail_start(n, fraction);
  std::vector<std::optional<Real>> out(n - t0);
  for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k] - t0] = values[k];
  return out;
}

std::string describe_trend(const QuartileTrend& t) {
  std::string s = "quartile maxima";
  for (const auto& m : t.maxima) s += m ? fmt::format(" {:.3g}", static_cast<double>(*m)) : " -";
  return s;
}

// Pass-rate verdict over per-radius reports of one check (and optionally one q).
VerificationReport rate_verdict(const std::string& name, const std::vector<VerificationReport>& recs, Real min_rate,
                                const std::optional<QuartileTrend>& trend) {
  VerificationReport v;
  v.check = name;
  std::size_t passed = 0;
  for (const auto& r : recs) {
    passed += r.pass ? 1 : 0;
    v.probes += r.probes;
    if (r.max_rel_err >= v.max_rel_err) {
      v.max_rel_err = r.max_rel_err;
      v.worst_probe = r.worst_probe;
    }
    v.r = r.r;
  }
  v.tolerance = min_rate;
  if (recs.empty()) {
    v.pass = false;
    v.note = "no radii to check";
    return v;
  }
  v.secondary = static_cast<Real>(passed) / static_cast<Real>(recs.size());
  v.pass = v.secondary >= min_rate;
  v.note = fmt::format("pass rate {}/{}", passed, recs.size());
  if (trend) {
    v.pass = v.pass && trend->non_increasing;
    v.note += fmt::format("; {}{}", describe_trend(*trend), trend->non_increasing ? "" : " (increasing)");
  }
  return v;
}

}  // namespace

std::vector<Complex> disc_probes(Complex center, Real radius, ProbeLayout layout) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(layout.count()));
  if (layout.center) out.push_back(center);
  for (int j = 1; j <= layout.rings; ++j) {
    const Real rho = radius * j / layout.rings;
    for (int m = 0; m < layout.rays; ++m) out.push_back(center + std::polar(rho, kTwoPi * m / layout.rays));
  }
  return out;
}

VerificationReport tract_disc_check(const FunctionSpec& spec, const TractSpec& tract, Real r, Complex z_r,
                                    Real sigma, ProbeLayout layout) {
  const Real radius = 4 * sigma;
  auto rep = base_report("thm1.tract_disc", r, 0, radius, layout.count());
  const Real log_R = std::log(tract.R);
  rep.pass = true;
  for (const Complex z : disc_probes(z_r, radius, layout)) {
    const Real lm = std::abs(z) < 1 ? log_modulus(spec, z) : std::numeric_limits<Real>::quiet_NaN();
    const bool ok = std::isfinite(lm) && lm > log_R;
    const Real ratio = ok ? std::exp(log_R - lm) : std::numeric_limits<Real>::infinity();
    if (!ok) rep.pass = false;
    if (ratio >= rep.max_rel_err) {
      rep.max_rel_err = ratio;
      rep.worst_probe = z;
    }
  }
  rep.tolerance = 1;
  rep.note = "max R/|f| on D(z_r, 4 sigma)";
  return rep;
}

Complex g_eval(const FunctionSpec& spec, Complex z_r, Real a_r, Complex z, int path_steps) {
  return log_ratio(spec, z_r, z, path_steps) - a_r * std::log(z / z_r);
}

VerificationReport monomial_check(const FunctionSpec& spec, Real r, Complex z_r, Real a_r, Real sigma, Real phi_hat,
                                  const VerifierOptions& opts, ProbeLayout layout) {
  auto rep = base_report("thm1.monomial", r, 0, sigma, layout.count());
  for (const Complex z : disc_probes(z_r, sigma, layout)) {
    const Complex g = g_eval(spec, z_r, a_r, z, opts.path_steps);
    const Real err = std::abs(g);
    if (err >= rep.max_rel_err) {
      rep.max_rel_err = err;
      rep.worst_probe = z;
    }
    rep.secondary = std::max(rep.secondary, std::abs(expm1c(g)));
  }
  rep.tolerance = std::max(opts.tol_floor, 2 * phi_hat);
  rep.pass = rep.max_rel_err <= rep.tolerance;
  rep.note = "sup|g|; secondary sup|e^g - 1|";
  return rep;
}

Real logderiv_tolerance(Real a_r, const VerifierOptions& opts) {
  if (!(a_r > 1)) throw Error(ErrorCode::DomainError, "tolerance needs a(r) > 1");
  const Real scale = std::pow(a_r, opts.beta) * std::pow(std::log(a_r), 1 + opts.delta);
  return std::max(opts.tol_floor, 5 * opts.C_g / scale);
}

VerificationReport logderiv_check(const FunctionSpec& spec, Real r, Complex z_r, Real a_r, Real sigma, Real T,
                                  const VerifierOptions& opts, ProbeLayout layout) {
  if (!(T > 0 && T < 2)) throw Error(ErrorCode::InvalidArgument, "disc factor T must lie in (0, 2)");
  auto rep = base_report("thm1.logderiv", r, 1, T * sigma, layout.count());
  for (const Complex z : disc_probes(z_r, T * sigma, layout)) {
    const Complex L1 = log_derivatives(spec, z, 1)[0];
    const Real err = std::abs(L1 * z / a_r - Real(1));
    if (err >= rep.max_rel_err) {
      rep.max_rel_err = err;
      rep.worst_probe = z;
    }
  }
  rep.tolerance = logderiv_tolerance(a_r, opts);
  rep.pass = rep.max_rel_err <= rep.tolerance;
  return rep;
}

std::vector<VerificationReport> higher_logderiv_check(const FunctionSpec& spec, const PositiveOrderWindow& window,
                                                      const GrowthSample& sample, bool in_e, int M,
                                                      const VerifierOptions& opts, ProbeLayout layout) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  if (sample.r < window.r_n || sample.r > window.r_n_prime)
    throw Error(ErrorCode::WindowRejected,
                fmt::format("r = {} lies outside the window [{}, {}]", static_cast<double>(sample.r),
                            static_cast<double>(window.r_n), static_cast<double>(window.r_n_prime)));
  if (in_e) throw Error(ErrorCode::ExceptionalRadius, "radius lies in the exceptional set");

  const Real sigma = sample.sigma();
  const Real tol1 = logderiv_tolerance(sample.a, opts);
  const Real a_eps = sample.a * sample.eps;
  std::vector<VerificationReport> reps;
  for (int q = 1; q <= M; ++q) reps.push_back(base_report("thm2.higher_logderiv", sample.r, q, sigma, layout.count()));
  for (const Complex z : disc_probes(sample.z_r(), sigma, layout)) {
    const auto L = logderiv_tower(spec, z, M);
    const Complex w = z / sample.a;
    Complex wq{1, 0};
    for (int q = 1; q <= M; ++q) {
      wq *= w;
      const Real err = std::abs(L[static_cast<std::size_t>(q - 1)] * wq - Real(1));
      auto& rep = reps[static_cast<std::size_t>(q - 1)];
      if (err >= rep.max_rel_err) {
        rep.max_rel_err = err;
        rep.worst_probe = z;
      }
    }
  }
  for (auto& rep : reps) {
    rep.tolerance = rep.q * tol1;
    rep.a_eps = a_eps;
    rep.pass = rep.max_rel_err <= rep.tolerance;
    if (a_eps < opts.a_eps_min) rep.note = fmt::format("a*eps = {:.3g} below {}", static_cast<double>(a_eps),
                                                       static_cast<double>(opts.a_eps_min));
  }
  return reps;
}

std::vector<Real> zero_order_bound_ratios(const FunctionSpec& spec, const GrowthSample& sample, int M,
                                          const VerifierOptions& opts, ProbeLayout layout) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  std::vector<Real> out(static_cast<std::size_t>(M), 0);
  const Real growth = 1 + opts.beta + opts.zero_order_o1;
  for (int q = 1; q <= M; ++q) {
    const Real radius = (2 - static_cast<Real>(q) / M) * sample.sigma();
    const Real log_bound = std::log(sample.a) + (q - 1) * growth * sample.x;
    Real best = 0;
    for (const Complex z : disc_probes(sample.z_r(), radius, layout)) {
      const Complex Lq = logderiv_tower(spec, z, q)[static_cast<std::size_t>(q - 1)];
      best = std::max(best, std::exp(std::log(std::abs(Lq)) - log_bound));
    }
    out[static_cast<std::size_t>(q - 1)] = best;
  }
  return out;
}

namespace {

void require_zero_order(const GrowthProfile& profile, const VerifierOptions& opts) {
  if (!profile.order_estimate || *profile.order_estimate >= opts.zero_order_max)
    throw Error(ErrorCode::NotZeroOrder,
                profile.order_estimate
                    ? fmt::format("order estimate {:.3g} is not below {}", static_cast<double>(*profile.order_estimate),
                                  static_cast<double>(opts.zero_order_max))
                    : std::string("no order estimate"));
}

std::vector<VerificationReport> zero_order_records(const GrowthSample& g, const std::vector<Real>& ratios,
                                                   const ZeroOrderFit& fit, const VerifierOptions& opts,
                                                   std::size_t index) {
  std::vector<VerificationReport> out;
  auto growth = base_report("zero_order.growth", g.r, 0, 0, 0);
  growth.index = index;
  growth.max_rel_err = std::log(g.a) / g.x;
  growth.tolerance = 1 + opts.zero_order_slack / g.x;
  growth.pass = growth.max_rel_err <= growth.tolerance;
  growth.a_eps = g.a * g.eps;
  growth.note = "log a / log(1/(1-r))";
  out.push_back(growth);
  const int M = static_cast<int>(ratios.size());
  for (int q = 1; q <= M; ++q) {
    const auto k = static_cast<std::size_t>(q - 1);
    auto rep = base_report("zero_order.tower", g.r, q, (2 - static_cast<Real>(q) / M) * g.sigma(),
                           kProbes128.count());
    rep.index = index;
    rep.max_rel_err = ratios[k];
    rep.tolerance = k < fit.c_fit.size() ? fit.c_fit[k] : 0;
    rep.pass = rep.max_rel_err <= rep.tolerance * (1 + 1e-9L);
    rep.note = "|L_q| / (a (1/(1-r))^{(q-1)(1+beta+o1)}) against the fitted constant";
    out.push_back(rep);
  }
  return out;
}

}  // namespace

std::vector<VerificationReport> zero_order_checks(const FunctionSpec& spec, const GrowthProfile& profile,
                                                  const ExceptionalSet& E, std::size_t index, int M,
                                                  const ZeroOrderFit& fit, const VerifierOptions& opts) {
  const auto o = with_profile(opts, profile);
  require_zero_order(profile, o);
  if (index >= profile.samples.size()) throw Error(ErrorCode::InvalidArgument, "sample index out of range");
  if (E.in_e[index]) throw Error(ErrorCode::ExceptionalRadius, "radius lies in the exceptional set");
  const auto& g = profile.samples[index];
  return zero_order_records(g, zero_order_bound_ratios(spec, g, M, o), fit, o, index);
}

VerificationReport b1_control(const FunctionSpec& spec, const GrowthSample& sample, const VerifierOptions& opts) {
  const Real sigma = sample.sigma();
  auto rep = base_report("b1_control", sample.r, 2, sigma, kProbes128.count());
  auto deviation = [&](Complex z) {
    const Complex L2 = logderiv_tower(spec, z, 2)[1];
    const Complex w = z / sample.a;
    return std::abs(L2 * w * w - Real(1));
  };
  rep.worst_probe = sample.z_r();
  rep.max_rel_err = deviation(sample.z_r());
  rep.secondary = rep.max_rel_err;
  for (const Complex z : disc_probes(sample.z_r(), sigma, kProbes128)) rep.secondary = std::min(rep.secondary, deviation(z));
  rep.tolerance = opts.negative_control_floor;
  rep.pass = rep.max_rel_err >= rep.tolerance;
  rep.a_eps = sample.a * sample.eps;
  rep.note = "|L_2 z_r^2/a^2 - 1| must stay large; secondary is its min over D(z_r, sigma)";
  return rep;
}

std::vector<VerificationReport> classical_asym_check(std::span<const Complex> coefficients, Real r, int M,
                                                     const VerifierOptions& opts) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  if (!(r > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const MaxTerm mt = max_term_and_central_index(coefficients, r);
  if (mt.N == 0) throw Error(ErrorCode::PreconditionFailed, "central index is 0");
  if (2 * mt.N > coefficients.size())
    throw Error(ErrorCode::TruncationDominates,
                fmt::format("central index {} exceeds half of the {} retained coefficients at r = {}", mt.N,
                            coefficients.size(), static_cast<double>(r)));

  const auto N = static_cast<Real>(mt.N);
  const Complex z_r = std::polar(r, max_modulus_on_circle(coefficients, r).theta);
  const Complex log_fr = series_log(coefficients, z_r);
  const Real rho = std::pow(N, -opts.classical_gamma) * (1 - 1e-9L);
  const ProbeLayout layout{2, 32, false};

  std::vector<VerificationReport> reps;
  reps.push_back(base_report("classical.asym", r, 0, rho, layout.count()));
  for (int q = 1; q <= M; ++q) reps.push_back(base_report("classical.asym1", r, q, rho, layout.count()));

  for (const Complex tau : disc_probes(Complex{0, 0}, rho, layout)) {
    const Complex z = z_r * std::exp(tau);
    const Real asym = std::abs(expm1c(series_log(coefficients, z) - log_fr - N * tau));
    if (asym >= reps[0].max_rel_err) {
      reps[0].max_rel_err = asym;
      reps[0].worst_probe = z;
    }
    const auto L = series_logderiv_tower(coefficients, z, M);
    const Complex w = z / N;
    Complex wq{1, 0};
    for (int q = 1; q <= M; ++q) {
      wq *= w;
      const Real err = std::abs(L[static_cast<std::size_t>(q - 1)] * wq - Real(1));
      auto& rep = reps[static_cast<std::size_t>(q)];
      if (err >= rep.max_rel_err) {
        rep.max_rel_err = err;
        rep.worst_probe = z;
      }
    }
  }
  for (auto& rep : reps) {
    rep.tolerance = opts.classical_tol;
    rep.pass = rep.max_rel_err <= rep.tolerance;
    rep.secondary = N;
    rep.note = fmt::format("central index N = {}; probes |log(z/z_r)| < N^-{}", mt.N,
                           static_cast<double>(opts.classical_gamma));
  }
  return reps;
}

std::vector<VerificationReport> recurrence_check(const FunctionSpec& spec, int q_max, const VerifierOptions& opts) {
  if (q_max < 1) throw Error(ErrorCode::InvalidArgument, "q_max must be >= 1");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VerificationReport> reps;
  for (int q = 1; q <= q_max; ++q) {
    auto rep = base_report("recurrence", 0, q, opts.recurrence_radius, opts.recurrence_probes);
    rep.tolerance = opts.recurrence_tol;
    reps.push_back(rep);
  }
  for (int p = 0; p < opts.recurrence_probes; ++p) {
    const Real u = unit(rng);
    const Real phi = kTwoPi * static_cast<Real>(unit(rng));
    const Complex z = std::polar(opts.recurrence_radius * std::sqrt(u), phi);
    const Real h = 1e-2L * (1 - std::abs(z));
    const auto L = logderiv_tower(spec, z, q_max + 1);
    const auto Lp = logderiv_tower(spec, z + h, q_max);
    const auto Lm = logderiv_tower(spec, z - h, q_max);
    const auto Lp2 = logderiv_tower(spec, z + h / 2, q_max);
    const auto Lm2 = logderiv_tower(spec, z - h / 2, q_max);
    for (int q = 1; q <= q_max; ++q) {
      const auto k = static_cast<std::size_t>(q - 1);
      const Complex coarse = (Lp[k] - Lm[k]) / (2 * h);
      const Complex fine = (Lp2[k] - Lm2[k]) / h;
      const Complex dLq = (Real(4) * fine - coarse) / Real(3);
      const Complex next = L[k + 1];
      const Real err = std::abs(next - (L[k] * L[0] + dLq)) / std::abs(next);
      auto& rep = reps[k];
      if (!(err < rep.max_rel_err) ) {
        rep.max_rel_err = std::isnan(err) ? std::numeric_limits<Real>::infinity() : err;
        rep.worst_probe = z;
        rep.r = std::abs(z);
      }
    }
  }
  for (auto& rep : reps) {
    rep.pass = rep.max_rel_err <= rep.tolerance;
    rep.note = "relative residual of L_{q+1} = L_q L_1 + L_q'";
  }
  return reps;
}

std::size_t tail_start(std::size_t n, Real tail_fraction) {
  return std::min(n, static_cast<std::size_t>(std::floor(static_cast<Real>(n) * tail_fraction)));
}

QuartileTrend quartile_trend(std::span<const std::optional<Real>> values, Real floor) {
  QuartileTrend t;
  const std::size_t m = values.size();
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = k * m / 4; i < (k + 1) * m / 4; ++i) {
      if (!values[i]) continue;
      t.maxima[k] = t.maxima[k] ? std::max(*t.maxima[k], *values[i]) : *values[i];
    }
  }
  std::optional<Real> prev;
  for (const auto& mx : t.maxima) {
    if (!mx) continue;
    if (prev && *mx > *prev * (1 + 1e-9L) + floor) t.non_increasing = false;
    prev = mx;
  }
  return t;
}

SweepResult theorem1_sweep(const FunctionSpec& spec, const TractSpec& tract, const GrowthProfile& profile,
                           const ExceptionalSet& E, const LocalBoundFit* local_bound, const VerifierOptions& opts,
                           Execution exec) {
  const auto o = with_profile(opts, profile);
  const auto idx = tail_indices(profile, E, o.tail_fraction);
  std::vector<std::array<VerificationReport, 3>> per(idx.size());
  detail::parallel_fill(per, exec, [&](std::size_t k) {
    const std::size_t i = idx[k];
    const auto& g = profile.samples[i];
    Real phi = 0;
    if (local_bound && i < local_bound->phi_hat.size() && local_bound->phi_hat[i]) phi = *local_bound->phi_hat[i];
    std::array<VerificationReport, 3> out{tract_disc_check(spec, tract, g.r, g.z_r(), g.sigma()),
                                          monomial_check(spec, g.r, g.z_r(), g.a, g.sigma(), phi, o),
                                          logderiv_check(spec, g.r, g.z_r(), g.a, g.sigma(), 1, o)};
    for (auto& rep : out) {
      rep.index = i;
      rep.a_eps = g.a * g.eps;
    }
    return out;
  });

  SweepResult res;
  std::vector<VerificationReport> disc, mono, ld;
  std::vector<Real> mono_err, ld_err;
  for (const auto& trio : per) {
    disc.push_back(trio[0]);
    mono.push_back(trio[1]);
    ld.push_back(trio[2]);
    mono_err.push_back(trio[1].max_rel_err);
    ld_err.push_back(trio[2].max_rel_err);
    res.records.insert(res.records.end(), trio.begin(), trio.end());
  }
  const auto mono_series = tail_series(profile, o.tail_fraction, idx, mono_err);
  const auto ld_series = tail_series(profile, o.tail_fraction, idx, ld_err);
  res.verdicts.push_back(rate_verdict("thm1.tract_disc", disc, o.min_pass_rate, std::nullopt));
  res.verdicts.push_back(
      rate_verdict("thm1.monomial", mono, o.min_pass_rate, quartile_trend(mono_series, o.trend_floor)));
  res.verdicts.push_back(rate_verdict("thm1.logderiv", ld, o.min_pass_rate, quartile_trend(ld_series, o.trend_floor)));
  return res;
}

SweepResult theorem2_sweep(const FunctionSpec& spec, const GrowthProfile& profile, const ExceptionalSet& E,
                           const VerifierOptions& opts, Execution exec) {
  const auto o = with_profile(opts, profile);
  SweepResult res;
  const auto& p = profile.params;
  if (!p.rho0) {
    res.skipped = "no order floor rho0 configured";
    return res;
  }
  if (!profile.order_estimate || *profile.order_estimate <= *p.rho0) {
    res.skipped = fmt::format("order {:.3g} does not exceed rho0 = {}",
                              static_cast<double>(profile.order_estimate.value_or(0)), static_cast<double>(*p.rho0));
    return res;
  }

  const auto& s = profile.samples;
  const std::size_t n = s.size();
  std::vector<std::optional<PositiveOrderWindow>> window_for(n);
  std::size_t accepted = 0;
  Real best_diag = 0;
  VerificationReport wv;
  wv.check = "thm2.window";
  wv.tolerance = o.window_threshold;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const auto w = positive_order_window(profile, s[i].r, o.window_threshold);
      ++accepted;
      best_diag = std::max(best_diag, w.diagnostic);
      for (std::size_t j = i; j < n && s[j].r <= w.r_n_prime; ++j)
        if (!window_for[j]) window_for[j] = w;
    } catch (const WindowRejectedError& e) {
      best_diag = std::max(best_diag, e.diagnostic());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PreconditionFailed) throw;
      wv.pass = false;
      wv.note = e.what();
      res.verdicts.push_back(wv);
      return res;
    }
  }
  wv.max_rel_err = best_diag;
  wv.secondary = static_cast<Real>(accepted);
  wv.pass = accepted > 0;
  wv.note = fmt::format("{} of {} candidate windows accepted; best diagnostic {:.4g}", accepted, n,
                        static_cast<double>(best_diag));
  res.verdicts.push_back(wv);
  if (accepted == 0) return res;

  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < n; ++j)
    if (window_for[j] && !E.in_e[j]) idx.push_back(j);
  std::vector<std::vector<VerificationReport>> per(idx.size());
  detail::parallel_fill(per, exec, [&](std::size_t k) {
    const std::size_t j = idx[k];
    auto reps = higher_logderiv_check(spec, *window_for[j], s[j], false, p.M, o);
    for (auto& r : reps) r.index = j;
    return reps;
  });
  for (int q = 1; q <= p.M; ++q) {
    std::vector<VerificationReport> by_q;
    for (const auto& reps : per) by_q.push_back(reps[static_cast<std::size_t>(q - 1)]);
    auto v = rate_verdict("thm2.higher_logderiv", by_q, 1, std::nullopt);
    v.q = q;
    res.verdicts.push_back(v);
  }
  VerificationReport ae;
  ae.check = "thm2.a_eps";
  ae.tolerance = o.a_eps_min;
  ae.max_rel_err = std::numeric_limits<Real>::infinity();
  std::size_t below = 0;
  for (const auto& reps : per) {
    const auto& rep = reps.front();
    if (rep.a_eps < ae.max_rel_err) {
      ae.max_rel_err = rep.a_eps;
      ae.r = rep.r;
    }
    below += rep.a_eps < o.a_eps_min ? 1 : 0;
  }
  ae.pass = !per.empty() && below == 0;
  ae.note = fmt::format("min a*eps over {} checked radii; {} below {}", per.size(), below,
                        static_cast<double>(o.a_eps_min));
  res.verdicts.push_back(ae);
  for (auto& reps : per) res.records.insert(res.records.end(), reps.begin(), reps.end());
  return res;
}

SweepResult zero_order_sweep(const FunctionSpec& spec, const GrowthProfile& profile, const ExceptionalSet& E,
                             const VerifierOptions& opts, Execution exec) {
  const auto o = with_profile(opts, profile);
  SweepResult res;
  try {
    require_zero_order(profile, o);
  } catch (const Error& e) {
    res.skipped = e.what();
    return res;
  }
  const int M = profile.params.M;
  const auto idx = tail_indices(profile, E, o.tail_fraction);
  std::vector<std::vector<Real>> ratios(idx.size());
  detail::parallel_fill(ratios, exec,
                        [&](std::size_t k) { return zero_order_bound_ratios(spec, profile.samples[idx[k]], M, o); });

  // Constants fitted on the first tail quartile.
  const std::size_t n = profile.samples.size();
  const std::size_t t0 = tail_start(n, o.tail_fraction);
  const std::size_t q1_end = t0 + (n - t0) / 4;
  ZeroOrderFit fit;
  fit.c_fit.assign(static_cast<std::size_t>(M), 0);
  for (std::size_t k = 0; k < idx.size() && idx[k] < q1_end; ++k)
    for (std::size_t q = 0; q < fit.c_fit.size(); ++q) fit.c_fit[q] = std::max(fit.c_fit[q], ratios[k][q]);

  std::vector<VerificationReport> growth;
  std::vector<std::vector<VerificationReport>> tower(static_cast<std::size_t>(M));
  std::vector<Real> a_eps;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& g = profile.samples[idx[k]];
    auto recs = zero_order_records(g, ratios[k], fit, o, idx[k]);
    growth.push_back(recs[0]);
    for (int q = 1; q <= M; ++q) tower[static_cast<std::size_t>(q - 1)].push_back(recs[static_cast<std::size_t>(q)]);
    a_eps.push_back(g.a * g.eps);
    res.records.insert(res.records.end(), recs.begin(), recs.end());
  }
  res.verdicts.push_back(rate_verdict("zero_order.growth", growth, 1, std::nullopt));
  for (int q = 1; q <= M; ++q) {
    auto v = rate_verdict("zero_order.tower", tower[static_cast<std::size_t>(q - 1)], 1, std::nullopt);
    v.q = q;
    v.note += fmt::format("; fitted constant {:.4g}", static_cast<double>(fit.c_fit[static_cast<std::size_t>(q - 1)]));
    res.verdicts.push_back(v);
  }
  VerificationReport trend;
  trend.check = "zero_order.a_eps_trend";
  const auto t = quartile_trend(tail_series(profile, o.tail_fraction, idx, a_eps), 0);
  trend.pass = !idx.empty() && t.non_increasing;
  trend.max_rel_err = t.maxima[3].value_or(0);
  trend.note = "a*eps " + describe_trend(t);
  if (!idx.empty()) trend.r = profile.samples[idx.back()].r;
  res.verdicts.push_back(trend);
  return res;
}

SweepResult b1_control_sweep(const FunctionSpec& spec, const GrowthProfile& profile, const ExceptionalSet& E,
                             const VerifierOptions& opts) {
  const auto o = with_profile(opts, profile);
  SweepResult res;
  for (const std::size_t i : tail_indices(profile, E, o.tail_fraction)) {
    auto rep = b1_control(spec, profile.samples[i], o);
    rep.index = i;
    res.records.push_back(rep);
  }
  res.verdicts.push_back(rate_verdict("b1_control", res.records, 1, std::nullopt));
  return res;
}

SweepResult classical_sweep(std::span<const Complex> coefficients, std::span<const Real> radii, int M,
                            const VerifierOptions& opts) {
  SweepResult res;
  std::vector<VerificationReport> per_radius;
  for (const Real r : radii) {
    auto reps = classical_asym_check(coefficients, r, M, opts);
    VerificationReport all = reps[0];
    all.check = "classical.radius";
    all.q = 0;
    for (const auto& rep : reps) {
      all.pass = all.pass && rep.pass;
      all.max_rel_err = std::max(all.max_rel_err, rep.max_rel_err);
    }
    per_radius.push_back(all);
    res.records.insert(res.records.end(), reps.begin(), reps.end());
  }
  res.verdicts.push_back(rate_verdict("classical", per_radius, opts.classical_pass_rate, std::nullopt));
  return res;
}

SweepResult recurrence_sweep(const FunctionSpec& spec, int q_max, const VerifierOptions& opts) {
  SweepResult res;
  res.records = recurrence_check(spec, q_max, opts);
  res.verdicts.push_back(rate_verdict("recurrence", res.records, 1, std::nullopt));
  return res;
}

}  // namespace wvlab
