// Numerical verification of the local asymptotics near maximum points z_r:
// the disc-in-tract property, the monomial approximation via g(z), the
// logarithmic derivative, higher derivatives in positive order, zero-order
// upper bounds and the classical maximum-term relations for entire series.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wvlab/exceptional.hpp"
#include "wvlab/function_model.hpp"
#include "wvlab/growth.hpp"

namespace wvlab {

/// Deterministic disc probes: `rings` concentric rings (the outermost on the
/// boundary) times `rays` rays, plus the centre.
struct ProbeLayout {
  int rings = 8;
  int rays = 32;
  bool center = true;

  int count() const { return rings * rays + (center ? 1 : 0); }
};

inline constexpr ProbeLayout kProbes256{8, 32, true};
inline constexpr ProbeLayout kProbes128{4, 32, true};

std::vector<Complex> disc_probes(Complex center, Real radius, ProbeLayout layout);

struct VerificationReport {
  std::string check;
  Real r = 0;
  std::optional<std::size_t> index;  // profile sample index
  int q = 0;
  Real disc_radius = 0;
  int probes = 0;
  Real max_rel_err = 0;  // or the max bound ratio, per check
  Real secondary = 0;    // check-specific second figure (see note)
  Real tolerance = 0;
  bool pass = false;
  Complex worst_probe{};
  Real a_eps = 0;  // a(r) eps(r)
  std::string note;
};

struct VerifierOptions {
  Real beta = 0.25L;
  Real delta = 0.5L;
  Real tol_floor = 0.05L;       // innermost relative tolerance
  Real C_g = 1;                 // scale of the (a^beta (log a)^{1+delta})^{-1} tolerance term
  int path_steps = 8;           // continuation steps for log f inside discs
  Real trend_floor = 1e-6L;     // errors below this count as numerical noise in trend checks
  Real tail_fraction = 0.5L;    // tail = samples past this fraction of the validated grid
  Real min_pass_rate = 0.9L;    // per-radius pass rate required along the tail
  Real a_eps_min = 10;          // positive-order requirement on a(r) eps(r)
  Real window_threshold = 10;   // accepted window diagnostic
  Real zero_order_max = 0.1L;   // order estimate below this counts as order zero
  Real zero_order_o1 = 0.1L;    // fixed stand-in for the o(1) in the exponent
  Real zero_order_slack = 2;    // log a / log(1/(1-r)) <= 1 + slack / x
  Real negative_control_floor = 0.25L;
  Real classical_gamma = 1.5L;  // probe discs |log(z/z_r)| < N^{-gamma}
  Real classical_tol = 0.1L;
  Real classical_pass_rate = 0.8L;
  int recurrence_probes = 32;
  Real recurrence_tol = 1e-5L;
  Real recurrence_radius = 0.9L;
  std::uint64_t seed = 1;
};

// Samples D(z_r, 4 sigma): every probe must have finite |f| > R.
// max_rel_err holds max R/|f| over the probes.
VerificationReport tract_disc_check(const FunctionSpec& spec, const TractSpec& tract, Real r, Complex z_r,
                                    Real sigma, ProbeLayout layout = kProbes256);

// g(z) = log f(z)/f(z_r) - a_r log(z/z_r), both logs vanishing at z_r.
Complex g_eval(const FunctionSpec& spec, Complex z_r, Real a_r, Complex z, int path_steps = 8);

// sup |g| over D(z_r, sigma); pass iff <= max(tol_floor, 2 phi_hat).
// secondary = sup |e^g - 1|.
VerificationReport monomial_check(const FunctionSpec& spec, Real r, Complex z_r, Real a_r, Real sigma, Real phi_hat,
                                  const VerifierOptions& opts = {}, ProbeLayout layout = kProbes256);

// Tolerance for the logarithmic derivative at a_r.
Real logderiv_tolerance(Real a_r, const VerifierOptions& opts);

// max |L_1(z) z / a_r - 1| over D(z_r, T sigma), T in (0, 2).
VerificationReport logderiv_check(const FunctionSpec& spec, Real r, Complex z_r, Real a_r, Real sigma, Real T = 1,
                                  const VerifierOptions& opts = {}, ProbeLayout layout = kProbes256);

// One report per q = 1..M: max |L_q(z) z^q / a_r^q - 1| over D(z_r, sigma);
// pass iff <= q * logderiv_tolerance. a(r) eps(r) is recorded; the sweep
// requires it to reach a_eps_min at every checked radius.
// WindowRejected when r lies outside the window, ExceptionalRadius when in E.
std::vector<VerificationReport> higher_logderiv_check(const FunctionSpec& spec, const PositiveOrderWindow& window,
                                                      const GrowthSample& sample, bool in_e, int M,
                                                      const VerifierOptions& opts = {},
                                                      ProbeLayout layout = kProbes128);

// max over D(z_r, (2 - q/M) sigma) of |L_q| / (a (1/(1-r))^{(q-1)(1+beta+o1)}), q = 1..M.
std::vector<Real> zero_order_bound_ratios(const FunctionSpec& spec, const GrowthSample& sample, int M,
                                          const VerifierOptions& opts = {}, ProbeLayout layout = kProbes128);

struct ZeroOrderFit {
  std::vector<Real> c_fit;  // per q, fitted on the first tail quartile
};

// Per-radius zero-order reports: the growth ratio of a against 1/(1-r) and
// the tower bound for q = 1..M against the fitted constants.
// NotZeroOrder when the order estimate is >= zero_order_max; ExceptionalRadius in E.
std::vector<VerificationReport> zero_order_checks(const FunctionSpec& spec, const GrowthProfile& profile,
                                                  const ExceptionalSet& E, std::size_t index, int M,
                                                  const ZeroOrderFit& fit, const VerifierOptions& opts = {});

// |L_2 z_r^2 / a_r^2 - 1| at z_r (secondary: max over D(z_r, sigma)); pass iff >= the floor.
VerificationReport b1_control(const FunctionSpec& spec, const GrowthSample& sample, const VerifierOptions& opts = {});

// (asym) as q = 0 and (asym1) for q = 1..M at 64 probes with |log(z/z_r)| < N(r)^{-gamma}.
// TruncationDominates when N(r) exceeds half the degree.
std::vector<VerificationReport> classical_asym_check(std::span<const Complex> coefficients, Real r, int M,
                                                     const VerifierOptions& opts = {});

// |L_{q+1} - (L_q L_1 + L_q')| / |L_{q+1}| with L_q' from Richardson-extrapolated
// central differences, at seeded random probes in |z| < recurrence_radius;
// one report per q = 1..q_max.
std::vector<VerificationReport> recurrence_check(const FunctionSpec& spec, int q_max, const VerifierOptions& opts = {});

// Tail sample indices: those at or past tail_fraction of the profile.
std::size_t tail_start(std::size_t n, Real tail_fraction);

struct QuartileTrend {
  std::array<std::optional<Real>, 4> maxima;
  bool non_increasing = true;
};

// Splits the sequence into four consecutive quartiles and compares maxima:
// each non-empty quartile must satisfy max <= previous max + floor.
QuartileTrend quartile_trend(std::span<const std::optional<Real>> values, Real floor);

struct SweepResult {
  std::vector<VerificationReport> records;   // per radius
  std::vector<VerificationReport> verdicts;  // per pipeline
  std::optional<std::string> skipped;
};

SweepResult theorem1_sweep(const FunctionSpec& spec, const TractSpec& tract, const GrowthProfile& profile,
                           const ExceptionalSet& E, const LocalBoundFit* local_bound, const VerifierOptions& opts = {},
                           Execution exec = Execution::Parallel);

SweepResult theorem2_sweep(const FunctionSpec& spec, const GrowthProfile& profile, const ExceptionalSet& E,
                           const VerifierOptions& opts = {}, Execution exec = Execution::Parallel);

SweepResult zero_order_sweep(const FunctionSpec& spec, const GrowthProfile& profile, const ExceptionalSet& E,
                             const VerifierOptions& opts = {}, Execution exec = Execution::Parallel);

SweepResult b1_control_sweep(const FunctionSpec& spec, const GrowthProfile& profile, const ExceptionalSet& E,
                             const VerifierOptions& opts = {});

SweepResult classical_sweep(std::span<const Complex> coefficients, std::span<const Real> radii, int M,
                            const VerifierOptions& opts = {});

SweepResult recurrence_sweep(const FunctionSpec& spec, int q_max, const VerifierOptions& opts = {});

}  // namespace wvlab
