// Growth indicators on a grid uniform in x = log 1/(1-r): the circle maximum
// B(r) of v, the logarithmic derivative a(r), the radius schedule eps(r), the
// order estimate and positive-order windows. Also the classical maximum term.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wvlab/function_model.hpp"
#include "wvlab/series.hpp"
#include "wvlab/types.hpp"

namespace wvlab {

struct GrowthParams {
  Real r0 = 0.3L;  // grid start; replaced by the validated r0 in a profile
  Real beta = 0.25L;
  Real delta = 0.5L;
  std::optional<Real> rho0;  // order floor for the positive-order pipeline
  int M = 3;                 // highest derivative order checked
};

// Validates 0 < r0 < 1, 0 < beta <= 1/2, delta > 0, rho0 > 0, M >= 1.
void validate(const GrowthParams& params);

struct GridSpec {
  Real span = 12;  // x-extent of the grid
  int points = 512;
};

struct ScanOptions {
  int samples = 4096;  // dense scan of the circle
  Real theta_tol = 1e-12L;
  int refine_peaks = 4;  // local maxima refined by golden section
  int membership_probes = 256;
};

struct CircleMax {
  Real B;
  Real theta;  // in [0, 2 pi); smallest theta among ties
};

// B(r) = max_theta v(r e^{i theta}).
CircleMax max_on_circle(const FunctionSpec& spec, const TractSpec& tract, Real r, const ScanOptions& scan = {});

// max log|f| on |z| = r for a power series (no tract restriction), returned as
// {log M(r), argmax}. Used for the classical maximum-modulus points.
CircleMax max_modulus_on_circle(std::span<const Complex> coefficients, Real r, const ScanOptions& scan = {});

struct SlopeEstimate {
  Real a;      // reported value
  Real left;   // one-sided slopes in log r
  Real right;
  bool suspect;  // one-sided slopes disagree (> 20% and > 1): a = larger slope
};

// dB/d log r at r by a central difference with one Richardson level, step
// h_log_r in log r. B_r = B(r) is passed in to avoid a rescan.
SlopeEstimate a_estimate(const FunctionSpec& spec, const TractSpec& tract, Real r, Real B_r, Real h_log_r,
                         const ScanOptions& scan = {});

// min((1-r) / (2 a^beta (log a)^{1+delta}), 1 / (a^{1-beta} (log a)^{1+delta})).
// DomainError when a < 2.
Real epsilon(Real r, Real a, Real beta, Real delta);

struct GrowthSample {
  Real r = 0;
  Real x = 0;  // log 1/(1-r)
  Real B = 0;
  Real theta = 0;
  Real a = 0;
  Real eps = 0;  // NaN when a < 2
  bool suspect = false;

  Complex z_r() const { return std::polar(r, theta); }
  Real sigma() const { return eps / 2048; }
};

// One grid sample. The a-step is min(0.25 grid_step_x, eps(r)/(1-r)) in x.
GrowthSample compute_sample(const FunctionSpec& spec, const TractSpec& tract, Real r, const GrowthParams& params,
                            Real grid_step_x, const ScanOptions& scan = {});

struct GrowthProfile {
  GrowthParams params;  // params.r0 is the validated r0
  GridSpec grid;
  Real x_start = 0;                 // x of the requested grid start
  Real grid_step = 0;               // x spacing
  std::size_t first_grid_index = 0;  // grid index of samples.front()
  std::vector<GrowthSample> samples;  // validated samples only
  std::optional<Real> order_estimate;
};

// Raw grid samples starting at x0 = log 1/(1 - params.r0).
std::vector<GrowthSample> sample_grid(const FunctionSpec& spec, const TractSpec& tract, const GrowthParams& params,
                                      const GridSpec& grid, const ScanOptions& scan = {},
                                      Execution exec = Execution::Parallel);

// Smallest index from which B >= 2 and a >= 2 at every later sample.
// NeverAttained if none qualifies.
std::size_t validate_base_config(std::span<const GrowthSample> samples);

GrowthProfile build_profile(const FunctionSpec& spec, const TractSpec& tract, const GrowthParams& params,
                            const GridSpec& grid = {}, const ScanOptions& scan = {},
                            Execution exec = Execution::Parallel);

// Least-squares slope of ys against xs.
Real least_squares_slope(std::span<const Real> xs, std::span<const Real> ys);

// Max over trailing windows (lengths n/16, n/8, n/4, at least 16 samples) of
// the least-squares slope of ys against xs.
Real trailing_slope(std::span<const Real> xs, std::span<const Real> ys);

// Slope of log B against x at the end of the grid, clamped below at 0.
// InsufficientData with fewer than 16 samples having B >= 2.
Real order_estimate(std::span<const GrowthSample> samples);

// a at an arbitrary x, by piecewise-linear interpolation of the a-grid
// (linear extrapolation off either end).
Real interpolate_in_x(std::span<const GrowthSample> samples, Real x, Real GrowthSample::*field);

struct PositiveOrderWindow {
  Real r_n;
  Real r_n_prime;   // 1 - (1 - r_n)^{1 + rho0}
  Real diagnostic;  // (1 - r_n)^{1+rho0} a(r_n)^{1-2 beta}
};

Real window_end(Real r_n, Real rho0);

// PreconditionFailed without rho0, when the order estimate does not exceed
// rho0, or when the trailing slope of log a against x does not exceed
// (1 + rho0)/(1 - 2 beta). WindowRejectedError when the diagnostic is below
// the threshold.
PositiveOrderWindow positive_order_window(const GrowthProfile& profile, Real r_n, Real threshold = 10);

struct ProfileInvariants {
  bool B_non_decreasing = true;
  bool B_convex_in_log_r = true;
  bool a_non_decreasing = true;
  Real worst_convexity = 0;  // most negative scaled second difference
};

// Discrete convexity tolerance: second differences >= -tol * B.
ProfileInvariants check_invariants(const GrowthProfile& profile, Real tol = 1e-6L);

}  // namespace wvlab
