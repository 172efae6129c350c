// Closed-form catalog values written out independently of the library, and a
// profile assembled from them for testing the exceptional and window logic.
#pragma once

#include <cmath>

#include "wvlab/growth.hpp"

namespace testutil {

using wvlab::Real;

inline Real power_law_B(Real gamma, Real r) { return gamma * -std::log1p(-r); }
inline Real power_law_a(Real gamma, Real r) { return gamma * r / (1 - r); }
inline Real exp_pole_B(Real c, Real k, Real r) { return c / std::pow(1 - r, k); }
inline Real exp_pole_a(Real c, Real k, Real r) { return c * k * r / std::pow(1 - r, k + 1); }

// Profile on the usual x-grid with B and a from the given closed forms and
// theta_r = 0, trimmed like build_profile.
template <typename BFn, typename AFn>
wvlab::GrowthProfile closed_form_profile(BFn B, AFn a, const wvlab::GrowthParams& params,
                                         const wvlab::GridSpec& grid = {}) {
  std::vector<wvlab::GrowthSample> raw;
  const Real x0 = -std::log1p(-params.r0);
  const Real step = grid.span / (grid.points - 1);
  for (int i = 0; i < grid.points; ++i) {
    wvlab::GrowthSample s;
    s.x = x0 + step * i;
    s.r = -std::expm1(-s.x);
    s.B = B(s.r);
    s.a = a(s.r);
    s.eps = s.a >= 2 ? wvlab::epsilon(s.r, s.a, params.beta, params.delta) : std::nan("");
    raw.push_back(s);
  }
  const std::size_t i0 = wvlab::validate_base_config(raw);
  wvlab::GrowthProfile p;
  p.params = params;
  p.grid = grid;
  p.x_start = x0;
  p.grid_step = step;
  p.first_grid_index = i0;
  p.samples.assign(raw.begin() + static_cast<std::ptrdiff_t>(i0), raw.end());
  p.params.r0 = p.samples.front().r;
  p.order_estimate = wvlab::order_estimate(p.samples);
  return p;
}

}  // namespace testutil
