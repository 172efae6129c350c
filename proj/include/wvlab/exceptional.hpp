// Empirical exceptional sets: grid cells where the regularity conditions
// behind the local growth estimates fail, measured linearly in x and
// logarithmically in r, plus the local growth bound on B near a radius.
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wvlab/growth.hpp"

namespace wvlab {

enum class ConditionId { G10Plus, G10Minus, L5, L6, L7, L14, Union, E };

std::string_view to_string(ConditionId id);

// Closed grid cell, given in both coordinates.
struct Cell {
  Real x_lo, x_hi;
  Real r_lo, r_hi;
};

struct FailureSetReport {
  ConditionId id = ConditionId::Union;
  std::vector<Cell> cells;        // disjoint, sorted
  Real linear_measure = 0;        // sum of x-widths
  Real log_measure = 0;           // integral of dt/(1-t) over the cells, from r
  Real fraction_failing = 0;      // failing samples / samples
  std::vector<char> failing;      // per sample
};

// Builds the union of closed grid cells [x_{i-1}, x_{i+1}] around every failing
// sample, merged and measured. xs must be increasing.
FailureSetReport make_failure_report(ConditionId id, std::span<const Real> xs, std::vector<char> failing);

// Logarithmic measure of the part of the cells with x <= x_max.
Real log_measure_up_to(const FailureSetReport& report, Real x_max);

// Both inequalities of the growth lemma on a sampled non-decreasing A(x) > 1,
// with A interpolated piecewise-linearly (linear extrapolation off the ends).
// NotMonotone if A decreases by more than a relative 1e-9.
std::pair<FailureSetReport, FailureSetReport> growth_lemma_failure_set(std::span<const Real> xs,
                                                                       std::span<const Real> A, Real beta,
                                                                       Real delta);

struct ExceptionalSet {
  FailureSetReport l5, l6, l7;
  FailureSetReport union_set;  // L5 u L6 u L7
  FailureSetReport e_set;      // union plus the initial segment [r0, r0')
  std::size_t initial_end = 0;  // index of r0': first sample starting 8 consecutive passes
  bool grid_too_coarse = false;  // eps(r) below one grid cell for > 50% of samples
  Real coarse_fraction = 0;
  std::vector<char> in_e;  // per sample
};

ExceptionalSet e_set_failure(const GrowthProfile& profile);

struct E2Integral {
  Real numeric;      // trapezoid in x of a / B^{1+beta} dr/r
  Real closed_form;  // (B(r0)^{-beta} - B(r_max)^{-beta}) / beta
};

E2Integral e2_integral_check(const GrowthProfile& profile);

// max over 33 points s in [r - eps, r + eps] of B(s) - B(r) - a(r) log(s/r), clamped at 0.
Real phi_hat(const FunctionSpec& spec, const TractSpec& tract, const GrowthSample& sample,
             const ScanOptions& scan = {}, int points = 33);

struct LocalBoundFit {
  Real c_fit = 0;  // 95th percentile of phi_hat / (a^{1-beta} eps) off E
  std::vector<std::optional<Real>> phi_hat;  // per sample; empty on E
  std::vector<std::optional<Real>> bound_ratio;
  FailureSetReport l14;  // samples with ratio > 2 c_fit
};

LocalBoundFit fit_local_bound(const FunctionSpec& spec, const TractSpec& tract, const GrowthProfile& profile,
                              const ExceptionalSet& E, const ScanOptions& scan = {},
                              Execution exec = Execution::Parallel);

struct LocalBoundResult {
  Real phi_hat;
  Real bound;  // 2 c_fit a^{1-beta} eps
  bool pass;
};

// ExceptionalRadius when sample `index` lies in E.
LocalBoundResult b_local_bound_check(const FunctionSpec& spec, const TractSpec& tract, const GrowthProfile& profile,
                                     const ExceptionalSet& E, std::size_t index, Real c_fit,
                                     const ScanOptions& scan = {});

}  // namespace wvlab
