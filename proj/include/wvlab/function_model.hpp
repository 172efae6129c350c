// Test functions in the unit disc: log-space evaluation, branch-tracked
// logarithms, exact logarithmic-derivative towers and closed-form growth
// oracles for the catalog entries.
#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "wvlab/types.hpp"

namespace wvlab {

/// Finite truncation sum_{n<D} a_n z^n. Claims are about the polynomial.
struct PowerSeries {
  std::vector<Complex> coefficients;
};

/// f(z) = (1 - z)^{-gamma}
struct PowerLaw {
  Real gamma = 1;
};

/// f(z) = exp(c / (1 - z)^k)
struct ExpPole {
  Real c = 1;
  Real k = 1;
};

struct FunctionSpec;

/// f = product of the factors.
struct Product {
  std::vector<FunctionSpec> factors;
};

struct FunctionSpec {
  std::variant<PowerSeries, PowerLaw, ExpPole, Product> kind;

  static FunctionSpec power_series(std::vector<Complex> coefficients);
  static FunctionSpec power_law(Real gamma);
  static FunctionSpec exp_pole(Real c, Real k);
  static FunctionSpec product(std::vector<FunctionSpec> factors);

  std::string describe() const;
};

/// Direct tract U: component of {|f| > R} containing the seed.
struct TractSpec {
  Real R = 1;
  Complex seed{0.5L, 0};
};

/// Straight segment used to continue log f from the anchor to the target.
struct LogPath {
  Complex anchor;
  Complex target;
  int steps = 16;
};

// Throws InvalidSpec when a parameter invariant is violated.
void validate(const FunctionSpec& spec);
// Also checks R > 0, seed inside the disc and |f(seed)| > R.
void validate(const FunctionSpec& spec, const TractSpec& tract);

// A fixed local branch of log f(z). For the catalog kinds this is the global
// analytic branch on the disc; power series use the principal branch.
// Real part is -inf at zeros.
Complex local_log(const FunctionSpec& spec, Complex z);

// log|f(z)|; cheaper than local_log and never exponentiates.
Real log_modulus(const FunctionSpec& spec, Complex z);

// log f at path.target, continued along the segment from path.anchor, where it
// takes the value local_log(anchor). Steps are halved until consecutive phase
// increments are below pi/4.
Complex eval_log(const FunctionSpec& spec, const LogPath& path);

// eval_log(target) - local_log(anchor): the branch of log f(z)/f(anchor)
// vanishing at the anchor.
Complex log_ratio(const FunctionSpec& spec, Complex anchor, Complex target, int steps = 16);

// Derivatives (log f)^{(j)}(z), j = 1..M.
std::vector<Complex> log_derivatives(const FunctionSpec& spec, Complex z, int M);

// L_q(z) = f^{(q)}(z) / f(z), q = 1..M.
std::vector<Complex> logderiv_tower(const FunctionSpec& spec, Complex z, int M);

// Converts log-derivatives h_1..h_M into the tower L_1..L_M via
// L_{q+1} = sum_j C(q,j) h_{j+1} L_{q-j}.
std::vector<Complex> tower_from_log_derivatives(const std::vector<Complex>& h);

// Sampled path-connectivity test: membership_probes points on the segment from
// the seed to z (seed included) and z itself must satisfy |f| > R.
bool in_tract(const FunctionSpec& spec, const TractSpec& tract, Complex z, int membership_probes = 256);

// v(z) = log|f(z)/R| on the tract, 0 elsewhere.
Real v_eval(const FunctionSpec& spec, const TractSpec& tract, Complex z, int membership_probes = 256);

/// Closed-form growth indicators for PowerLaw, ExpPole and products of them
/// (all maximise |f| at z = r, so theta_r = 0).
class GrowthOracle {
 public:
  Real B(Real r) const;
  Real a(Real r) const;
  Real theta_r(Real) const { return 0; }
  Real order() const;

 private:
  friend GrowthOracle catalog_oracle(const FunctionSpec&, Real);
  std::vector<PowerLaw> power_laws_;
  std::vector<ExpPole> exp_poles_;
  Real log_R_ = 0;
};

// Throws NoOracle when the function (or any factor) is a power series.
GrowthOracle catalog_oracle(const FunctionSpec& spec, Real R = 1);

// Reads coefficients from a CSV with header `n,re,im`. Missing indices are zero.
std::vector<Complex> load_coefficients_csv(const std::filesystem::path& path);

}  // namespace wvlab
