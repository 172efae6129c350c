#include "wvlab/function_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wvlab/series.hpp"

namespace wvlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Wraps the imaginary part into (-pi, pi].
Complex wrap_phase(Complex z) {
  Real im = std::remainder(z.imag(), kTwoPi);
  if (im <= -kPi) im += kTwoPi;
  return {z.real(), im};
}

Complex require_nonsingular(Complex w) {
  if (w == Complex(0)) throw Error(ErrorCode::PoleOrZeroAt, "z = 1 is a singular point");
  return w;
}

Real exp_pole_log_modulus(const ExpPole& e, Complex z) {
  const Complex w = Complex(1) - z;
  const Real k = e.k;
  if (k == std::floor(k) && k <= 8) {
    // Re(c / w^k) = c Re(conj(w)^k) / |w|^{2k}
    Complex num(1);
    const Complex wc = std::conj(w);
    for (int i = 0; i < static_cast<int>(k); ++i) num *= wc;
    return e.c * num.real() / std::pow(std::norm(w), k);
  }
  return e.c * std::pow(std::abs(w), -k) * std::cos(k * std::arg(w));
}

Complex continue_leaf(const FunctionSpec& leaf, Complex anchor, Complex target, int steps) {
  const Complex start = local_log(leaf, anchor);
  if (!is_finite(start)) throw Error(ErrorCode::ZeroOrPoleOnPath, "f vanishes or blows up at the anchor");
  const Complex finish = local_log(leaf, target);
  if (!is_finite(finish)) throw Error(ErrorCode::ZeroOrPoleOnPath, "f vanishes or blows up at the target");
  if (anchor == target) return start;

  Complex acc = start;
  // Recursive halving of a single step until the phase increment is small. The
  // increment predicted from L_1 at both ends must be small too, otherwise a
  // jump of a whole turn would be invisible after wrapping.
  auto small_step = [&](Complex z0, Complex z1) {
    const Complex dz = z1 - z0;
    return std::abs((log_derivatives(leaf, z0, 1)[0] * dz).imag()) < kPi / 4 &&
           std::abs((log_derivatives(leaf, z1, 1)[0] * dz).imag()) < kPi / 4;
  };
  auto advance = [&](auto&& self, Complex z0, Complex c0, Complex z1, int depth) -> Complex {
    const Complex c1 = local_log(leaf, z1);
    if (!is_finite(c1)) throw Error(ErrorCode::ZeroOrPoleOnPath, "f vanishes or blows up on the segment");
    const Complex inc = wrap_phase(c1 - c0);
    if (std::abs(inc.imag()) < kPi / 4 && small_step(z0, z1)) {
      acc += inc;
      return c1;
    }
    if (depth >= 48) throw Error(ErrorCode::ZeroOrPoleOnPath, "branch tracking failed to resolve phase");
    const Complex mid = (z0 + z1) / Real(2);
    const Complex cm = self(self, z0, c0, mid, depth + 1);
    return self(self, mid, cm, z1, depth + 1);
  };

  Complex z_prev = anchor;
  Complex c_prev = start;
  const Complex delta = target - anchor;
  for (int s = 1; s <= steps; ++s) {
    const Complex z = s == steps ? target : anchor + delta * (static_cast<Real>(s) / steps);
    c_prev = advance(advance, z_prev, c_prev, z, 0);
    z_prev = z;
  }
  // Snap onto the local branch at the target so the result does not depend on
  // accumulated rounding or the step count.
  const Real turns = std::round((acc.imag() - finish.imag()) / kTwoPi);
  return finish + Complex(0, kTwoPi * turns);
}

Complex eval_log_rec(const FunctionSpec& spec, Complex anchor, Complex target, int steps) {
  if (const auto* p = std::get_if<Product>(&spec.kind)) {
    Complex sum(0);
    for (const auto& f : p->factors) sum += eval_log_rec(f, anchor, target, steps);
    return sum;
  }
  return continue_leaf(spec, anchor, target, steps);
}

// (log f)^{(j)} from a tower L_1..L_M (inverse of tower_from_log_derivatives).
std::vector<Complex> log_derivatives_from_tower(const std::vector<Complex>& L) {
  const std::size_t M = L.size();
  std::vector<Complex> h(M);
  auto Lq = [&](std::size_t q) { return q == 0 ? Complex(1) : L[q - 1]; };
  for (std::size_t q = 0; q < M; ++q) {
    // L_{q+1} = sum_{j=0}^{q} C(q,j) h_{j+1} L_{q-j}
    Complex rest(0);
    Real binom = 1;
    for (std::size_t j = 0; j < q; ++j) {
      rest += binom * h[j] * Lq(q - j);
      binom = binom * static_cast<Real>(q - j) / static_cast<Real>(j + 1);
    }
    h[q] = Lq(q + 1) - rest;
  }
  return h;
}

void validate_rec(const FunctionSpec& spec) {
  std::visit(overloaded{
                 [](const PowerSeries& s) {
                   if (s.coefficients.empty()) throw Error(ErrorCode::InvalidSpec, "PowerSeries needs coefficients");
                   for (const auto& c : s.coefficients)
                     if (!is_finite(c)) throw Error(ErrorCode::InvalidSpec, "non-finite coefficient");
                 },
                 [](const PowerLaw& p) {
                   if (!(p.gamma > 0) || !std::isfinite(p.gamma))
                     throw Error(ErrorCode::InvalidSpec, "PowerLaw gamma must be > 0");
                 },
                 [](const ExpPole& e) {
                   if (!(e.c > 0) || !std::isfinite(e.c)) throw Error(ErrorCode::InvalidSpec, "ExpPole c must be > 0");
                   if (!(e.k > 0) || !std::isfinite(e.k)) throw Error(ErrorCode::InvalidSpec, "ExpPole k must be > 0");
                 },
                 [](const Product& p) {
                   if (p.factors.empty()) throw Error(ErrorCode::InvalidSpec, "Product needs factors");
                   for (const auto& f : p.factors) validate_rec(f);
                 },
             },
             spec.kind);
}

void collect_oracle_terms(const FunctionSpec& spec, std::vector<PowerLaw>& pl, std::vector<ExpPole>& ep) {
  std::visit(overloaded{
                 [](const PowerSeries&) {
                   throw Error(ErrorCode::NoOracle, "no closed-form growth for power series");
                 },
                 [&](const PowerLaw& p) { pl.push_back(p); },
                 [&](const ExpPole& e) { ep.push_back(e); },
                 [&](const Product& p) {
                   for (const auto& f : p.factors) collect_oracle_terms(f, pl, ep);
                 },
             },
             spec.kind);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

FunctionSpec FunctionSpec::power_series(std::vector<Complex> coefficients) {
  return FunctionSpec{PowerSeries{std::move(coefficients)}};
}
FunctionSpec FunctionSpec::power_law(Real gamma) { return FunctionSpec{PowerLaw{gamma}}; }
FunctionSpec FunctionSpec::exp_pole(Real c, Real k) { return FunctionSpec{ExpPole{c, k}}; }
FunctionSpec FunctionSpec::product(std::vector<FunctionSpec> factors) {
  return FunctionSpec{Product{std::move(factors)}};
}

std::string FunctionSpec::describe() const {
  return std::visit(overloaded{
                        [](const PowerSeries& s) { return fmt::format("PowerSeries(D={})", s.coefficients.size()); },
                        [](const PowerLaw& p) { return fmt::format("PowerLaw(gamma={})", static_cast<double>(p.gamma)); },
                        [](const ExpPole& e) {
                          return fmt::format("ExpPole(c={},k={})", static_cast<double>(e.c), static_cast<double>(e.k));
                        },
                        [](const Product& p) {
                          std::string s = "Product(";
                          for (std::size_t i = 0; i < p.factors.size(); ++i) {
                            if (i) s += ",";
                            s += p.factors[i].describe();
                          }
                          return s + ")";
                        },
                    },
                    kind);
}

void validate(const FunctionSpec& spec) { validate_rec(spec); }

void validate(const FunctionSpec& spec, const TractSpec& tract) {
  validate(spec);
  if (!(tract.R > 0) || !std::isfinite(tract.R)) throw Error(ErrorCode::InvalidSpec, "tract threshold R must be > 0");
  if (!(std::abs(tract.seed) < 1)) throw Error(ErrorCode::InvalidSpec, "tract seed must lie in the unit disc");
  const Real lm = log_modulus(spec, tract.seed);
  if (!(lm > std::log(tract.R)) || !std::isfinite(lm))
    throw Error(ErrorCode::InvalidSpec, "tract seed must satisfy |f(seed)| > R");
}

Complex local_log(const FunctionSpec& spec, Complex z) {
  return std::visit(overloaded{
                        [&](const PowerSeries& s) { return series_log(s.coefficients, z); },
                        [&](const PowerLaw& p) { return -p.gamma * std::log(Complex(1) - z); },
                        [&](const ExpPole& e) { return e.c * std::exp(-e.k * std::log(Complex(1) - z)); },
                        [&](const Product& p) {
                          Complex sum(0);
                          for (const auto& f : p.factors) sum += local_log(f, z);
                          return sum;
                        },
                    },
                    spec.kind);
}

Real log_modulus(const FunctionSpec& spec, Complex z) {
  return std::visit(overloaded{
                        [&](const PowerSeries& s) {
                          const ScaledSum v = series_derivative(s.coefficients, z, 0);
                          if (v.sum == Complex(0)) return -std::numeric_limits<Real>::infinity();
                          return v.log_scale + std::log(std::abs(v.sum));
                        },
                        [&](const PowerLaw& p) { return -p.gamma * std::log(std::abs(Complex(1) - z)); },
                        [&](const ExpPole& e) { return exp_pole_log_modulus(e, z); },
                        [&](const Product& p) {
                          Real sum = 0;
                          for (const auto& f : p.factors) sum += log_modulus(f, z);
                          return sum;
                        },
                    },
                    spec.kind);
}

Complex eval_log(const FunctionSpec& spec, const LogPath& path) {
  if (path.steps < 1) throw Error(ErrorCode::InvalidArgument, "LogPath needs a positive step count");
  if (!(std::abs(path.anchor) < 1) || !(std::abs(path.target) < 1))
    throw Error(ErrorCode::OutsideDisc, "log path endpoints must lie in the unit disc");
  return eval_log_rec(spec, path.anchor, path.target, path.steps);
}

Complex log_ratio(const FunctionSpec& spec, Complex anchor, Complex target, int steps) {
  return eval_log(spec, LogPath{anchor, target, steps}) - eval_log(spec, LogPath{anchor, anchor, 1});
}

std::vector<Complex> log_derivatives(const FunctionSpec& spec, Complex z, int M) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "tower order M must be >= 1");
  const auto m = static_cast<std::size_t>(M);
  return std::visit(
      overloaded{
          [&](const PowerSeries& s) {
            return log_derivatives_from_tower(series_logderiv_tower(s.coefficients, z, M));
          },
          [&](const PowerLaw& p) {
            const Complex w = require_nonsingular(Complex(1) - z);
            std::vector<Complex> h(m);
            Complex inv_pow = Real(1) / w;
            Real fact = 1;  // (j-1)!
            for (std::size_t j = 1; j <= m; ++j) {
              h[j - 1] = p.gamma * fact * inv_pow;
              fact *= static_cast<Real>(j);
              inv_pow /= w;
            }
            return h;
          },
          [&](const ExpPole& e) {
            const Complex w = require_nonsingular(Complex(1) - z);
            std::vector<Complex> h(m);
            Complex term = e.c * std::exp(-e.k * std::log(w));  // c w^{-k}
            Real rising = 1;                                    // k (k+1) ... (k+j-1)
            for (std::size_t j = 1; j <= m; ++j) {
              rising *= e.k + static_cast<Real>(j - 1);
              term /= w;
              h[j - 1] = rising * term;
            }
            return h;
          },
          [&](const Product& p) {
            std::vector<Complex> h(m, Complex(0));
            for (const auto& f : p.factors) {
              const auto hf = log_derivatives(f, z, M);
              for (std::size_t j = 0; j < m; ++j) h[j] += hf[j];
            }
            return h;
          },
      },
      spec.kind);
}

std::vector<Complex> tower_from_log_derivatives(const std::vector<Complex>& h) {
  const std::size_t M = h.size();
  std::vector<Complex> L(M);
  auto Lq = [&](std::size_t q) { return q == 0 ? Complex(1) : L[q - 1]; };
  for (std::size_t q = 0; q < M; ++q) {
    Complex sum(0);
    Real binom = 1;
    for (std::size_t j = 0; j <= q; ++j) {
      sum += binom * h[j] * Lq(q - j);
      binom = binom * static_cast<Real>(q - j) / static_cast<Real>(j + 1);
    }
    L[q] = sum;
  }
  return L;
}

std::vector<Complex> logderiv_tower(const FunctionSpec& spec, Complex z, int M) {
  if (const auto* s = std::get_if<PowerSeries>(&spec.kind)) return series_logderiv_tower(s->coefficients, z, M);
  auto L = tower_from_log_derivatives(log_derivatives(spec, z, M));
  for (const auto& v : L)
    if (!is_finite(v)) throw Error(ErrorCode::PoleOrZeroAt, "non-finite logarithmic derivative");
  return L;
}

bool in_tract(const FunctionSpec& spec, const TractSpec& tract, Complex z, int membership_probes) {
  const Real log_R = std::log(tract.R);
  auto above = [&](Complex p) {
    const Real lm = log_modulus(spec, p);
    if (std::isnan(lm) || lm == std::numeric_limits<Real>::infinity())
      throw Error(ErrorCode::TractViolation, "pole encountered inside the claimed tract");
    return lm > log_R;
  };
  if (!above(z)) return false;
  const Complex delta = z - tract.seed;
  for (int j = 0; j < membership_probes; ++j) {
    if (!above(tract.seed + delta * (static_cast<Real>(j) / membership_probes))) return false;
  }
  return true;
}

Real v_eval(const FunctionSpec& spec, const TractSpec& tract, Complex z, int membership_probes) {
  if (!(std::abs(z) < 1)) throw Error(ErrorCode::OutsideDisc, "v is defined on the unit disc only");
  const Real log_R = std::log(tract.R);
  const Real lm = log_modulus(spec, z);
  if (std::isnan(lm) || lm == std::numeric_limits<Real>::infinity()) {
    // A pole: outside U by definition unless the sampled path claims otherwise.
    const Complex delta = z - tract.seed;
    for (int j = 0; j < membership_probes; ++j) {
      const Real pm = log_modulus(spec, tract.seed + delta * (static_cast<Real>(j) / membership_probes));
      if (!(pm > log_R)) return 0;
    }
    throw Error(ErrorCode::TractViolation, "pole inside the claimed tract");
  }
  if (!(lm > log_R)) return 0;
  return in_tract(spec, tract, z, membership_probes) ? lm - log_R : 0;
}

Real GrowthOracle::B(Real r) const {
  Real lm = -log_R_;
  for (const auto& p : power_laws_) lm += -p.gamma * std::log1p(-r);
  for (const auto& e : exp_poles_) lm += e.c * std::pow(1 - r, -e.k);
  return std::max<Real>(0, lm);
}

Real GrowthOracle::a(Real r) const {
  if (B(r) <= 0) return 0;
  Real a = 0;
  for (const auto& p : power_laws_) a += p.gamma * r / (1 - r);
  for (const auto& e : exp_poles_) a += e.c * e.k * r * std::pow(1 - r, -e.k - 1);
  return a;
}

Real GrowthOracle::order() const {
  Real k = 0;
  for (const auto& e : exp_poles_) k = std::max(k, e.k);
  return k;
}

GrowthOracle catalog_oracle(const FunctionSpec& spec, Real R) {
  GrowthOracle o;
  collect_oracle_terms(spec, o.power_laws_, o.exp_poles_);
  o.log_R_ = std::log(R);
  return o;
}

std::vector<Complex> load_coefficients_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open coefficient file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ConfigError, "empty coefficient file " + path.string());
  {
    std::stringstream hs(line);
    std::string a, b, c;
    std::getline(hs, a, ',');
    std::getline(hs, b, ',');
    std::getline(hs, c, ',');
    if (trim(a) != "n" || trim(b) != "re" || trim(c) != "im")
      throw Error(ErrorCode::ConfigError, "coefficient CSV header must be n,re,im");
  }
  std::vector<Complex> coeffs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ls(line);
    std::string sn, sre, sim;
    std::getline(ls, sn, ',');
    std::getline(ls, sre, ',');
    std::getline(ls, sim, ',');
    try {
      const long n = std::stol(trim(sn));
      if (n < 0) throw std::invalid_argument("negative index");
      const auto idx = static_cast<std::size_t>(n);
      if (idx >= coeffs.size()) coeffs.resize(idx + 1, Complex(0));
      coeffs[idx] = Complex(std::stold(trim(sre)), std::stold(trim(sim)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: malformed coefficient row", path.string(), lineno));
    }
  }
  if (coeffs.empty()) throw Error(ErrorCode::ConfigError, "no coefficients in " + path.string());
  return coeffs;
}

}  // namespace wvlab
