#include "wvlab/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace wvlab {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<CheckId, std::string_view>, 8> kChecks{{
    {CheckId::Growth, "growth"},
    {CheckId::Exceptional, "exceptional"},
    {CheckId::Thm1, "thm1"},
    {CheckId::Thm2, "thm2"},
    {CheckId::ZeroOrder, "zero_order"},
    {CheckId::B1Control, "b1_control"},
    {CheckId::Recurrence, "recurrence"},
    {CheckId::Classical, "classical"},
}};

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void only_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) bad(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      bad(fmt::format("unknown key '{}' in {}", key, where));
}

Real real_of(const json& j, std::string_view name) {
  if (!j.is_number()) bad(fmt::format("'{}' must be a number", name));
  return static_cast<Real>(j.get<double>());
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, Real>) {
    out = real_of(v, key);
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad(fmt::format("'{}' must be an integer", key));
    if constexpr (std::is_unsigned_v<T>) {
      if (v.get<long long>() < 0) bad(fmt::format("'{}' must be non-negative", key));
    }
    out = v.get<T>();
  } else {
    out = v.get<T>();
  }
}

Complex complex_of(const json& j, std::string_view name) {
  if (j.is_number()) return {real_of(j, name), 0};
  if (j.is_array() && j.size() == 2) return {real_of(j[0], name), real_of(j[1], name)};
  bad(fmt::format("'{}' must be a number or a [re, im] pair", name));
}

std::vector<Complex> coefficients_of(const json& j, const std::filesystem::path& base_dir) {
  const int given = (j.contains("coefficients") ? 1 : 0) + (j.contains("coefficients_csv") ? 1 : 0) +
                    (j.contains("exp_degree") ? 1 : 0);
  if (given != 1) bad("a power series needs exactly one of coefficients, coefficients_csv, exp_degree");
  if (j.contains("coefficients")) {
    const json& c = j.at("coefficients");
    if (!c.is_array() || c.empty()) bad("'coefficients' must be a non-empty array");
    std::vector<Complex> out;
    for (const auto& e : c) out.push_back(complex_of(e, "coefficients"));
    return out;
  }
  if (j.contains("coefficients_csv")) {
    std::filesystem::path p = j.at("coefficients_csv").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return load_coefficients_csv(p);
  }
  const json& d = j.at("exp_degree");
  if (!d.is_number_integer() || d.get<long long>() < 1) bad("'exp_degree' must be a positive integer");
  return exp_coefficients(d.get<std::size_t>() + 1);
}

FunctionSpec function_of(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("kind")) bad("function needs a 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "power_law") {
    only_keys(j, "function", {"kind", "gamma"});
    Real gamma = 1;
    read(j, "gamma", gamma);
    return FunctionSpec::power_law(gamma);
  }
  if (kind == "exp_pole") {
    only_keys(j, "function", {"kind", "c", "k"});
    Real c = 1, k = 1;
    read(j, "c", c);
    read(j, "k", k);
    return FunctionSpec::exp_pole(c, k);
  }
  if (kind == "power_series") {
    only_keys(j, "function", {"kind", "coefficients", "coefficients_csv", "exp_degree"});
    return FunctionSpec::power_series(coefficients_of(j, base_dir));
  }
  if (kind == "product") {
    only_keys(j, "function", {"kind", "factors"});
    if (!j.contains("factors") || !j.at("factors").is_array()) bad("product needs a 'factors' array");
    std::vector<FunctionSpec> factors;
    for (const auto& f : j.at("factors")) factors.push_back(function_of(f, base_dir));
    return FunctionSpec::product(std::move(factors));
  }
  bad(fmt::format("unknown function kind '{}'", kind));
}

void read_verifier(const json& j, VerifierOptions& v) {
  only_keys(j, "tolerances",
            {"tol_floor", "C_g", "path_steps", "trend_floor", "tail_fraction", "min_pass_rate", "a_eps_min",
             "window_threshold", "zero_order_max", "zero_order_o1", "zero_order_slack", "negative_control_floor",
             "classical_gamma", "classical_tol", "classical_pass_rate", "recurrence_probes", "recurrence_tol",
             "recurrence_radius"});
  read(j, "tol_floor", v.tol_floor);
  read(j, "C_g", v.C_g);
  read(j, "path_steps", v.path_steps);
  read(j, "trend_floor", v.trend_floor);
  read(j, "tail_fraction", v.tail_fraction);
  read(j, "min_pass_rate", v.min_pass_rate);
  read(j, "a_eps_min", v.a_eps_min);
  read(j, "window_threshold", v.window_threshold);
  read(j, "zero_order_max", v.zero_order_max);
  read(j, "zero_order_o1", v.zero_order_o1);
  read(j, "zero_order_slack", v.zero_order_slack);
  read(j, "negative_control_floor", v.negative_control_floor);
  read(j, "classical_gamma", v.classical_gamma);
  read(j, "classical_tol", v.classical_tol);
  read(j, "classical_pass_rate", v.classical_pass_rate);
  read(j, "recurrence_probes", v.recurrence_probes);
  read(j, "recurrence_tol", v.recurrence_tol);
  read(j, "recurrence_radius", v.recurrence_radius);
  if (!(v.tail_fraction >= 0 && v.tail_fraction < 1)) bad("tail_fraction must lie in [0, 1)");
  if (!(v.recurrence_radius > 0 && v.recurrence_radius < 1)) bad("recurrence_radius must lie in (0, 1)");
  if (v.recurrence_probes < 1 || v.path_steps < 1) bad("probe and step counts must be positive");
}

}  // namespace

std::string_view to_string(CheckId id) {
  for (const auto& [k, name] : kChecks)
    if (k == id) return name;
  return "?";
}

CheckId parse_check(std::string_view id) {
  for (const auto& [k, name] : kChecks)
    if (name == id) return k;
  bad(fmt::format("unknown check id '{}'", id));
}

std::vector<CheckId> parse_check_list(std::string_view ids) {
  std::vector<CheckId> out;
  std::size_t pos = 0;
  while (pos <= ids.size()) {
    const std::size_t comma = std::min(ids.find(',', pos), ids.size());
    const auto item = ids.substr(pos, comma - pos);
    if (!item.empty()) {
      const CheckId c = parse_check(item);
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    pos = comma + 1;
  }
  return out;
}

bool RunConfig::wants(CheckId id) const { return std::find(checks.begin(), checks.end(), id) != checks.end(); }

std::vector<Complex> exp_coefficients(std::size_t count) {
  std::vector<Complex> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = std::exp(-std::lgamma(static_cast<Real>(n) + 1));
  return out;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(fmt::format("malformed config: {}", e.what()));
  }
  RunConfig cfg;
  try {
    only_keys(j, "config",
              {"function", "tract", "params", "grid", "scan", "tolerances", "checks", "output", "seed", "recurrence",
               "classical", "workers"});
    if (!j.contains("function")) bad("config needs a 'function'");
    cfg.function = function_of(j.at("function"), base_dir);

    if (j.contains("tract")) {
      const json& t = j.at("tract");
      only_keys(t, "tract", {"R", "seed"});
      read(t, "R", cfg.tract.R);
      if (t.contains("seed")) cfg.tract.seed = complex_of(t.at("seed"), "seed");
    }
    if (j.contains("params")) {
      const json& p = j.at("params");
      only_keys(p, "params", {"r0", "beta", "delta", "rho0", "M"});
      read(p, "r0", cfg.params.r0);
      read(p, "beta", cfg.params.beta);
      read(p, "delta", cfg.params.delta);
      if (p.contains("rho0") && !p.at("rho0").is_null()) cfg.params.rho0 = real_of(p.at("rho0"), "rho0");
      read(p, "M", cfg.params.M);
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      only_keys(g, "grid", {"span", "points"});
      read(g, "span", cfg.grid.span);
      read(g, "points", cfg.grid.points);
    }
    if (j.contains("scan")) {
      const json& s = j.at("scan");
      only_keys(s, "scan", {"samples", "theta_tol", "refine_peaks", "membership_probes"});
      read(s, "samples", cfg.scan.samples);
      read(s, "theta_tol", cfg.scan.theta_tol);
      read(s, "refine_peaks", cfg.scan.refine_peaks);
      read(s, "membership_probes", cfg.scan.membership_probes);
    }
    if (j.contains("tolerances")) read_verifier(j.at("tolerances"), cfg.verifier);
    if (j.contains("checks")) {
      const json& c = j.at("checks");
      if (!c.is_array()) bad("'checks' must be an array of ids");
      for (const auto& id : c) {
        const CheckId k = parse_check(id.get<std::string>());
        if (!cfg.wants(k)) cfg.checks.push_back(k);
      }
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    read(j, "seed", cfg.seed);
    read(j, "workers", cfg.workers);
    if (j.contains("recurrence")) {
      const json& r = j.at("recurrence");
      only_keys(r, "recurrence", {"q_max"});
      read(r, "q_max", cfg.recurrence_q_max);
    }
    if (j.contains("classical")) {
      const json& c = j.at("classical");
      only_keys(c, "classical", {"coefficients", "coefficients_csv", "exp_degree", "radii"});
      ClassicalConfig cc;
      cc.coefficients = coefficients_of(c, base_dir);
      if (!c.contains("radii") || !c.at("radii").is_array()) bad("classical needs a 'radii' array");
      for (const auto& r : c.at("radii")) cc.radii.push_back(real_of(r, "radii"));
      cfg.classical = std::move(cc);
    }
  } catch (const json::exception& e) {
    bad(fmt::format("invalid config value: {}", e.what()));
  }

  cfg.verifier.seed = cfg.seed;
  cfg.verifier.beta = cfg.params.beta;
  cfg.verifier.delta = cfg.params.delta;
  try {
    validate(cfg.params);
    validate(cfg.function, cfg.tract);
  } catch (const Error& e) {
    bad(e.what());
  }
  if (!(cfg.grid.span > 0) || cfg.grid.points < 16) bad("grid needs span > 0 and at least 16 points");
  if (cfg.scan.samples < 16 || cfg.scan.membership_probes < 1 || cfg.scan.refine_peaks < 1)
    bad("scan counts out of range");
  if (cfg.recurrence_q_max < 1) bad("recurrence q_max must be >= 1");
  if (cfg.wants(CheckId::Classical) && !cfg.classical) bad("check 'classical' needs a 'classical' section");
  if (cfg.workers < 0) bad("workers must be >= 0");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, fmt::format("cannot read config {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace wvlab
