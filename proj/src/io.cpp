#include "wvlab/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace wvlab {

namespace {

using nlohmann::ordered_json;

// JSON has no inf/nan; those are written as strings.
ordered_json num(Real v) {
  const auto d = static_cast<double>(v);
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  return d;
}

Real num_of(const ordered_json& j) {
  if (j.is_number()) return static_cast<Real>(j.get<double>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<Real>::infinity();
    if (s == "-inf") return -std::numeric_limits<Real>::infinity();
    if (s == "nan") return std::numeric_limits<Real>::quiet_NaN();
  }
  throw Error(ErrorCode::ConfigError, "malformed number in report");
}

ordered_json set_json(const FailureSetReport& rep) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : rep.cells) cells.push_back({num(c.r_lo), num(c.r_hi)});
  return {{"id", std::string(to_string(rep.id))},
          {"cells_r", cells},
          {"cell_count", rep.cells.size()},
          {"linear_measure", num(rep.linear_measure)},
          {"log_measure", num(rep.log_measure)},
          {"fraction_failing", num(rep.fraction_failing)}};
}

}  // namespace

std::string format_real(Real v) {
  const auto d = static_cast<double>(v);
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  return fmt::format("{}", d);
}

std::string profile_csv(const GrowthProfile& profile) {
  std::string out = "r,x,B,theta_r,a,eps,suspect\n";
  for (const auto& s : profile.samples)
    out += fmt::format("{},{},{},{},{},{},{}\n", format_real(s.r), format_real(s.x), format_real(s.B),
                       format_real(s.theta), format_real(s.a), format_real(s.eps), s.suspect ? 1 : 0);
  return out;
}

std::string profile_json(const GrowthProfile& profile, const FunctionSpec& spec, const ProfileInvariants& inv) {
  const auto& p = profile.params;
  ordered_json j;
  j["function"] = spec.describe();
  j["params"] = {{"r0", num(p.r0)},
                 {"beta", num(p.beta)},
                 {"delta", num(p.delta)},
                 {"rho0", p.rho0 ? num(*p.rho0) : ordered_json()},
                 {"M", p.M}};
  j["grid"] = {{"span", num(profile.grid.span)},
               {"points", profile.grid.points},
               {"x_start", num(profile.x_start)},
               {"step", num(profile.grid_step)},
               {"first_validated_index", profile.first_grid_index}};
  j["samples"] = profile.samples.size();
  j["order_estimate"] = profile.order_estimate ? num(*profile.order_estimate) : ordered_json();
  std::size_t suspect = 0;
  for (const auto& s : profile.samples) suspect += s.suspect ? 1 : 0;
  j["suspect_samples"] = suspect;
  j["invariants"] = {{"B_non_decreasing", inv.B_non_decreasing},
                     {"B_convex_in_log_r", inv.B_convex_in_log_r},
                     {"a_non_decreasing", inv.a_non_decreasing},
                     {"worst_convexity", num(inv.worst_convexity)}};
  return j.dump(2) + "\n";
}

std::string exceptional_csv(const GrowthProfile& profile, const ExceptionalSet& E, const LocalBoundFit* fit) {
  std::string out = fit ? "r,x,L5,L6,L7,in_E,phi_hat,bound_ratio\n" : "r,x,L5,L6,L7,in_E\n";
  for (std::size_t i = 0; i < profile.samples.size(); ++i) {
    const auto& s = profile.samples[i];
    out += fmt::format("{},{},{},{},{},{}", format_real(s.r), format_real(s.x), E.l5.failing[i] ? 1 : 0,
                       E.l6.failing[i] ? 1 : 0, E.l7.failing[i] ? 1 : 0, E.in_e[i] ? 1 : 0);
    if (fit) {
      out += ",";
      if (fit->phi_hat[i]) out += format_real(*fit->phi_hat[i]);
      out += ",";
      if (fit->bound_ratio[i]) out += format_real(*fit->bound_ratio[i]);
    }
    out += "\n";
  }
  return out;
}

std::string exceptional_json(const GrowthProfile& profile, const ExceptionalSet& E, const LocalBoundFit* fit) {
  ordered_json j;
  const auto& s = profile.samples;
  j["initial_segment"] = {num(s.front().r), E.initial_end < s.size() ? num(s[E.initial_end].r) : num(s.back().r)};
  j["grid_too_coarse"] = E.grid_too_coarse;
  j["coarse_fraction"] = num(E.coarse_fraction);
  j["sets"] = ordered_json::array({set_json(E.l5), set_json(E.l6), set_json(E.l7), set_json(E.union_set),
                                   set_json(E.e_set)});
  const auto e2 = e2_integral_check(profile);
  j["e2_integral"] = {{"numeric", num(e2.numeric)}, {"closed_form", num(e2.closed_form)}};
  if (fit) j["local_bound"] = {{"c_fit", num(fit->c_fit)}, {"l14", set_json(fit->l14)}};
  return j.dump(2) + "\n";
}

std::string report_json(const VerificationReport& rep, std::string_view kind) {
  ordered_json j;
  j["kind"] = std::string(kind);
  j["check"] = rep.check;
  j["r"] = num(rep.r);
  j["index"] = rep.index ? ordered_json(*rep.index) : ordered_json();
  j["q"] = rep.q;
  j["disc_radius"] = num(rep.disc_radius);
  j["probes"] = rep.probes;
  j["max_rel_err"] = num(rep.max_rel_err);
  j["secondary"] = num(rep.secondary);
  j["tolerance"] = num(rep.tolerance);
  j["pass"] = rep.pass;
  j["worst_probe"] = {num(rep.worst_probe.real()), num(rep.worst_probe.imag())};
  j["a_eps"] = num(rep.a_eps);
  j["note"] = rep.note;
  return j.dump();
}

std::vector<TaggedReport> parse_report_lines(std::string_view text) {
  std::vector<TaggedReport> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = ordered_json::parse(line);
      TaggedReport t;
      t.kind = j.at("kind").get<std::string>();
      auto& r = t.report;
      r.check = j.at("check").get<std::string>();
      r.r = num_of(j.at("r"));
      if (!j.at("index").is_null()) r.index = j.at("index").get<std::size_t>();
      r.q = j.at("q").get<int>();
      r.disc_radius = num_of(j.at("disc_radius"));
      r.probes = j.at("probes").get<int>();
      r.max_rel_err = num_of(j.at("max_rel_err"));
      r.secondary = num_of(j.at("secondary"));
      r.tolerance = num_of(j.at("tolerance"));
      r.pass = j.at("pass").get<bool>();
      r.worst_probe = {num_of(j.at("worst_probe")[0]), num_of(j.at("worst_probe")[1])};
      r.a_eps = num_of(j.at("a_eps"));
      r.note = j.at("note").get<std::string>();
      out.push_back(std::move(t));
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorCode::ConfigError, fmt::format("malformed report line: {}", e.what()));
    }
  }
  return out;
}

std::string summary_csv(std::span<const VerificationReport> reports) {
  std::string out = "check,r,q,max_rel_err,pass\n";
  for (const auto& r : reports)
    out += fmt::format("{},{},{},{},{}\n", r.check, format_real(r.r), r.q, format_real(r.max_rel_err), r.pass ? 1 : 0);
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ConfigError, fmt::format("cannot write {}", path.string()));
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingArtifact, fmt::format("missing artifact {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

}  // namespace wvlab
