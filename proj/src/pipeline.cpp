#include "wvlab/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <tuple>

#include "wvlab/io.hpp"
#include "wvlab/parallel.hpp"

namespace wvlab {

namespace {

// Runs fn, rethrowing library errors as PipelineError tagged with the stage.
template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PipelineError) throw;
    throw Error(ErrorCode::PipelineError, fmt::format("stage {}: {}: {}", name, to_string(e.code()), e.what()));
  }
}

bool needs_exceptional(const RunConfig& c) {
  return c.wants(CheckId::Exceptional) || c.wants(CheckId::Thm1) || c.wants(CheckId::Thm2) ||
         c.wants(CheckId::ZeroOrder) || c.wants(CheckId::B1Control);
}

bool zero_order(const GrowthProfile& p, const VerifierOptions& o) {
  return p.order_estimate && *p.order_estimate < o.zero_order_max;
}

std::vector<VerificationReport> exceptional_verdicts(const GrowthProfile& profile, const ExceptionalSet& E,
                                                     const LocalBoundFit* fit, const VerifierOptions& opts) {
  std::vector<VerificationReport> out;
  VerificationReport cov;
  cov.check = "exceptional.measure_identity";
  for (const auto* set : {&E.l5, &E.l6, &E.l7, &E.union_set, &E.e_set})
    cov.max_rel_err = std::max(cov.max_rel_err, std::abs(set->log_measure - set->linear_measure));
  cov.tolerance = 1e-9L;
  cov.pass = cov.max_rel_err <= cov.tolerance;
  cov.note = "|log measure in r - linear measure in x| over all failure sets";
  out.push_back(cov);

  // eps(r) below a grid cell is the normal situation; it only goes into exceptional.json.

  const auto& smp = profile.samples;
  const std::size_t t0 = tail_start(smp.size(), opts.tail_fraction);
  VerificationReport reg;
  reg.check = "exceptional.tail_regularity";
  std::size_t ok = 0;
  for (std::size_t i = t0; i < smp.size(); ++i) ok += (!E.l5.failing[i] && !E.l6.failing[i]) ? 1 : 0;
  reg.max_rel_err = smp.size() > t0 ? static_cast<Real>(ok) / static_cast<Real>(smp.size() - t0) : 0;
  reg.tolerance = 0.9L;
  reg.pass = reg.max_rel_err > reg.tolerance;
  reg.note = "fraction of tail samples where both a(r +- eps) conditions hold";
  out.push_back(reg);

  const auto e2 = e2_integral_check(profile);
  VerificationReport integral;
  integral.check = "exceptional.e2_integral";
  integral.max_rel_err = e2.closed_form != 0 ? std::abs(e2.numeric - e2.closed_form) / std::abs(e2.closed_form) : 0;
  integral.secondary = e2.numeric;
  integral.tolerance = 0.02L;
  integral.pass = integral.max_rel_err <= integral.tolerance;
  integral.note = fmt::format("trapezoid {:.6g} against antiderivative {:.6g}", static_cast<double>(e2.numeric),
                              static_cast<double>(e2.closed_form));
  out.push_back(integral);

  if (fit) {
    VerificationReport lb;
    lb.check = "exceptional.local_bound";
    lb.max_rel_err = fit->l14.fraction_failing;
    lb.secondary = fit->c_fit;
    lb.tolerance = 0.05L;
    lb.pass = lb.max_rel_err <= lb.tolerance;
    lb.note = fmt::format("fraction of samples above twice the fitted constant {:.4g}", static_cast<double>(fit->c_fit));
    out.push_back(lb);

    std::vector<std::optional<Real>> tail(fit->phi_hat.begin() + static_cast<std::ptrdiff_t>(t0), fit->phi_hat.end());
    const auto trend = quartile_trend(tail, opts.trend_floor);
    VerificationReport ph;
    ph.check = "exceptional.phi_hat_trend";
    ph.pass = trend.non_increasing;
    ph.max_rel_err = trend.maxima[3].value_or(0);
    ph.note = "phi_hat quartile maxima along the tail must not increase";
    out.push_back(ph);
  }
  return out;
}

void add_status(RunResult& res, std::string name, const std::vector<VerificationReport>& verdicts,
                const std::optional<std::string>& skipped) {
  PipelineStatus st;
  st.name = std::move(name);
  st.skipped = skipped;
  for (const auto& v : verdicts) {
    st.pass = st.pass && v.pass;
    if (!v.pass) st.note += (st.note.empty() ? "" : "; ") + v.check + (v.q ? fmt::format(" q={}", v.q) : "");
  }
  if (!verdicts.empty() || skipped) {
    res.verdicts.insert(res.verdicts.end(), verdicts.begin(), verdicts.end());
  }
  res.pass = res.pass && st.pass;
  res.pipelines.push_back(std::move(st));
}

void add_sweep(RunResult& res, std::string name, SweepResult sweep) {
  res.records.insert(res.records.end(), sweep.records.begin(), sweep.records.end());
  add_status(res, std::move(name), sweep.verdicts, sweep.skipped);
}

std::string summary_json(const RunResult& res) {
  nlohmann::ordered_json j;
  j["pass"] = res.pass;
  j["order_estimate"] =
      res.profile.order_estimate ? nlohmann::ordered_json(static_cast<double>(*res.profile.order_estimate)) : nullptr;
  j["pipelines"] = nlohmann::ordered_json::array();
  for (const auto& st : res.pipelines) {
    nlohmann::ordered_json p;
    p["name"] = st.name;
    p["status"] = st.skipped ? "skipped" : (st.pass ? "pass" : "fail");
    if (st.skipped) p["reason"] = *st.skipped;
    if (!st.note.empty()) p["failing"] = st.note;
    j["pipelines"].push_back(p);
  }
  j["records"] = res.records.size();
  j["verdicts"] = res.verdicts.size();
  return j.dump(2) + "\n";
}

std::size_t nearest_index(const GrowthProfile& p, Real r) {
  if (p.samples.empty()) throw Error(ErrorCode::InsufficientData, "empty profile");
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.samples.size(); ++i)
    if (std::abs(p.samples[i].r - r) < std::abs(p.samples[best].r - r)) best = i;
  return best;
}

}  // namespace

std::vector<VerificationReport> growth_verdicts(const RunConfig& config, const GrowthProfile& profile) {
  std::vector<VerificationReport> out;
  const auto inv = check_invariants(profile);
  VerificationReport v;
  v.check = "growth.invariants";
  v.pass = inv.B_non_decreasing && inv.B_convex_in_log_r && inv.a_non_decreasing;
  v.max_rel_err = std::max<Real>(0, -inv.worst_convexity);
  v.note = fmt::format("B non-decreasing {}, B convex in log r {}, a non-decreasing {}", inv.B_non_decreasing,
                       inv.B_convex_in_log_r, inv.a_non_decreasing);
  if (!profile.samples.empty()) v.r = profile.samples.back().r;
  out.push_back(v);

  std::optional<GrowthOracle> oracle;
  try {
    oracle = catalog_oracle(config.function, config.tract.R);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoOracle) throw;
  }
  if (oracle) {
    VerificationReport b, a;
    b.check = "growth.oracle_B";
    a.check = "growth.oracle_a";
    b.tolerance = 1e-6L;
    a.tolerance = 0.02L;
    for (const auto& s : profile.samples) {
      const Real eb = std::abs(s.B - oracle->B(s.r)) / std::abs(oracle->B(s.r));
      const Real ea = std::abs(s.a - oracle->a(s.r)) / std::abs(oracle->a(s.r));
      if (eb >= b.max_rel_err) {
        b.max_rel_err = eb;
        b.r = s.r;
      }
      if (ea >= a.max_rel_err) {
        a.max_rel_err = ea;
        a.r = s.r;
      }
    }
    b.pass = b.max_rel_err <= b.tolerance;
    a.pass = a.max_rel_err <= a.tolerance;
    b.note = "max relative error of B against the closed form";
    a.note = "max relative error of a against the closed form";
    out.push_back(b);
    out.push_back(a);
  }
  return out;
}

RunResult execute(const RunConfig& cfg, Execution exec) {
  if (cfg.workers > 0) detail::set_worker_count(cfg.workers);
  RunResult res;
  res.profile = stage("growth", [&] { return build_profile(cfg.function, cfg.tract, cfg.params, cfg.grid, cfg.scan, exec); });
  const auto& prof = res.profile;
  VerifierOptions opts = cfg.verifier;
  opts.seed = cfg.seed;

  if (cfg.wants(CheckId::Growth)) add_status(res, "growth", stage("growth", [&] { return growth_verdicts(cfg, prof); }), std::nullopt);

  if (needs_exceptional(cfg)) res.exceptional = stage("exceptional", [&] { return e_set_failure(prof); });
  if (cfg.wants(CheckId::Exceptional)) {
    res.local_bound = stage("exceptional", [&] {
      return fit_local_bound(cfg.function, cfg.tract, prof, *res.exceptional, cfg.scan, exec);
    });
    add_status(res, "exceptional", exceptional_verdicts(prof, *res.exceptional, &*res.local_bound, opts), std::nullopt);
  }
  const LocalBoundFit* lb = res.local_bound ? &*res.local_bound : nullptr;

  if (cfg.wants(CheckId::Thm1))
    add_sweep(res, "thm1", stage("thm1", [&] {
                return theorem1_sweep(cfg.function, cfg.tract, prof, *res.exceptional, lb, opts, exec);
              }));
  if (cfg.wants(CheckId::Thm2)) {
    add_sweep(res, "thm2",
              stage("thm2", [&] { return theorem2_sweep(cfg.function, prof, *res.exceptional, opts, exec); }));
  } else {
    add_status(res, "thm2", {}, zero_order(prof, opts) ? "order 0" : "not requested");
  }
  if (cfg.wants(CheckId::ZeroOrder))
    add_sweep(res, "zero_order",
              stage("zero_order", [&] { return zero_order_sweep(cfg.function, prof, *res.exceptional, opts, exec); }));
  if (cfg.wants(CheckId::B1Control)) {
    if (zero_order(prof, opts)) {
      add_sweep(res, "b1_control",
                stage("b1_control", [&] { return b1_control_sweep(cfg.function, prof, *res.exceptional, opts); }));
    } else {
      add_status(res, "b1_control", {}, "the control applies to zero-order functions only");
    }
  }
  if (cfg.wants(CheckId::Recurrence))
    add_sweep(res, "recurrence",
              stage("recurrence", [&] { return recurrence_sweep(cfg.function, cfg.recurrence_q_max, opts); }));
  if (cfg.wants(CheckId::Classical))
    add_sweep(res, "classical", stage("classical", [&] {
                return classical_sweep(cfg.classical->coefficients, cfg.classical->radii, cfg.params.M, opts);
              }));
  std::stable_sort(res.records.begin(), res.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.check, a.r, a.q) < std::tie(b.check, b.r, b.q);
  });
  return res;
}

RunResult run(const RunConfig& cfg, Execution exec) {
  RunResult res = execute(cfg, exec);
  const auto& dir = cfg.output;
  std::filesystem::create_directories(dir);
  write_text(dir / "profile.csv", profile_csv(res.profile));
  write_text(dir / "profile.json", profile_json(res.profile, cfg.function, check_invariants(res.profile)));
  if (cfg.checks.empty()) return res;

  if (res.exceptional) {
    const LocalBoundFit* lb = res.local_bound ? &*res.local_bound : nullptr;
    write_text(dir / "exceptional.json", exceptional_json(res.profile, *res.exceptional, lb));
    write_text(dir / "exceptional.csv", exceptional_csv(res.profile, *res.exceptional, lb));
  }
  std::string lines;
  for (const auto& r : res.records) lines += report_json(r, "record") + "\n";
  for (const auto& v : res.verdicts) lines += report_json(v, "verdict") + "\n";
  write_text(dir / "verification.jsonl", lines);
  write_text(dir / "summary.csv", summary_csv(res.verdicts));
  write_text(dir / "summary.json", summary_json(res));
  return res;
}

std::vector<VerificationReport> verify_at(const RunConfig& cfg, CheckId check, Real r, Execution exec) {
  VerifierOptions opts = cfg.verifier;
  opts.seed = cfg.seed;
  const Real step = cfg.grid.span / (cfg.grid.points - 1);
  switch (check) {
    case CheckId::Thm1:
    case CheckId::B1Control: {
      const auto g = compute_sample(cfg.function, cfg.tract, r, cfg.params, step, cfg.scan);
      if (!(g.a >= 2)) throw Error(ErrorCode::DomainError, "a(r) < 2: radius below the validated range");
      if (check == CheckId::B1Control) return {b1_control(cfg.function, g, opts)};
      const Real phi = phi_hat(cfg.function, cfg.tract, g, cfg.scan);
      auto out = std::vector<VerificationReport>{tract_disc_check(cfg.function, cfg.tract, g.r, g.z_r(), g.sigma()),
                                                 monomial_check(cfg.function, g.r, g.z_r(), g.a, g.sigma(), phi, opts),
                                                 logderiv_check(cfg.function, g.r, g.z_r(), g.a, g.sigma(), 1, opts)};
      for (auto& rep : out) rep.a_eps = g.a * g.eps;
      return out;
    }
    case CheckId::Thm2:
    case CheckId::ZeroOrder: {
      const auto prof = build_profile(cfg.function, cfg.tract, cfg.params, cfg.grid, cfg.scan, exec);
      const auto E = e_set_failure(prof);
      const std::size_t i = nearest_index(prof, r);
      if (E.in_e[i]) throw Error(ErrorCode::ExceptionalRadius, "nearest grid radius lies in the exceptional set");
      if (check == CheckId::ZeroOrder) {
        auto sweep = zero_order_sweep(cfg.function, prof, E, opts, exec);
        if (sweep.skipped) throw Error(ErrorCode::NotZeroOrder, *sweep.skipped);
        std::vector<VerificationReport> out;
        for (auto& rep : sweep.records)
          if (rep.index == i) out.push_back(rep);
        return out;
      }
      const auto& s = prof.samples;
      for (std::size_t n = i + 1; n-- > 0;) {
        try {
          const auto w = positive_order_window(prof, s[n].r, opts.window_threshold);
          if (w.r_n_prime < s[i].r) break;
          auto out = higher_logderiv_check(cfg.function, w, s[i], false, cfg.params.M, opts);
          for (auto& rep : out) rep.index = i;
          return out;
        } catch (const WindowRejectedError&) {
        }
      }
      throw Error(ErrorCode::WindowRejected, "no accepted window contains the radius");
    }
    case CheckId::Classical: {
      if (!cfg.classical) throw Error(ErrorCode::ConfigError, "no 'classical' section in the config");
      return classical_asym_check(cfg.classical->coefficients, r, cfg.params.M, opts);
    }
    case CheckId::Recurrence:
      return recurrence_check(cfg.function, cfg.recurrence_q_max, opts);
    case CheckId::Growth:
    case CheckId::Exceptional:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("check '{}' has no single-radius form", to_string(check)));
}

ReportResult report(const std::filesystem::path& dir) {
  const CsvTable profile = parse_csv(read_text(dir / "profile.csv"));
  const auto tagged = parse_report_lines(read_text(dir / "verification.jsonl"));
  std::optional<CsvTable> exc;
  if (std::filesystem::exists(dir / "exceptional.csv")) exc = parse_csv(read_text(dir / "exceptional.csv"));

  ReportResult out;
  std::map<std::pair<std::string, int>, std::size_t> slot;
  // per-record error columns, keyed by column name, indexed by profile row
  std::vector<std::string> columns{"err_con1", "err_20", "err_b1_q2"};
  std::map<std::string, std::map<std::size_t, Real>> errs;
  for (const auto& t : tagged) {
    const auto& r = t.report;
    if (t.kind == "verdict") {
      out.verdicts.push_back(r);
      out.pass = out.pass && r.pass;
      continue;
    }
    const auto key = std::make_pair(r.check, r.q);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, out.rates.size()).first;
      out.rates.push_back({r.check, r.q, 0, 0});
    }
    auto& rate = out.rates[it->second];
    ++rate.records;
    rate.passed += r.pass ? 1 : 0;

    if (!r.index) continue;
    std::string col;
    if (r.check == "thm1.logderiv") col = "err_con1";
    else if (r.check == "thm1.monomial") col = "err_20";
    else if (r.check == "b1_control" && r.q == 2) col = "err_b1_q2";
    else {
      col = "err_" + r.check + "_q" + std::to_string(r.q);
      std::replace(col.begin(), col.end(), '.', '_');
      if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    }
    errs[col][*r.index] = r.max_rel_err;
  }

  out.table_csv = "check,q,records,passed,pass_rate\n";
  for (const auto& rate : out.rates)
    out.table_csv += fmt::format("{},{},{},{},{}\n", rate.check, rate.q, rate.records, rate.passed,
                                 format_real(static_cast<Real>(rate.passed) / static_cast<Real>(rate.records)));
  for (const auto& v : out.verdicts)
    out.table_csv += fmt::format("verdict:{},{},,{},\n", v.check, v.q, v.pass ? 1 : 0);

  auto col_of = [&](const CsvTable& t, std::string_view name) {
    const auto c = t.column(name);
    if (!c) throw Error(ErrorCode::MissingArtifact, fmt::format("column {} missing from profile", name));
    return *c;
  };
  const std::size_t cx = col_of(profile, "x"), cr = col_of(profile, "r"), cB = col_of(profile, "B"),
                    ca = col_of(profile, "a"), ce = col_of(profile, "eps");
  const std::optional<std::size_t> cin = exc ? exc->column("in_E") : std::nullopt;

  out.plot_csv = "x,r,B,a,eps,in_E";
  for (const auto& c : columns) out.plot_csv += "," + c;
  out.plot_csv += "\n";
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& row = profile.rows[i];
    out.plot_csv += fmt::format("{},{},{},{},{},", row[cx], row[cr], row[cB], row[ca], row[ce]);
    if (cin && i < exc->rows.size()) out.plot_csv += exc->rows[i][*cin];
    for (const auto& c : columns) {
      out.plot_csv += ",";
      const auto& m = errs[c];
      if (auto it = m.find(i); it != m.end()) out.plot_csv += format_real(it->second);
    }
    out.plot_csv += "\n";
  }
  write_text(dir / "report.csv", out.table_csv);
  write_text(dir / "plot_data.csv", out.plot_csv);
  return out;
}

}  // namespace wvlab
