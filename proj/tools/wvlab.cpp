// Command-line front end: growth profiles, exceptional sets, verification
// sweeps, classical checks, full runs and report aggregation.
#include <fmt/format.h>

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "wvlab/config.hpp"
#include "wvlab/io.hpp"
#include "wvlab/parallel.hpp"
#include "wvlab/pipeline.hpp"

using namespace wvlab;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

struct Common {
  std::string config;
  std::string out;
  std::string checks;
  std::optional<double> r;
  std::optional<int> grid_points;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  bool serial = false;
};

void add_common(CLI::App* app, Common& c, bool with_checks, bool with_r) {
  app->add_option("--config", c.config, "run configuration (JSON)")->required()->envname("WVLAB_CONFIG");
  app->add_option("--out", c.out, "output file or directory")->envname("WVLAB_OUT");
  if (with_checks) app->add_option("--check", c.checks, "check ids, comma separated")->envname("WVLAB_CHECK");
  if (with_r) app->add_option("--r", c.r, "single radius")->envname("WVLAB_R");
  app->add_option("--grid-points", c.grid_points, "grid points")->envname("WVLAB_GRID_POINTS");
  app->add_option("--workers", c.workers, "worker threads")->envname("WVLAB_WORKERS");
  app->add_option("--seed", c.seed, "seed for randomized probes")->envname("WVLAB_SEED");
  app->add_flag("--serial", c.serial, "use the serial reference kernels");
}

RunConfig load(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (c.grid_points) cfg.grid.points = *c.grid_points;
  if (c.workers) cfg.workers = *c.workers;
  if (c.seed) cfg.seed = cfg.verifier.seed = *c.seed;
  if (!c.checks.empty()) cfg.checks = parse_check_list(c.checks);
  if (cfg.grid.points < 16) throw Error(ErrorCode::ConfigError, "grid needs at least 16 points");
  if (cfg.workers < 0) throw Error(ErrorCode::ConfigError, "workers must be >= 0");
  return cfg;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

int print_verdicts(const std::vector<VerificationReport>& verdicts) {
  bool pass = true;
  for (const auto& v : verdicts) {
    pass = pass && v.pass;
    fmt::print("{:<32} {}  {}\n", v.check + (v.q ? fmt::format(" q={}", v.q) : ""), v.pass ? "PASS" : "FAIL", v.note);
  }
  return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiman-Valiron lab: growth indicators and local asymptotics of functions in the unit disc"};
  app.require_subcommand(1);

  Common growth_opts, exc_opts, verify_opts, classical_opts, run_opts;
  std::string report_dir;
  auto* growth = app.add_subcommand("growth", "compute the growth profile (CSV)");
  add_common(growth, growth_opts, false, false);
  auto* exceptional = app.add_subcommand("exceptional", "compute the exceptional set (JSON, or CSV for a .csv path)");
  add_common(exceptional, exc_opts, false, false);
  auto* verify = app.add_subcommand("verify", "run verification checks, over the grid or at one radius");
  add_common(verify, verify_opts, true, true);
  auto* classical = app.add_subcommand("classical", "maximum-term checks for an entire power series");
  add_common(classical, classical_opts, false, true);
  auto* run_cmd = app.add_subcommand("run", "full pipeline with all artifacts");
  add_common(run_cmd, run_opts, true, false);
  auto* report_cmd = app.add_subcommand("report", "aggregate the artifacts of an earlier run");
  report_cmd->add_option("--dir", report_dir, "run output directory")->required()->envname("WVLAB_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    const auto exec_of = [](const Common& c) { return c.serial ? Execution::Serial : Execution::Parallel; };

    if (*growth) {
      const auto cfg = load(growth_opts);
      if (cfg.workers > 0) detail::set_worker_count(cfg.workers);
      const auto prof = build_profile(cfg.function, cfg.tract, cfg.params, cfg.grid, cfg.scan, exec_of(growth_opts));
      emit(growth_opts.out, profile_csv(prof));
      return kPass;
    }
    if (*exceptional) {
      const auto cfg = load(exc_opts);
      if (cfg.workers > 0) detail::set_worker_count(cfg.workers);
      const auto prof = build_profile(cfg.function, cfg.tract, cfg.params, cfg.grid, cfg.scan, exec_of(exc_opts));
      const auto E = e_set_failure(prof);
      const bool csv = exc_opts.out.size() > 4 && exc_opts.out.ends_with(".csv");
      emit(exc_opts.out, csv ? exceptional_csv(prof, E, nullptr) : exceptional_json(prof, E, nullptr));
      return kPass;
    }
    if (*verify) {
      auto cfg = load(verify_opts);
      if (cfg.checks.empty()) throw Error(ErrorCode::ConfigError, "no checks requested");
      if (verify_opts.r) {
        std::string lines;
        bool pass = true;
        for (const CheckId id : cfg.checks)
          for (const auto& rep : verify_at(cfg, id, static_cast<Real>(*verify_opts.r), exec_of(verify_opts))) {
            lines += report_json(rep, "record") + "\n";
            pass = pass && rep.pass;
          }
        emit(verify_opts.out, lines);
        return pass ? kPass : kFail;
      }
      const auto res = execute(cfg, exec_of(verify_opts));
      if (!verify_opts.out.empty()) {
        std::string lines;
        for (const auto& r : res.records) lines += report_json(r, "record") + "\n";
        for (const auto& v : res.verdicts) lines += report_json(v, "verdict") + "\n";
        write_text(verify_opts.out, lines);
      }
      return print_verdicts(res.verdicts);
    }
    if (*classical) {
      auto cfg = load(classical_opts);
      if (!cfg.classical) throw Error(ErrorCode::ConfigError, "no 'classical' section in the config");
      if (classical_opts.r) cfg.classical->radii = {static_cast<Real>(*classical_opts.r)};
      const auto sweep = classical_sweep(cfg.classical->coefficients, cfg.classical->radii, cfg.params.M, cfg.verifier);
      std::string lines;
      for (const auto& r : sweep.records) lines += report_json(r, "record") + "\n";
      for (const auto& v : sweep.verdicts) lines += report_json(v, "verdict") + "\n";
      emit(classical_opts.out, lines);
      if (!classical_opts.out.empty()) return print_verdicts(sweep.verdicts);
      bool pass = true;
      for (const auto& v : sweep.verdicts) pass = pass && v.pass;
      return pass ? kPass : kFail;
    }
    if (*run_cmd) {
      auto cfg = load(run_opts);
      if (!run_opts.out.empty()) cfg.output = run_opts.out;
      const auto res = run(cfg, exec_of(run_opts));
      for (const auto& st : res.pipelines) {
        if (st.skipped) {
          fmt::print("{}: skipped ({})\n", st.name, *st.skipped);
        } else {
          fmt::print("{}: {}{}\n", st.name, st.pass ? "pass" : "fail", st.note.empty() ? "" : "  [" + st.note + "]");
        }
      }
      fmt::print("overall: {}\n", res.pass ? "PASS" : "FAIL");
      return res.pass ? kPass : kFail;
    }
    if (*report_cmd) {
      const auto rep = report(report_dir);
      fmt::print("{:<32} {:>4} {:>8} {:>8} {:>9}\n", "check", "q", "records", "passed", "rate");
      for (const auto& r : rep.rates)
        fmt::print("{:<32} {:>4} {:>8} {:>8} {:>9.4f}\n", r.check, r.q, r.records, r.passed,
                   static_cast<double>(r.passed) / static_cast<double>(r.records));
      fmt::print("\n");
      print_verdicts(rep.verdicts);
      fmt::print("overall: {}\n", rep.pass ? "PASS" : "FAIL");
      return rep.pass ? kPass : kFail;
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::InvalidSpec:
      case ErrorCode::InvalidArgument:
      case ErrorCode::MissingArtifact:
        return kConfig;
      default:
        return kFail;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFail;
  }
  return kConfig;
}
