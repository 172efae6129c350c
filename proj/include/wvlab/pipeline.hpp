// Orchestration of the growth, exceptional-set and verification stages for a
// RunConfig, artifact emission, and the `report` aggregation.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wvlab/config.hpp"
#include "wvlab/exceptional.hpp"
#include "wvlab/growth.hpp"
#include "wvlab/verifier.hpp"

namespace wvlab {

struct PipelineStatus {
  std::string name;
  bool pass = true;
  std::optional<std::string> skipped;
  std::string note;
};

struct RunResult {
  GrowthProfile profile;
  std::optional<ExceptionalSet> exceptional;
  std::optional<LocalBoundFit> local_bound;
  std::vector<VerificationReport> records;
  std::vector<VerificationReport> verdicts;
  std::vector<PipelineStatus> pipelines;
  bool pass = true;
};

// Runs the configured checks in memory. Stage failures other than the
// expected skips are rethrown as PipelineError naming the stage.
RunResult execute(const RunConfig& config, Execution exec = Execution::Parallel);

// execute() plus artifacts under config.output:
// profile.csv, profile.json, and when checks are requested exceptional.json,
// exceptional.csv, verification.jsonl, summary.csv, summary.json.
RunResult run(const RunConfig& config, Execution exec = Execution::Parallel);

// Verdicts for the growth stage: invariants and, for catalog functions, the
// closed-form comparison of B and a.
std::vector<VerificationReport> growth_verdicts(const RunConfig& config, const GrowthProfile& profile);

// Single-radius verification. thm1 and b1_control evaluate at r directly;
// thm2 and zero_order use the validated grid sample nearest to r.
std::vector<VerificationReport> verify_at(const RunConfig& config, CheckId check, Real r,
                                          Execution exec = Execution::Parallel);

struct CheckRate {
  std::string check;
  int q = 0;
  std::size_t records = 0;
  std::size_t passed = 0;
};

struct ReportResult {
  std::vector<CheckRate> rates;
  std::vector<VerificationReport> verdicts;
  bool pass = true;  // conjunction of the verdict pass flags
  std::string table_csv;
  std::string plot_csv;
};

// Reads profile.csv and verification.jsonl (exceptional.csv if present) from
// dir, writes report.csv and plot_data.csv there. MissingArtifact if inputs are absent.
ReportResult report(const std::filesystem::path& dir);

}  // namespace wvlab
