// Artifact serialisation. Numbers are written as the shortest decimal that
// round-trips the double value, so output is reproducible byte for byte.
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wvlab/exceptional.hpp"
#include "wvlab/growth.hpp"
#include "wvlab/verifier.hpp"

namespace wvlab {

std::string format_real(Real v);

// r,x,B,theta_r,a,eps,suspect
std::string profile_csv(const GrowthProfile& profile);
std::string profile_json(const GrowthProfile& profile, const FunctionSpec& spec, const ProfileInvariants& inv);

// r,x,L5,L6,L7,in_E[,phi_hat,bound_ratio]
std::string exceptional_csv(const GrowthProfile& profile, const ExceptionalSet& E, const LocalBoundFit* fit);
std::string exceptional_json(const GrowthProfile& profile, const ExceptionalSet& E, const LocalBoundFit* fit);

// One JSON object per line; kind is "record" or "verdict".
std::string report_json(const VerificationReport& rep, std::string_view kind);
struct TaggedReport {
  std::string kind;
  VerificationReport report;
};
// MissingArtifact-free parser for verification JSON lines; ConfigError on malformed lines.
std::vector<TaggedReport> parse_report_lines(std::string_view text);

// check,r,q,max_rel_err,pass
std::string summary_csv(std::span<const VerificationReport> reports);

void write_text(const std::filesystem::path& path, std::string_view text);
// MissingArtifact when the file does not exist.
std::string read_text(const std::filesystem::path& path);

// Minimal CSV reader for the files written here: header plus rows of cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::optional<std::size_t> column(std::string_view name) const;
};
CsvTable parse_csv(std::string_view text);

}  // namespace wvlab
