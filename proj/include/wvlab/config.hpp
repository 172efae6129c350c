// Run configuration: a single JSON document naming the function, tract,
// growth parameters, grid, the checks to run and every numerical knob.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wvlab/function_model.hpp"
#include "wvlab/growth.hpp"
#include "wvlab/verifier.hpp"

namespace wvlab {

enum class CheckId { Growth, Exceptional, Thm1, Thm2, ZeroOrder, B1Control, Recurrence, Classical };

std::string_view to_string(CheckId id);
// ConfigError on an unknown id.
CheckId parse_check(std::string_view id);
// Comma-separated list; empty string gives an empty list.
std::vector<CheckId> parse_check_list(std::string_view ids);

struct ClassicalConfig {
  std::vector<Complex> coefficients;
  std::vector<Real> radii;
};

struct RunConfig {
  FunctionSpec function = FunctionSpec::power_law(2);
  TractSpec tract;
  GrowthParams params;
  GridSpec grid;
  ScanOptions scan;
  VerifierOptions verifier;
  std::vector<CheckId> checks;
  std::filesystem::path output = "out";
  std::uint64_t seed = 1;
  int recurrence_q_max = 4;
  std::optional<ClassicalConfig> classical;
  int workers = 0;  // 0: runtime default

  bool wants(CheckId id) const;
};

// Relative paths inside the document (coefficient CSVs) resolve against base_dir.
// ConfigError for malformed documents, unknown keys or invalid values.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Coefficients 1/n!, n < count, of the truncated exponential.
std::vector<Complex> exp_coefficients(std::size_t count);

}  // namespace wvlab
