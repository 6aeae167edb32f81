// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Batch driver behind the `klocal` executable.
 *
 * Exit codes: 0 pass, 1 a checked inequality failed, 2 invalid input
 * (validation, domain, dimension or infeasibility), 3 resource limit.
 * Failures print {"error": {"code", "message", "field"}} on stdout.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "klocal/model.hpp"
#include "klocal/oracle.hpp"
#include "klocal/truncator.hpp"

namespace klocal {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitPass = 0,
  kExitViolation = 1,
  kExitValidation = 2,
  kExitResource = 3,
};

struct RunConfig {
  std::string subcommand;
  std::optional<std::filesystem::path> spec_path;
  std::optional<std::filesystem::path> gamma_path;
  std::optional<std::filesystem::path> out_path;
  std::string model;  // used when spec_path is empty
  std::size_t model_sites = 0;
  ModelParams model_params;
  std::string format = "json";
  std::vector<double> t;
  std::vector<int> q;
  std::optional<int> q0;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  std::size_t samples = 32;
  double threshold = kDefaultPruneThreshold;
  OracleLimits limits;
  std::string kind = "all";      // bound
  std::string method = "chained";  // truncate
  std::string state = "plus";    // concentrate
  std::string observable = "z";  // concentrate
  std::optional<double> bin_width;
};

/// Validates the config, runs it, and writes the report to out_path (or
/// `out` when no path is set). Returns an ExitCode. Errors propagate.
int run(const RunConfig& config, std::ostream& out);

/// Parses argv, calls run(), and maps exceptions to exit codes.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace klocal
