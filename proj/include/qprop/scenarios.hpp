#pragma once

#include <filesystem>
#include <string>

namespace qprop::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // unexpected internal failure
  kConfigParse = 2,  // unreadable config, malformed JSON, missing/mistyped keys
  kValidation = 3,   // values violate model invariants
  kCaustic = 4,      // caustic refusal
  kResolution = 5,   // quadrature-resolution failure
};

/// Runs the scenario described by the JSON config text; writes CSV outputs
/// and a manifest.json into out_dir. Returns an ExitCode and prints the
/// failure reason to stderr on error. Outputs are bit-identical across runs
/// with identical config on the same platform.
int run_scenario(const std::string& config_text, const std::filesystem::path& out_dir,
                 int threads);

/// Reads the config file and dispatches to run_scenario. `expected_scenario`
/// (from the subcommand) must match the config's "scenario" field when that
/// field is present.
int run_config_file(const std::filesystem::path& config_path,
                    const std::filesystem::path& out_dir, int threads,
                    const std::string& expected_scenario = "");

}  // namespace qprop::cli
