#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace anisoflow::cli {

// Exit codes are a total function of the outcome category.
enum ExitCode : int {
  kOk = 0,
  kFailed = 1,         // structure check failed, bound violated, constant unresolved
  kConfigError = 2,    // parse error or invalid parameter
  kHypothesis = 3,     // theorem hypothesis not met
  kBlowUp = 4,         // non-finite solution
};

struct Options {
  std::string command;  // check | constants | run | verify | pipeline
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config
  std::string format = "json";        // stdout summary: json | csv
};

// Runs one command, writing artifacts under out_dir, a summary to `out` and
// diagnostics to `err`. Never throws.
int execute(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace anisoflow::cli
