#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "anosov/harness/config.hpp"
#include "anosov/harness/report.hpp"
#include "anosov/parallel.hpp"

namespace anosov {

// A computation that did not converge or produced an unusable value.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOutcome {
  std::string subcommand;
  nlohmann::json summary;            // also written to <out>/<subcommand>.json
  std::vector<std::string> artifacts;  // file names relative to the output directory
  bool numeric_ok = true;            // false: a kernel failed to converge (exit 3)
  std::vector<std::string> problems;
};

struct RunContext {
  ExperimentConfig cfg;
  std::filesystem::path out;
  std::ostream* log = nullptr;
  Exec exec = Exec::Parallel;
};

const std::vector<std::string>& subcommands();

// Throws ConfigError (bad model parameters), IoError, NumericFailure; anything else escapes as is.
// On failure after the output directory exists, <subcommand>.json is written with "status": "partial".
RunOutcome run_subcommand(const std::string& name, const RunContext& ctx);

// Exit-code mapping used by the CLI: 0 ok, 2 config, 3 numeric, 4 IO.
int exit_code_for(const RunOutcome& o);

}  // namespace anosov
