#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbsyk/observables.hpp"

namespace kbsyk {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNonConvergence = 3, kExitBracket = 4 };

// Flat key/value run description. Values keep their JSON types.
using RunConfig = nlohmann::ordered_json;

std::vector<std::string> known_keys();
std::vector<std::string> required_keys(const std::string& scenario);

// Loads a flat config file, or the "config" block of a run manifest.
RunConfig load_config(const std::string& path);
// Throws ConfigError naming every unknown or missing key.
void validate_config(const RunConfig& cfg);
// key=value; the value is parsed as JSON when possible, else kept as a string.
void apply_override(RunConfig& cfg, const std::string& assignment);

struct RunOutcome {
  std::vector<std::string> files;
  nlohmann::ordered_json summary;
};

// Executes the scenario and writes its outputs plus manifest.json under cfg["out"].
RunOutcome run(const RunConfig& cfg, std::ostream& log);

// Pairwise crossing detection over the trace.csv files of finished quench or
// lindblad runs. All runs must share lambda_t and dt. Prints a summary table to
// log and returns {"pairs": [{"a", "b", "crossings", "parity", ...}]}.
nlohmann::ordered_json compare_runs(const std::vector<std::string>& run_dirs, const CrossingOptions& opts,
                                    std::ostream& log);

// Maps an in-flight exception to an exit code and prints it.
int report_exception(std::ostream& err);

// Thread count from KBSYK_THREADS, applied to the linear-algebra backend.
int configure_threads();

}  // namespace kbsyk
