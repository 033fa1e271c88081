#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mbasis/config.hpp"

namespace mbasis {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

/// From MBASIS_LOG: quiet|0, info|1 (default), debug|2.
LogLevel log_level_from_env();

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunOutcome {
    int exit_code = 0;               // 0 iff every check passed and no error was raised
    std::vector<Check> checks;
    std::vector<std::string> artifacts;  // paths relative to the output directory
    nlohmann::json summary;
    nlohmann::json failure;          // {module, operation, invariant, message} on error
};

/// Dispatches to the command pipeline, writes its artifacts plus
/// summary.json (deterministic) and manifest.json (adds wall time) into
/// cfg.output, and failure.json when a contract is violated.
RunOutcome run(const ExperimentConfig& cfg, LogLevel level = LogLevel::info);

}  // namespace mbasis
