#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbasis/types.hpp"

namespace mbasis {

struct ExperimentConfig {
    std::string command;          // build-system | perturb | represent | pathology | unb
    int truncation = 64;          // system size / ambient dimension
    std::uint64_t seed = 1;
    ToleranceConfig tol;
    std::string output = "out";
    std::string input;            // stored system directory (perturb, represent)
    std::string partition;        // partition file (perturb without auto_strong)

    // build-system
    std::string system = "coupled";  // canonical | coupled | random
    double coupling = 0.5;

    // perturb / represent
    int depth = 8;
    int blocks = 2;
    bool auto_strong = false;
    double eps0 = 1.0;
    double norming_c = 0.0;       // 0: half the exact norming constant
    int samples = 8;              // random unit vectors for reconstruction traces

    // pathology / unb
    double eps_scale = 0.25;
    int perm_size = 100000;
    std::vector<int> cs{1, 2, 4};
    std::vector<int> sizes{64, 128, 256};
    std::string lambda = "linear";
    bool control = true;

    /// Range checks; `require_command` also demands a command.
    void validate(bool require_command = true) const;
};

/// Line-oriented `key = value` text; '#' starts a comment. Unknown keys,
/// duplicate keys and malformed values are errors carrying the line number.
ExperimentConfig parse_config(const std::string& text, bool require_command = true);

/// Key list with defaults, for --help.
std::string config_reference();

}  // namespace mbasis
