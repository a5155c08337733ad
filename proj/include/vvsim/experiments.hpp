#pragma once

// Batch experiment driver: reads a config, runs one of the canonical
// experiments (hom, gate, chsh, tomo, budget, histogram) and writes JSON/CSV
// artifacts. Outputs are byte-stable for a fixed config and seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vvsim/config.hpp"

namespace vvsim {

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> format;   // "json" | "csv"; overrides the config
    bool exact_probabilities = false;    // disables sampling where applicable
};

// Returns the paths of the artifacts written. Throws on any config or physics
// error; callers map exceptions to nonzero exit codes.
std::vector<std::string> run_experiment(const ConfigFile& config, const RunOptions& options);

}  // namespace vvsim
