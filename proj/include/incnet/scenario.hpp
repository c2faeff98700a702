#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace incnet {

// Scenario front end shared by the CLI binary and the test suites. Each
// command reads one JSON config, runs deterministically, and writes
// machine-readable CSV/JSON files into the output directory.
struct ScenarioOptions {
    std::string command;  // design | benchmark | simulate | compare-tft |
                          // growth-sweep | star-sweep | scalefree-table
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int workers = 0;  // 0 = resolve from env / hardware
};

// Returns the process exit status: 0 on success, nonzero after printing a
// machine-readable error JSON to stderr.
int run_scenario(const ScenarioOptions& opts);

}  // namespace incnet
