#pragma once

#include "zeroblock/analytics.hpp"
#include "zeroblock/simnet.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zeroblock {

struct Scenario {
    std::string name;
    SimConfig config;
    std::size_t repetitions = 1;
    //! Write the per-repetition event trace.
    bool write_trace = true;
};

/**
 * Flat `key = value` format, `#` starts a comment. `miner` may repeat and
 * takes `id role share [clock_offset]`. Required keys: name, miner, zeroblock,
 * seed and one of duration_blocks / duration_seconds. Errors carry the line.
 */
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

struct RepetitionSummary {
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    RevenueReport report;
};

struct ScenarioResult {
    std::vector<RepetitionSummary> reps;
    std::vector<std::filesystem::path> files;
};

//! Mean and sample standard deviation of shares and fork rates, one row per miner.
std::string format_aggregate_csv(const std::vector<RepetitionSummary>& reps);

//! Runs every repetition; with `out_dir` writes `<name>.rep<k>.{trace,report}.csv` and `<name>.aggregate.csv`.
ScenarioResult run_scenario(const Scenario& scenario, const std::optional<std::filesystem::path>& out_dir,
                            bool parallel = true);

//! Window used to classify honest forks as accidental.
double fork_window(const SimConfig& config);

} // namespace zeroblock
