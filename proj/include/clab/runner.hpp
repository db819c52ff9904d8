#pragma once

// The four commands behind the CLI. Each returns its output in memory;
// write_output puts it on disk.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clab/report.hpp"
#include "clab/scenario_io.hpp"

namespace clab {

/// Margins at or below this count as zero separation.
inline constexpr double kMarginTolerance = 1e-12;

inline constexpr std::uint64_t kDefaultReplications = 10000;

struct RunConfig {
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> replications;  // overrides sim.replications
    unsigned workers = 1;
    bool plots = false;
};

struct Document {
    std::string name;  // file name
    std::string text;
};

struct CommandOutput {
    Manifest manifest;
    std::vector<Table> tables;
    std::vector<Document> documents;  // JSON files
    std::vector<Plot> plots;
    std::string summary;  // human-readable text for stdout
    int exit_code = 0;    // 0, or 2 for an indistinguishability verdict
};

/// Separation margin, witnesses and Kraft bound. Exit code 2 when the
/// margin is zero.
CommandOutput run_distinguish(const Scenario& scenario, const RunConfig& config);

/// Hull distance, Kraft bound and the optimal mixtures.
CommandOutput run_bound(const Scenario& scenario, const RunConfig& config);

/// The scenario's experiment: one table per metric.
CommandOutput run_simulate(const Scenario& scenario, const RunConfig& config);

/// Interleaved schedule over the alternative pieces and its discernibility
/// curves. Throws ConstructionError naming a zero-margin piece.
CommandOutput run_schedule(const Scenario& scenario, const RunConfig& config);

/// Writes every table as CSV and every document as JSON; SVG plots only when
/// `plots` is set. Returns the file names written, sorted.
std::vector<std::string> write_output(const CommandOutput& output, const std::filesystem::path& dir, bool plots);

}  // namespace clab
