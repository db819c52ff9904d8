#pragma once

// Output files: CSV tables, JSON documents and SVG line plots, each stamped
// with the run manifest so that a run can be replayed exactly.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace clab {

struct Manifest {
    std::string command;
    std::string scenario;       // scenario name
    std::string scenario_hash;  // fnv1a of the canonical scenario JSON
    std::uint64_t seed = 0;
    std::uint64_t replications = 0;
    std::string version;  // library version
};

/// Library version string.
std::string version();

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

/// Doubles use numeric::format_double. The first line is "# " followed by
/// the manifest as key=value pairs.
std::string to_csv(const Table& table, const Manifest& manifest);

/// The manifest as a compact JSON object.
std::string manifest_json(const Manifest& manifest);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::string name;  // file stem
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
};

/// Minimal standalone SVG line chart with axes, ticks and a legend.
/// Non-finite points (and nonpositive ones on a log axis) are skipped.
std::string to_svg(const Plot& plot, const Manifest& manifest);

/// Writes `bytes` to `dir/name`, creating `dir` when needed. Throws
/// ResourceError on failure.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& bytes);

}  // namespace clab
