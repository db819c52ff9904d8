#pragma once

// Scenario files. One JSON schema covers every kind; the kind is inferred
// from "model.type", the optional "model.family" and the presence of a
// "schedule" block.
//
//   {"name": "...",
//    "hypothesis": [model...], "alternative": [model | {"piece": [model...]}...],
//    "model": {"type": "finite"|"density"|"poisson"|"gaussian_sequence", ...},
//    "partition": {"cells": [...]},
//    "schedule": {"exponents": [...], "onsets": [...]},
//    "sim": {"replications", "n_grid", "k_grid", "epsilon_list", "n_max"}}

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clab/measures.hpp"
#include "clab/simulation.hpp"

namespace clab {

enum class ScenarioKind {
    finite_pair,   // model.type finite, no schedule
    density_pair,  // model.type density, no family
    sine,          // density family "sine"
    mazur,         // density family "mazur"
    kolmogorov,    // density family "kolmogorov"
    nested,        // finite or density with a "schedule" block
    poisson,
    signal_detection,  // model.type gaussian_sequence
};

std::string_view kind_name(ScenarioKind kind);

struct SimSettings {
    std::optional<std::uint64_t> replications;
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> k_grid;
    std::vector<double> epsilon_list;
    std::size_t n_max = 2048;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::finite_pair;

    // finite and density kinds
    std::vector<Model> hypothesis;
    std::vector<std::vector<Model>> pieces;  // one entry per alternative item
    Partition partition = Partition::identity(2);
    std::size_t grid_size = 256;

    // density families
    int i_max = 0;
    int m_max = 0;
    std::vector<double> u_list;

    // nested schedule overrides
    std::vector<double> exponents;
    std::vector<std::size_t> onsets;

    // poisson
    std::optional<PoissonModel> poisson0;
    std::optional<PoissonModel> poisson1;

    // gaussian sequence
    std::vector<std::vector<double>> signals0;
    std::vector<std::vector<double>> signals1;
    std::size_t dimension = 0;

    SimSettings sim;

    /// FNV-1a of the canonical (key-sorted, compact) JSON text.
    std::string hash;

    /// All alternative models flattened across pieces.
    std::vector<Model> alternative() const;
};

/// Throws ValidationError; JSON syntax errors carry line and column.
Scenario parse_scenario(std::string_view text);

/// Throws ResourceError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace clab
