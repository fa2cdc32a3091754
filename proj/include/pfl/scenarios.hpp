#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pfl/config.hpp"
#include "pfl/field.hpp"

namespace pfl {

struct RunOptions {
    std::filesystem::path out_dir;
    unsigned jobs = 1;
};

struct ScenarioResult {
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> files;  // relative to out_dir, in write order
    std::filesystem::path manifest;
    std::map<std::string, std::string> summary;
};

/// Runs the configured scenario into `options.out_dir` and writes
/// `manifest.sha256` (sha256sum format) listing every other file written.
/// Files named by a manifest left in the directory by an earlier run are
/// removed first. Module errors are rethrown with the scenario name prefixed.
ScenarioResult run_scenario(const RunConfig& config, const RunOptions& options);

/// Initial field described by the [beam] section.
Field2D initial_field(const RunConfig& config, std::uint64_t seed_index = 0);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace pfl
