#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svp/experiments.hpp"
#include "svp/svm.hpp"

namespace svp {

// Fully resolved run configuration for one CLI invocation. Flags win over
// config-file values; the default seed is a fixed documented constant, never
// the clock.
struct RunConfig {
    static constexpr std::uint64_t kDefaultSeed = 42;

    std::string subcommand;
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    std::filesystem::path out_dir;
    SolverOptions solver;
    nlohmann::json body;  // validated subcommand-specific payload
    nlohmann::json echo;  // the resolved config written into the manifest
};

// CLI flag overrides; `std::nullopt` means the flag was not given.
struct FlagOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::optional<double> tol_kkt;
    std::optional<double> tol_sv;
    std::optional<long> trials;
};

// Parses and strictly validates the config file for `subcommand`: unknown
// keys are rejected with a nearest-key suggestion, and all numeric ranges
// are checked against operation preconditions before any computation runs.
// Throws ConfigError with a JSON-pointer path.
RunConfig load_config(const std::string& subcommand, const std::filesystem::path& path,
                      const FlagOverrides& flags);

// Same, from an already-parsed document (used when no --config was given).
RunConfig resolve_config(const std::string& subcommand, const nlohmann::json& doc,
                         const FlagOverrides& flags);

// Levenshtein-based suggestion helper, exposed for tests.
std::string nearest_key(const std::string& unknown, const std::vector<std::string>& known);

// Builders for validated payload pieces.
CellSpec cell_from_json(const nlohmann::json& cell, const std::string& pointer);
SweepConfig sweep_from_config(const RunConfig& cfg);
ConverseConfig converse_from_config(const RunConfig& cfg);
BuhotConfig buhot_from_config(const RunConfig& cfg);
Figure1Options figure1_from_config(const RunConfig& cfg);

}  // namespace svp
