#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfcabm/params.hpp"

namespace sfcabm {

struct ScenarioConfig {
    SimParams params;
    /// Iterations before this index are excluded from steady-state statistics.
    std::int64_t burn_in = 500;
    /// Iterations after which a firm cross-section is written.
    std::vector<std::int64_t> snapshot_times;
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path output_dir = "out";
    std::int64_t growth_lag = 1;
    double powerlaw_xmin_quantile = 0.9;

    void validate() const;
};

/// Config-document error; `line` is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, std::size_t line = 0, std::string key = {})
        : std::runtime_error(std::move(message)), line_(line), key_(std::move(key)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

/// Every key accepted by load_config and apply_override, in documentation order.
const std::vector<std::string_view>& config_keys();

/// Parses a flat `key = value` document. `#` starts a comment. Lists are
/// comma separated; seed lists also accept inclusive ranges `a..b`.
/// Required keys: n_workers, n_firms_init, interest_rate, nu, mu_min, mu_max,
/// iterations.
ScenarioConfig load_config(std::string_view text);
ScenarioConfig load_config_file(const std::filesystem::path& path);

/// Sets one key without validating, so several dependent keys can be
/// changed before a single validate().
void set_config_key(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Sets one key on an existing config and re-validates it.
void apply_override(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Parses "1..10", "3,5,7" or a mix such as "1..3,9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Closest known key by edit distance, or empty if nothing is close.
std::string suggest_key(std::string_view unknown);

} // namespace sfcabm
