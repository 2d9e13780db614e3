#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sfcabm/config.hpp"
#include "sfcabm/stats.hpp"

namespace sfcabm {

struct Preset {
    std::string name;
    /// Which figure the preset reproduces and where its values come from.
    std::string provenance;
    ScenarioConfig config;
};

const std::vector<Preset>& presets();

/// Throws std::invalid_argument for an unknown name.
ScenarioConfig preset(std::string_view name);

/// Exponent range accepted for the size tail, slack included.
inline constexpr double powerlaw_alpha_low = 0.5;
inline constexpr double powerlaw_alpha_high = 2.3;

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;
};

/// Fits on one saved cross-section, plus growth fits when the cross-section
/// `lag` iterations later is available.
struct SnapshotFit {
    std::int64_t t = 0;
    std::int64_t n_firms = 0;
    std::optional<DistributionFit> size_fit;
    std::string size_fit_error;

    std::optional<std::int64_t> lag;
    std::int64_t n_growth = 0;
    std::optional<TentFit> growth_fit;
    std::string growth_fit_error;
    double size_growth_correlation = undefined_margin;
};

SnapshotFit analyze_snapshot(std::int64_t t, const FirmCrossSection& at,
                             const FirmCrossSection* later, std::int64_t lag,
                             double xmin_quantile);

struct GrowthSummary {
    std::int64_t n_samples = 0;
    std::optional<TentFit> fit;
    std::string fit_error;
    double median = undefined_margin;
    double size_growth_correlation = undefined_margin;
    /// Growth standard deviation for firms in the bottom and top size quartile.
    double sd_smallest_quartile = undefined_margin;
    double sd_largest_quartile = undefined_margin;
};

struct SeedSummary {
    std::uint64_t seed = 0;
    MeanVariance unemployment;
    MeanVariance active_firms;
    MeanVariance aggregate_debt;
    /// Jobs lost to bankruptcy divided by jobs existing, summed over the window.
    double job_loss_rate = 0.0;
    std::int64_t n_exits = 0;
    double mean_lifetime = undefined_margin;
    std::int64_t n_bankruptcy_exits = 0;
    double mean_bankruptcy_lifetime = undefined_margin;
    GrowthSummary growth;
    std::vector<SnapshotFit> snapshots;
    double max_abs_residual = 0.0;
};

struct RunResult {
    std::vector<TimeSeriesRow> rows;
    std::map<std::int64_t, FirmCrossSection> snapshots;
    SeedSummary summary;
};

/// One seed, in memory. Throws AuditFailure if the books stop balancing.
RunResult simulate(const ScenarioConfig& config, std::uint64_t seed);

/// Steady-state summary of the time-series columns alone; the same numbers
/// simulate() reports, so a saved CSV can be checked against its summary.
MeanVariance steady_state(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                          double TimeSeriesRow::*column);
MeanVariance steady_state(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                          std::int64_t TimeSeriesRow::*column);
double job_loss_rate(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                     std::int64_t n_workers);

nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const SnapshotFit& fit);
nlohmann::json to_json(const ScenarioConfig& config, const SeedSummary& summary);

struct ScenarioResult {
    std::vector<SeedSummary> seeds;
    /// Coefficient of variation of the per-seed mean unemployment.
    double unemployment_mean_cv = undefined_margin;
};

/// Runs every seed with at most `jobs` concurrent runs (0 = hardware
/// concurrency) and writes, under output_dir:
///   seed_<s>/timeseries.csv, seed_<s>/cross_section_t<T>.csv, seed_<s>/summary.json
///   scenario_summary.json
/// A run that fails its audit leaves seed_<s>/audit_failure.txt; the other
/// seeds still finish and the first failure is rethrown.
ScenarioResult run_scenario(const ScenarioConfig& config, unsigned jobs = 0);

const std::vector<std::string_view>& sweepable_axes();

struct SweepResult {
    std::string axis;
    std::vector<double> values;
    std::vector<ScenarioResult> per_value;
};

/// One scenario per value under output_dir/<axis>_<value>/, plus
/// sweep_<axis>.csv keyed by (value, seed) and sweep_<axis>_means.csv.
SweepResult run_sweep(const ScenarioConfig& base, std::string_view axis,
                      const std::vector<double>& values, unsigned jobs = 0);

} // namespace sfcabm
