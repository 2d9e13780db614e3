#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sfcabm/economy.hpp"

namespace sfcabm {

struct TimeSeriesRow {
    std::int64_t t = 0;
    double unemployment_rate = 0.0;
    std::int64_t n_active_firms = 0;
    std::int64_t n_bankruptcies = 0;
    std::int64_t job_losses_bankruptcy = 0;
    double aggregate_debt = 0.0;
    double mu_eff = 0.0;
    std::int64_t total_output = 0;
    std::int64_t total_demand = 0;
    std::int64_t total_sold = 0;
    double bank_equity = 0.0;
    double conservation_residual = 0.0;
};

struct FirmRecord {
    std::uint64_t id = 0;
    std::int64_t age = 0;
    double mu = 0.0;
    double mu_gross_realized = undefined_margin;
    double mu_net_realized = undefined_margin;
    std::int64_t size = 0;
    std::int64_t q_produced = 0;
    std::int64_t q_sold = 0;
    double cash = 0.0;
    double debt = 0.0;
    double equity = 0.0;
};

/// One row per alive firm, ascending id.
using FirmCrossSection = std::vector<FirmRecord>;

enum class FitKind { powerlaw_ccdf, laplace, gaussian };

struct DistributionFit {
    FitKind kind = FitKind::gaussian;
    /// powerlaw_ccdf: {alpha}; laplace: {location, scale}; gaussian: {mean, sd}.
    std::vector<double> parameters;
    double log_likelihood = 0.0;
    std::int64_t n_samples = 0;
    double x_min = 0.0;
};

struct TentFit {
    DistributionFit laplace;
    DistributionFit gaussian;
    double excess_kurtosis = 0.0;

    bool tent_shaped() const { return laplace.log_likelihood > gaussian.log_likelihood; }
};

struct LogHistogram {
    std::vector<double> edges;
    std::vector<std::int64_t> counts;
};

/// Employment-weighted mean margin over alive firms; 0 when nobody works.
double mu_eff(const Economy& economy);

FirmCrossSection cross_section(const Economy& economy);

/// Survivor log growth of size between two cross-sections.
std::vector<double> growth_rates(const FirmCrossSection& from, const FirmCrossSection& to);

/// (log size at `from`, growth to `to`) for survivors with positive size.
std::vector<std::pair<double, double>> size_growth_pairs(const FirmCrossSection& from,
                                                         const FirmCrossSection& to);

/// Continuous MLE of the CCDF tail index above x_min. Throws
/// std::invalid_argument with fewer than 10 tail samples or a degenerate tail.
DistributionFit fit_powerlaw_ccdf(std::span<const double> sizes, double x_min);

/// Laplace and Gaussian ML fits. Throws with fewer than 30 samples or zero spread.
TentFit fit_tent(std::span<const double> growth);

/// Trailing mean; the first window-1 outputs average the available prefix.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

std::vector<std::pair<double, std::int64_t>> size_margin_scatter(const FirmCrossSection& cross);

LogHistogram histogram_log_binned(std::span<const double> values, int bins_per_decade);

// Small numerical helpers shared with the scenario harness.
double mean(std::span<const double> xs);
/// Population variance.
double variance(std::span<const double> xs);
/// Linear interpolation between order statistics (type 7).
double quantile(std::vector<double> xs, double q);
double correlation(std::span<const std::pair<double, double>> xy);

} // namespace sfcabm
