#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sfcabm/stats.hpp"

namespace sfcabm {

/// Column order of the time-series CSV (schema version 1).
inline constexpr std::string_view timeseries_header =
    "t,unemployment_rate,n_active_firms,n_bankruptcies,job_losses_bankruptcy,aggregate_debt,"
    "mu_eff,total_output,total_demand,total_sold,bank_equity,conservation_residual";

/// Column order of the cross-section CSV (schema version 1).
inline constexpr std::string_view cross_section_header =
    "id,age,mu,mu_gross_realized,mu_net_realized,size,q_produced,q_sold,cash,debt,equity";

/// 17 significant digits; round-trips every double exactly.
std::string format_double(double x);

/// Fewest significant digits that still round-trip; used in names and labels.
std::string format_short(double x);

std::string write_timeseries_csv(const std::vector<TimeSeriesRow>& rows);
std::string write_cross_section_csv(const FirmCrossSection& cross);

/// Throws std::runtime_error on a header mismatch or malformed row.
std::vector<TimeSeriesRow> parse_timeseries_csv(std::string_view text);
FirmCrossSection parse_cross_section_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace sfcabm
