#include "sfcabm/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <thread>

#include "sfcabm/engine.hpp"
#include "sfcabm/io.hpp"
#include "sfcabm/ledger.hpp"

namespace sfcabm {

namespace {

ScenarioConfig make_preset(std::int64_t n_workers, std::int64_t n_firms_init, double r,
                           std::int64_t nu, double mu_min, double mu_max,
                           std::int64_t iterations, std::vector<std::int64_t> snapshots) {
    ScenarioConfig c;
    c.params.n_workers = n_workers;
    c.params.n_firms_init = n_firms_init;
    c.params.interest_rate = r;
    c.params.gamma = 2.0;
    c.params.nu = nu;
    c.params.mu_min = mu_min;
    c.params.mu_max = mu_max;
    c.params.iterations = iterations;
    c.burn_in = 500;
    c.snapshot_times = std::move(snapshots);
    c.output_dir = "out";
    return c;
}

double nan_if_empty(std::span<const double> xs) {
    return xs.empty() ? undefined_margin : mean(xs);
}

double sd_or_nan(std::span<const double> xs) {
    return xs.size() < 2 ? undefined_margin : std::sqrt(variance(xs));
}

nlohmann::json number(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const DistributionFit& fit) {
    nlohmann::json j;
    switch (fit.kind) {
    case FitKind::powerlaw_ccdf:
        j["kind"] = "powerlaw_ccdf";
        j["alpha"] = number(fit.parameters.at(0));
        j["x_min"] = number(fit.x_min);
        break;
    case FitKind::laplace:
        j["kind"] = "laplace";
        j["location"] = number(fit.parameters.at(0));
        j["scale"] = number(fit.parameters.at(1));
        break;
    case FitKind::gaussian:
        j["kind"] = "gaussian";
        j["mean"] = number(fit.parameters.at(0));
        j["sd"] = number(fit.parameters.at(1));
        break;
    }
    j["log_likelihood"] = number(fit.log_likelihood);
    j["n_samples"] = fit.n_samples;
    return j;
}

nlohmann::json to_json(const TentFit& fit) {
    return {{"laplace", to_json(fit.laplace)},
            {"gaussian", to_json(fit.gaussian)},
            {"excess_kurtosis", number(fit.excess_kurtosis)},
            {"laplace_preferred", fit.tent_shaped()}};
}

nlohmann::json to_json(const MeanVariance& mv) {
    return {{"mean", number(mv.mean)}, {"variance", number(mv.variance)}};
}

bool is_tent(const std::optional<TentFit>& fit) {
    return fit && fit->tent_shaped() && fit->excess_kurtosis > 1.0;
}

template <typename Column>
MeanVariance steady_state_impl(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                               Column column) {
    std::vector<double> xs;
    for (const auto& r : rows) {
        if (r.t >= burn_in) {
            xs.push_back(static_cast<double>(r.*column));
        }
    }
    if (xs.empty()) {
        return {undefined_margin, undefined_margin};
    }
    return {mean(xs), variance(xs)};
}

/// Runs f(i) for i in [0, n) on at most `jobs` threads. Exceptions are
/// collected per index and the lowest-index one is rethrown after all finish.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < jobs; ++k) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::filesystem::path seed_dir(const ScenarioConfig& config, std::uint64_t seed) {
    return config.output_dir / ("seed_" + std::to_string(seed));
}

SeedSummary run_and_write(const ScenarioConfig& config, std::uint64_t seed) {
    const auto dir = seed_dir(config, seed);
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir / "audit_failure.txt");
    RunResult result;
    try {
        result = simulate(config, seed);
    } catch (const AuditFailure& ex) {
        const auto& rep = ex.report();
        write_file(dir / "audit_failure.txt",
                   std::string(ex.what()) + "\nt=" + std::to_string(rep.t) +
                       "\nresidual=" + format_double(rep.residual) +
                       "\nloan_mirror_error=" + format_double(rep.loan_mirror_error) +
                       "\ngross_flow=" + format_double(rep.gross_flow) +
                       "\ntolerance=" + format_double(rep.tolerance) + "\n");
        throw;
    }
    write_file(dir / "timeseries.csv", write_timeseries_csv(result.rows));
    for (const auto& [t, cross] : result.snapshots) {
        write_file(dir / ("cross_section_t" + std::to_string(t) + ".csv"),
                   write_cross_section_csv(cross));
    }
    write_file(dir / "summary.json", to_json(config, result.summary).dump(2) + "\n");
    return result.summary;
}

ScenarioResult collect(std::vector<SeedSummary> summaries) {
    ScenarioResult out;
    out.seeds = std::move(summaries);
    std::vector<double> means;
    for (const auto& s : out.seeds) {
        means.push_back(s.unemployment.mean);
    }
    if (!means.empty() && mean(means) != 0.0) {
        out.unemployment_mean_cv = std::sqrt(variance(means)) / mean(means);
    }
    return out;
}

void write_scenario_summary(const ScenarioConfig& config, const ScenarioResult& result) {
    nlohmann::json j;
    j["scenario"] = to_json(config);
    nlohmann::json seeds = nlohmann::json::array();
    std::vector<double> u, nf, debt, life, jlr;
    for (const auto& s : result.seeds) {
        seeds.push_back(to_json(config, s));
        u.push_back(s.unemployment.mean);
        nf.push_back(s.active_firms.mean);
        debt.push_back(s.aggregate_debt.mean);
        jlr.push_back(s.job_loss_rate);
        if (std::isfinite(s.mean_lifetime)) {
            life.push_back(s.mean_lifetime);
        }
    }
    j["seeds"] = std::move(seeds);
    j["across_seeds"] = {{"n_seeds", result.seeds.size()},
                         {"unemployment_mean", number(nan_if_empty(u))},
                         {"unemployment_mean_cv", number(result.unemployment_mean_cv)},
                         {"active_firms_mean", number(nan_if_empty(nf))},
                         {"aggregate_debt_mean", number(nan_if_empty(debt))},
                         {"job_loss_rate_mean", number(nan_if_empty(jlr))},
                         {"mean_lifetime_mean", number(nan_if_empty(life))}};
    write_file(config.output_dir / "scenario_summary.json", j.dump(2) + "\n");
}

void set_axis(ScenarioConfig& c, std::string_view axis, double value) {
    if (axis == "interest_rate") {
        c.params.interest_rate = value;
    } else if (axis == "gamma") {
        c.params.gamma = value;
    } else if (axis == "nu") {
        if (value != std::floor(value)) {
            throw std::invalid_argument("nu: sweep values must be integers");
        }
        c.params.nu = static_cast<std::int64_t>(value);
    } else if (axis == "mu_min") {
        c.params.mu_min = value;
    } else if (axis == "mu_max") {
        c.params.mu_max = value;
    } else {
        throw std::invalid_argument("axis '" + std::string(axis) +
                                    "' is not sweepable (interest_rate, gamma, nu, mu_min, mu_max)");
    }
    c.validate();
}

} // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"fig2_steady_state",
         "Fig. 2: N_w=10000, gamma=2, r=0.011, nu=8, mu in [0, 0.1], 2000 iterations",
         make_preset(10000, 100, 0.011, 8, 0.0, 0.1, 2000, {1000, 1001})},
        {"fig3_distributions",
         "Fig. 3: 100000 workers, r=0.075, nu=4, gamma=2, mu in [0, 0.1], snapshot at t=750",
         make_preset(100000, 450, 0.075, 4, 0.0, 0.1, 1000, {750, 751})},
        {"fig4a_wide_mu",
         "Fig. 4a: 100000 workers, r=0.011, nu=8, gamma=2, mu in [0, 0.1]",
         make_preset(100000, 100, 0.011, 8, 0.0, 0.1, 2000, {})},
        {"fig4b_narrow_mu",
         "Fig. 4b: as Fig. 4a with mu in [0.025, 0.075]",
         make_preset(100000, 100, 0.011, 8, 0.025, 0.075, 2000, {})},
    };
    return table;
}

ScenarioConfig preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) {
            return p.config;
        }
    }
    std::string known;
    for (const auto& p : presets()) {
        known += (known.empty() ? "" : ", ") + p.name;
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

SnapshotFit analyze_snapshot(std::int64_t t, const FirmCrossSection& at,
                             const FirmCrossSection* later, std::int64_t lag,
                             double xmin_quantile) {
    SnapshotFit out;
    out.t = t;
    out.n_firms = static_cast<std::int64_t>(at.size());
    std::vector<double> sizes;
    for (const auto& f : at) {
        if (f.size > 0) {
            sizes.push_back(static_cast<double>(f.size));
        }
    }
    try {
        if (sizes.empty()) {
            throw std::invalid_argument("no firm has a positive size");
        }
        out.size_fit = fit_powerlaw_ccdf(sizes, quantile(sizes, xmin_quantile));
    } catch (const std::invalid_argument& ex) {
        out.size_fit_error = ex.what();
    }
    if (later == nullptr) {
        return out;
    }
    out.lag = lag;
    const auto pairs = size_growth_pairs(at, *later);
    std::vector<double> growth;
    for (const auto& [log_size, g] : pairs) {
        growth.push_back(g);
    }
    out.n_growth = static_cast<std::int64_t>(growth.size());
    try {
        out.growth_fit = fit_tent(growth);
    } catch (const std::invalid_argument& ex) {
        out.growth_fit_error = ex.what();
    }
    if (pairs.size() >= 2) {
        out.size_growth_correlation = correlation(pairs);
    }
    return out;
}

MeanVariance steady_state(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                          double TimeSeriesRow::*column) {
    return steady_state_impl(rows, burn_in, column);
}

MeanVariance steady_state(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                          std::int64_t TimeSeriesRow::*column) {
    return steady_state_impl(rows, burn_in, column);
}

double job_loss_rate(const std::vector<TimeSeriesRow>& rows, std::int64_t burn_in,
                     std::int64_t n_workers) {
    double lost = 0.0;
    double jobs = 0.0;
    for (const auto& r : rows) {
        if (r.t < burn_in) {
            continue;
        }
        lost += static_cast<double>(r.job_losses_bankruptcy);
        jobs += std::round((1.0 - r.unemployment_rate) * static_cast<double>(n_workers));
    }
    return jobs > 0.0 ? lost / jobs : 0.0;
}

RunResult simulate(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    SimParams params = config.params;
    params.seed = seed;
    Economy economy = init_economy(params);

    RunResult out;
    out.summary.seed = seed;
    out.rows.reserve(static_cast<std::size_t>(params.iterations));

    std::vector<double> growth;
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> ages;
    std::vector<double> bankrupt_ages;
    // Cross-sections of the last growth_lag iterations, oldest first.
    std::deque<FirmCrossSection> history;

    for (std::int64_t i = 0; i < params.iterations; ++i) {
        const TimeSeriesRow row = advance(economy);
        out.summary.max_abs_residual =
            std::max(out.summary.max_abs_residual, std::abs(row.conservation_residual));
        FirmCrossSection cross = cross_section(economy);
        if (std::find(config.snapshot_times.begin(), config.snapshot_times.end(), row.t) !=
            config.snapshot_times.end()) {
            out.snapshots.emplace(row.t, cross);
        }
        if (row.t >= config.burn_in) {
            for (const auto a : economy.last_step.exit_ages) {
                ages.push_back(static_cast<double>(a));
            }
            for (const auto a : economy.last_step.bankruptcy_ages) {
                bankrupt_ages.push_back(static_cast<double>(a));
            }
            if (static_cast<std::int64_t>(history.size()) == config.growth_lag &&
                row.t - config.growth_lag >= config.burn_in) {
                for (const auto& p : size_growth_pairs(history.front(), cross)) {
                    pairs.push_back(p);
                    growth.push_back(p.second);
                }
            }
        }
        history.push_back(std::move(cross));
        if (static_cast<std::int64_t>(history.size()) > config.growth_lag) {
            history.pop_front();
        }
        out.rows.push_back(row);
    }

    SeedSummary& s = out.summary;
    s.unemployment = steady_state(out.rows, config.burn_in, &TimeSeriesRow::unemployment_rate);
    s.active_firms = steady_state(out.rows, config.burn_in, &TimeSeriesRow::n_active_firms);
    s.aggregate_debt = steady_state(out.rows, config.burn_in, &TimeSeriesRow::aggregate_debt);
    s.job_loss_rate = job_loss_rate(out.rows, config.burn_in, params.n_workers);
    s.n_exits = static_cast<std::int64_t>(ages.size());
    s.mean_lifetime = nan_if_empty(ages);
    s.n_bankruptcy_exits = static_cast<std::int64_t>(bankrupt_ages.size());
    s.mean_bankruptcy_lifetime = nan_if_empty(bankrupt_ages);

    GrowthSummary& g = s.growth;
    g.n_samples = static_cast<std::int64_t>(growth.size());
    try {
        g.fit = fit_tent(growth);
    } catch (const std::invalid_argument& ex) {
        g.fit_error = ex.what();
    }
    if (!growth.empty()) {
        g.median = quantile(growth, 0.5);
    }
    if (pairs.size() >= 2) {
        g.size_growth_correlation = correlation(pairs);
        std::vector<double> log_sizes;
        for (const auto& p : pairs) {
            log_sizes.push_back(p.first);
        }
        const double q1 = quantile(log_sizes, 0.25);
        const double q3 = quantile(log_sizes, 0.75);
        std::vector<double> small;
        std::vector<double> large;
        for (const auto& [ls, gr] : pairs) {
            if (ls <= q1) {
                small.push_back(gr);
            }
            if (ls >= q3) {
                large.push_back(gr);
            }
        }
        g.sd_smallest_quartile = sd_or_nan(small);
        g.sd_largest_quartile = sd_or_nan(large);
    }

    for (const auto& [t, cross] : out.snapshots) {
        const auto partner = out.snapshots.find(t + config.growth_lag);
        s.snapshots.push_back(analyze_snapshot(
            t, cross, partner == out.snapshots.end() ? nullptr : &partner->second,
            config.growth_lag, config.powerlaw_xmin_quantile));
    }
    return out;
}

nlohmann::json to_json(const ScenarioConfig& c) {
    const SimParams& p = c.params;
    return {{"n_workers", p.n_workers},
            {"n_firms_init", p.n_firms_init},
            {"wage", p.wage},
            {"price", p.price},
            {"interest_rate", p.interest_rate},
            {"gamma", p.gamma},
            {"nu", p.nu},
            {"mu_min", p.mu_min},
            {"mu_max", p.mu_max},
            {"init_unemployment", p.init_unemployment},
            {"init_debt_max", p.init_debt_max},
            {"iterations", p.iterations},
            {"entry_size_min", p.entry_size_min},
            {"entry_size_max", p.entry_size_max},
            {"burn_in", c.burn_in},
            {"snapshot_times", c.snapshot_times},
            {"seeds", c.seeds},
            {"output_dir", c.output_dir.generic_string()},
            {"growth_lag", c.growth_lag},
            {"powerlaw_xmin_quantile", c.powerlaw_xmin_quantile}};
}

nlohmann::json to_json(const SnapshotFit& fit) {
    nlohmann::json j;
    j["t"] = fit.t;
    j["n_firms"] = fit.n_firms;
    if (fit.size_fit) {
        j["size_fit"] = to_json(*fit.size_fit);
    } else {
        j["size_fit"] = {{"error", fit.size_fit_error}};
    }
    if (fit.lag) {
        j["growth_lag"] = *fit.lag;
        j["n_growth_samples"] = fit.n_growth;
        if (fit.growth_fit) {
            j["growth_fit"] = to_json(*fit.growth_fit);
        } else {
            j["growth_fit"] = {{"error", fit.growth_fit_error}};
        }
        j["size_growth_correlation"] = number(fit.size_growth_correlation);
    }
    return j;
}

nlohmann::json to_json(const ScenarioConfig& config, const SeedSummary& s) {
    nlohmann::json j;
    j["scenario"] = to_json(config);
    j["seed"] = s.seed;
    j["steady_state"] = {{"window_start", config.burn_in},
                         {"window_end", config.params.iterations},
                         {"unemployment", to_json(s.unemployment)},
                         {"active_firms", to_json(s.active_firms)},
                         {"aggregate_debt", to_json(s.aggregate_debt)},
                         {"job_loss_rate", number(s.job_loss_rate)}};
    j["lifetime"] = {{"n_exits", s.n_exits},
                     {"mean", number(s.mean_lifetime)},
                     {"n_bankruptcies", s.n_bankruptcy_exits},
                     {"mean_at_bankruptcy", number(s.mean_bankruptcy_lifetime)}};
    nlohmann::json growth = {{"lag", config.growth_lag},
                             {"n_samples", s.growth.n_samples},
                             {"median", number(s.growth.median)},
                             {"size_growth_correlation", number(s.growth.size_growth_correlation)},
                             {"sd_smallest_quartile", number(s.growth.sd_smallest_quartile)},
                             {"sd_largest_quartile", number(s.growth.sd_largest_quartile)}};
    if (s.growth.fit) {
        growth["fit"] = to_json(*s.growth.fit);
    } else {
        growth["fit"] = {{"error", s.growth.fit_error}};
    }
    j["growth"] = std::move(growth);
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& f : s.snapshots) {
        snaps.push_back(to_json(f));
    }
    j["snapshots"] = std::move(snaps);
    j["max_abs_conservation_residual"] = s.max_abs_residual;

    nlohmann::json verdicts;
    verdicts["tent_shaped_growth"] = is_tent(s.growth.fit);
    verdicts["negative_size_growth"] =
        std::isfinite(s.growth.size_growth_correlation) && s.growth.size_growth_correlation < 0.0;
    verdicts["narrower_growth_for_large_firms"] =
        std::isfinite(s.growth.sd_largest_quartile) && std::isfinite(s.growth.sd_smallest_quartile) &&
        s.growth.sd_largest_quartile < s.growth.sd_smallest_quartile;
    if (!s.snapshots.empty()) {
        const auto& first = s.snapshots.front();
        verdicts["size_exponent_in_range"] =
            first.size_fit && first.size_fit->parameters[0] >= powerlaw_alpha_low &&
            first.size_fit->parameters[0] <= powerlaw_alpha_high;
    }
    j["verdicts"] = std::move(verdicts);
    return j;
}

ScenarioResult run_scenario(const ScenarioConfig& config, unsigned jobs) {
    config.validate();
    std::vector<SeedSummary> summaries(config.seeds.size());
    parallel_for(config.seeds.size(), jobs,
                 [&](std::size_t i) { summaries[i] = run_and_write(config, config.seeds[i]); });
    ScenarioResult result = collect(std::move(summaries));
    write_scenario_summary(config, result);
    return result;
}

const std::vector<std::string_view>& sweepable_axes() {
    static const std::vector<std::string_view> axes = {"interest_rate", "gamma", "nu", "mu_min",
                                                       "mu_max"};
    return axes;
}

SweepResult run_sweep(const ScenarioConfig& base, std::string_view axis,
                      const std::vector<double>& values, unsigned jobs) {
    if (values.empty()) {
        throw std::invalid_argument("values: sweep needs at least one value");
    }
    base.validate();
    std::vector<ScenarioConfig> configs;
    for (const double v : values) {
        ScenarioConfig c = base;
        set_axis(c, axis, v);
        c.output_dir = base.output_dir / (std::string(axis) + "_" + format_short(v));
        configs.push_back(std::move(c));
    }

    const std::size_t n_seeds = base.seeds.size();
    std::vector<SeedSummary> flat(configs.size() * n_seeds);
    parallel_for(flat.size(), jobs, [&](std::size_t k) {
        const auto& c = configs[k / n_seeds];
        flat[k] = run_and_write(c, c.seeds[k % n_seeds]);
    });

    SweepResult out;
    out.axis = std::string(axis);
    out.values = values;
    std::string table =
        "value,seed,unemployment_mean,unemployment_variance,active_firms_mean,active_firms_variance,"
        "aggregate_debt_mean,aggregate_debt_variance,job_loss_rate,mean_lifetime\n";
    std::string means =
        "value,n_seeds,unemployment_mean,unemployment_variance,active_firms_mean,"
        "aggregate_debt_mean,aggregate_debt_variance,job_loss_rate,mean_lifetime\n";
    for (std::size_t v = 0; v < configs.size(); ++v) {
        std::vector<SeedSummary> per(flat.begin() + static_cast<std::ptrdiff_t>(v * n_seeds),
                                     flat.begin() + static_cast<std::ptrdiff_t>((v + 1) * n_seeds));
        std::vector<double> u, uv, nf, debt, dv, jlr, life;
        for (const auto& s : per) {
            table += format_double(values[v]) + ',' + std::to_string(s.seed) + ',' +
                     format_double(s.unemployment.mean) + ',' +
                     format_double(s.unemployment.variance) + ',' +
                     format_double(s.active_firms.mean) + ',' +
                     format_double(s.active_firms.variance) + ',' +
                     format_double(s.aggregate_debt.mean) + ',' +
                     format_double(s.aggregate_debt.variance) + ',' +
                     format_double(s.job_loss_rate) + ',' + format_double(s.mean_lifetime) + '\n';
            u.push_back(s.unemployment.mean);
            uv.push_back(s.unemployment.variance);
            nf.push_back(s.active_firms.mean);
            debt.push_back(s.aggregate_debt.mean);
            dv.push_back(s.aggregate_debt.variance);
            jlr.push_back(s.job_loss_rate);
            if (std::isfinite(s.mean_lifetime)) {
                life.push_back(s.mean_lifetime);
            }
        }
        means += format_double(values[v]) + ',' + std::to_string(per.size()) + ',' +
                 format_double(mean(u)) + ',' + format_double(mean(uv)) + ',' +
                 format_double(mean(nf)) + ',' + format_double(mean(debt)) + ',' +
                 format_double(mean(dv)) + ',' + format_double(mean(jlr)) + ',' +
                 format_double(nan_if_empty(life)) + '\n';
        ScenarioResult r = collect(std::move(per));
        write_scenario_summary(configs[v], r);
        out.per_value.push_back(std::move(r));
    }
    write_file(base.output_dir / ("sweep_" + out.axis + ".csv"), table);
    write_file(base.output_dir / ("sweep_" + out.axis + "_means.csv"), means);
    return out;
}

} // namespace sfcabm
