#include "sfcabm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfcabm {

double mu_eff(const Economy& e) {
    double weighted = 0.0;
    std::int64_t employed = 0;
    for (const auto& f : e.firms) {
        weighted += static_cast<double>(f.n_workers) * f.mu;
        employed += f.n_workers;
    }
    return employed > 0 ? weighted / static_cast<double>(employed) : 0.0;
}

FirmCrossSection cross_section(const Economy& e) {
    FirmCrossSection out;
    out.reserve(e.firms.size());
    for (const auto& f : e.firms) {
        out.push_back({f.id, e.t - f.birth_t, f.mu, f.mu_gross_realized, f.mu_net_realized,
                       f.n_workers, f.q_produced, f.q_sold, f.cash, f.debt, f.equity()});
    }
    return out;
}

std::vector<std::pair<double, double>> size_growth_pairs(const FirmCrossSection& from,
                                                         const FirmCrossSection& to) {
    std::vector<std::pair<double, double>> out;
    auto a = from.begin();
    auto b = to.begin();
    while (a != from.end() && b != to.end()) {
        if (a->id < b->id) {
            ++a;
        } else if (b->id < a->id) {
            ++b;
        } else {
            if (a->size > 0 && b->size > 0) {
                const double s0 = static_cast<double>(a->size);
                out.emplace_back(std::log(s0), std::log(static_cast<double>(b->size) / s0));
            }
            ++a;
            ++b;
        }
    }
    return out;
}

std::vector<double> growth_rates(const FirmCrossSection& from, const FirmCrossSection& to) {
    const auto pairs = size_growth_pairs(from, to);
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [log_size, g] : pairs) {
        out.push_back(g);
    }
    return out;
}

DistributionFit fit_powerlaw_ccdf(std::span<const double> sizes, double x_min) {
    if (!(x_min > 0.0)) {
        throw std::invalid_argument("fit_powerlaw_ccdf: x_min must be positive");
    }
    std::int64_t n = 0;
    double sum_log_ratio = 0.0;
    double sum_log = 0.0;
    for (const double s : sizes) {
        if (s >= x_min) {
            ++n;
            sum_log_ratio += std::log(s / x_min);
            sum_log += std::log(s);
        }
    }
    if (n < 10) {
        throw std::invalid_argument("fit_powerlaw_ccdf: fewer than 10 samples above x_min");
    }
    if (!(sum_log_ratio > 0.0)) {
        throw std::invalid_argument("fit_powerlaw_ccdf: all tail samples equal x_min");
    }
    const double nd = static_cast<double>(n);
    const double alpha = nd / sum_log_ratio;
    DistributionFit fit;
    fit.kind = FitKind::powerlaw_ccdf;
    fit.parameters = {alpha};
    // Pareto density alpha x_min^alpha / x^(alpha+1).
    fit.log_likelihood =
        nd * std::log(alpha) + nd * alpha * std::log(x_min) - (alpha + 1.0) * sum_log;
    fit.n_samples = n;
    fit.x_min = x_min;
    return fit;
}

TentFit fit_tent(std::span<const double> growth) {
    if (growth.size() < 30) {
        throw std::invalid_argument("fit_tent: need at least 30 samples");
    }
    const double n = static_cast<double>(growth.size());
    const double m = mean(growth);
    const double var = variance(growth);
    const double med = quantile({growth.begin(), growth.end()}, 0.5);
    double abs_dev = 0.0;
    double m4 = 0.0;
    for (const double g : growth) {
        abs_dev += std::abs(g - med);
        m4 += std::pow(g - m, 4);
    }
    const double scale = abs_dev / n;
    if (!(var > 0.0) || !(scale > 0.0)) {
        throw std::invalid_argument("fit_tent: sample has no spread");
    }
    m4 /= n;

    TentFit out;
    out.laplace.kind = FitKind::laplace;
    out.laplace.parameters = {med, scale};
    out.laplace.log_likelihood = -n * std::log(2.0 * scale) - n;
    out.laplace.n_samples = static_cast<std::int64_t>(growth.size());

    out.gaussian.kind = FitKind::gaussian;
    out.gaussian.parameters = {m, std::sqrt(var)};
    out.gaussian.log_likelihood = -0.5 * n * std::log(2.0 * std::numbers::pi * var) - 0.5 * n;
    out.gaussian.n_samples = out.laplace.n_samples;

    out.excess_kurtosis = m4 / (var * var) - 3.0;
    return out;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (series.empty()) {
        throw std::invalid_argument("moving_average: empty series");
    }
    if (window == 0) {
        throw std::invalid_argument("moving_average: window must be >= 1");
    }
    std::vector<double> out(series.size());
    double running = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        running += series[i];
        if (i >= window) {
            running -= series[i - window];
        }
        out[i] = running / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

std::vector<std::pair<double, std::int64_t>> size_margin_scatter(const FirmCrossSection& cross) {
    std::vector<std::pair<double, std::int64_t>> out;
    for (const auto& r : cross) {
        if (r.q_sold > 0 && std::isfinite(r.mu_net_realized)) {
            out.emplace_back(r.mu_net_realized, r.size);
        }
    }
    return out;
}

LogHistogram histogram_log_binned(std::span<const double> values, int bins_per_decade) {
    if (bins_per_decade < 1) {
        throw std::invalid_argument("histogram_log_binned: bins_per_decade must be >= 1");
    }
    if (values.empty()) {
        return {};
    }
    double lo = values.front();
    double hi = values.front();
    for (const double v : values) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("histogram_log_binned: values must be positive");
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double bpd = static_cast<double>(bins_per_decade);
    const auto first = static_cast<std::int64_t>(std::floor(std::log10(lo) * bpd));
    auto last = static_cast<std::int64_t>(std::floor(std::log10(hi) * bpd)) + 1;
    LogHistogram h;
    for (std::int64_t k = first; k <= last; ++k) {
        h.edges.push_back(std::pow(10.0, static_cast<double>(k) / bpd));
    }
    h.counts.assign(h.edges.size() - 1, 0);
    for (const double v : values) {
        // upper_bound keeps the bin search consistent with the stored edges
        // even where log10 rounding lands on an edge.
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        auto bin = static_cast<std::size_t>(std::distance(h.edges.begin(), it));
        bin = std::clamp<std::size_t>(bin, 1, h.counts.size()) - 1;
        ++h.counts[bin];
    }
    return h;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (const double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    const double m = mean(xs);
    double s = 0.0;
    for (const double x : xs) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(xs.size());
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) {
        throw std::invalid_argument("quantile: empty sample");
    }
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double correlation(std::span<const std::pair<double, double>> xy) {
    if (xy.size() < 2) {
        return 0.0;
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : xy) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace sfcabm
