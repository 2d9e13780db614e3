#include "sfcabm/markets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfcabm {

namespace {

double log_factorial(std::int64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double log_choose(std::int64_t n, std::int64_t k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Inverse CDF walking up from the lowest support point. Only used for
// small samples, where the support has at most ten points.
std::int64_t hypergeometric_inversion(std::int64_t good, std::int64_t bad, std::int64_t sample,
                                      Rng& rng) {
    const std::int64_t lo = std::max<std::int64_t>(0, sample - bad);
    const std::int64_t hi = std::min(sample, good);
    double p = std::exp(log_choose(good, lo) + log_choose(bad, sample - lo) -
                        log_choose(good + bad, sample));
    double u = rng.uniform01();
    std::int64_t k = lo;
    while (u >= p && k < hi) {
        u -= p;
        p *= static_cast<double>(good - k) * static_cast<double>(sample - k) /
             (static_cast<double>(k + 1) * static_cast<double>(bad - sample + k + 1));
        ++k;
    }
    return k;
}

// Ratio-of-uniforms sampler (Stadlober 1989, "HRUA").
std::int64_t hypergeometric_hrua(std::int64_t good, std::int64_t bad, std::int64_t sample,
                                 Rng& rng) {
    constexpr double d1 = 1.7155277699214135;
    constexpr double d2 = 0.8989161620588988;

    const std::int64_t popsize = good + bad;
    const std::int64_t m_sample = std::min(sample, popsize - sample);
    const std::int64_t min_gb = std::min(good, bad);
    const std::int64_t max_gb = std::max(good, bad);

    const double p = static_cast<double>(min_gb) / static_cast<double>(popsize);
    const double q = static_cast<double>(max_gb) / static_cast<double>(popsize);
    const double mu = static_cast<double>(m_sample) * p;
    const double a = mu + 0.5;
    const double var = static_cast<double>(popsize - m_sample) * static_cast<double>(m_sample) *
                       p * q / static_cast<double>(popsize - 1);
    const double c = std::sqrt(var + 0.5);
    const double h = d1 * c + d2;

    const auto mode = static_cast<std::int64_t>(std::floor(
        static_cast<double>(m_sample + 1) * static_cast<double>(min_gb + 1) /
        static_cast<double>(popsize + 2)));
    const double g = log_factorial(mode) + log_factorial(min_gb - mode) +
                     log_factorial(m_sample - mode) + log_factorial(max_gb - m_sample + mode);
    const double b = std::min(static_cast<double>(std::min(m_sample, min_gb) + 1),
                              std::floor(a + 16.0 * c));

    std::int64_t k = 0;
    for (;;) {
        const double u = rng.uniform01();
        const double v = rng.uniform01();
        if (u == 0.0) {
            continue;
        }
        const double x = a + h * (v - 0.5) / u;
        if (x < 0.0 || x >= b) {
            continue;
        }
        k = static_cast<std::int64_t>(std::floor(x));
        const double gp = log_factorial(k) + log_factorial(min_gb - k) +
                          log_factorial(m_sample - k) + log_factorial(max_gb - m_sample + k);
        const double t = g - gp;
        if (u * (4.0 - u) - 3.0 <= t) {
            break;
        }
        if (u * (u - t) >= 1.0) {
            continue;
        }
        if (2.0 * std::log(u) <= t) {
            break;
        }
    }

    if (good > bad) {
        k = m_sample - k;
    }
    if (m_sample < sample) {
        k = good - k;
    }
    return k;
}

} // namespace

std::int64_t stochastic_round(double x, Rng& rng) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("stochastic_round: argument must be finite and >= 0, got " +
                                    std::to_string(x));
    }
    const double whole = std::floor(x);
    const double frac = x - whole;
    auto result = static_cast<std::int64_t>(whole);
    if (frac > 0.0 && rng.uniform01() < frac) {
        ++result;
    }
    return result;
}

std::int64_t hypergeometric(std::int64_t good, std::int64_t bad, std::int64_t sample, Rng& rng) {
    if (good < 0 || bad < 0 || sample < 0 || sample > good + bad) {
        throw std::invalid_argument("hypergeometric: invalid parameters");
    }
    if (sample == 0 || good == 0) {
        return 0;
    }
    if (bad == 0) {
        return sample;
    }
    if (sample == good + bad) {
        return good;
    }
    const std::int64_t total = good + bad;
    if (sample >= 10 && sample <= total - 10) {
        return hypergeometric_hrua(good, bad, sample, rng);
    }
    if (sample > total / 2) {
        // The unchosen items form a small sample; count the marked ones among them.
        return good - hypergeometric_inversion(good, bad, total - sample, rng);
    }
    return hypergeometric_inversion(good, bad, sample, rng);
}

std::vector<std::int64_t> allocate_without_replacement(std::span<const std::int64_t> weights,
                                                       std::int64_t total, Rng& rng) {
    std::int64_t remaining_weight = 0;
    for (const auto w : weights) {
        if (w < 0) {
            throw std::invalid_argument("allocate_without_replacement: negative weight");
        }
        remaining_weight += w;
    }
    if (total < 0 || total > remaining_weight) {
        throw std::invalid_argument("allocate_without_replacement: total " + std::to_string(total) +
                                    " exceeds capacity " + std::to_string(remaining_weight));
    }

    std::vector<std::int64_t> out(weights.size(), 0);
    std::int64_t remaining = total;
    for (std::size_t i = 0; i < weights.size() && remaining > 0; ++i) {
        const std::int64_t w = weights[i];
        std::int64_t k;
        if (remaining == remaining_weight) {
            k = w;
        } else {
            k = hypergeometric(w, remaining_weight - w, remaining, rng);
        }
        out[i] = k;
        remaining -= k;
        remaining_weight -= w;
    }
    return out;
}

double draw_uniform(double lo, double hi, Rng& rng) {
    if (!(lo <= hi)) {
        throw std::invalid_argument("draw_uniform: lo > hi");
    }
    return lo + (hi - lo) * rng.uniform01();
}

std::int64_t draw_uniform_int(std::int64_t lo, std::int64_t hi, Rng& rng) {
    if (lo > hi) {
        throw std::invalid_argument("draw_uniform_int: lo > hi");
    }
    return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo) + 1));
}

} // namespace sfcabm
