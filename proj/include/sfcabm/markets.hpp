#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfcabm/rng.hpp"

namespace sfcabm {

/// Rationing problem for one market: choose `total_to_allocate` unit slots
/// uniformly among all slots, where bin i owns `weights[i]` slots.
struct AllocationRequest {
    std::vector<std::int64_t> weights;
    std::int64_t total_to_allocate = 0;
};

/// floor(x) plus a Bernoulli draw on the fractional part. E[result] = x.
/// Throws std::invalid_argument for negative or non-finite x.
std::int64_t stochastic_round(double x, Rng& rng);

/// Number of marked items in a uniform sample without replacement of size
/// `sample` from `good + bad` items of which `good` are marked.
///
/// Exact: inverse-CDF for small samples, Stadlober's ratio-of-uniforms
/// rejection (HRUA) otherwise.
std::int64_t hypergeometric(std::int64_t good, std::int64_t bad, std::int64_t sample, Rng& rng);

/// Multivariate hypergeometric allocation by sequential conditional draws.
/// The result has the same length as `weights`, sums to `total` exactly and
/// never exceeds a bin's weight.
std::vector<std::int64_t> allocate_without_replacement(std::span<const std::int64_t> weights,
                                                       std::int64_t total, Rng& rng);

inline std::vector<std::int64_t> allocate_without_replacement(const AllocationRequest& req,
                                                              Rng& rng) {
    return allocate_without_replacement(req.weights, req.total_to_allocate, rng);
}

/// Uniform real on [lo, hi]; returns lo when lo == hi.
double draw_uniform(double lo, double hi, Rng& rng);

/// Uniform integer on the closed range [lo, hi].
std::int64_t draw_uniform_int(std::int64_t lo, std::int64_t hi, Rng& rng);

} // namespace sfcabm
