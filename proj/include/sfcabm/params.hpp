#pragma once

#include <cstdint>

namespace sfcabm {

/// Exogenous constants of one simulation run. Money is measured in units of
/// the goods price.
struct SimParams {
    std::int64_t n_workers = 10000;
    std::int64_t n_firms_init = 100;
    double wage = 30.0;
    double price = 1.0;
    double interest_rate = 0.011;
    /// Bankruptcy threshold: equity floor is -gamma * wage * workforce.
    double gamma = 2.0;
    /// Entrants per iteration.
    std::int64_t nu = 8;
    double mu_min = 0.0;
    double mu_max = 0.1;
    double init_unemployment = 0.1;
    /// Initial debts are drawn from Uniform[0, init_debt_max].
    double init_debt_max = 30.0;
    std::int64_t iterations = 2000;
    std::uint64_t seed = 1;
    std::int64_t entry_size_min = 1;
    std::int64_t entry_size_max = 3;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

} // namespace sfcabm
