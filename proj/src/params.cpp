#include "sfcabm/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sfcabm {

namespace {
void require(bool cond, const char* field, const std::string& what) {
    if (!cond) {
        throw std::invalid_argument(std::string(field) + ": " + what);
    }
}
} // namespace

void SimParams::validate() const {
    require(n_workers > 0, "n_workers", "must be positive");
    require(n_firms_init > 0, "n_firms_init", "must be positive");
    require(std::isfinite(wage) && wage > 0.0, "wage", "must be positive");
    require(std::isfinite(price) && price > 0.0, "price", "must be positive");
    require(std::isfinite(interest_rate) && interest_rate >= 0.0, "interest_rate", "must be >= 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be >= 0");
    require(nu >= 0, "nu", "must be >= 0");
    require(std::isfinite(mu_min) && mu_min >= 0.0, "mu_min", "must be >= 0");
    require(mu_min < mu_max, "mu_min", "must be below mu_max");
    require(std::isfinite(mu_max) && mu_max < 1.0, "mu_max", "must be below 1");
    require(init_unemployment >= 0.0 && init_unemployment <= 1.0, "init_unemployment",
            "must lie in [0, 1]");
    require(std::isfinite(init_debt_max) && init_debt_max >= 0.0, "init_debt_max", "must be >= 0");
    require(iterations >= 0, "iterations", "must be >= 0");
    require(entry_size_min >= 0, "entry_size_min", "must be >= 0");
    require(entry_size_min <= entry_size_max, "entry_size_min", "must not exceed entry_size_max");
}

} // namespace sfcabm
