#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "sfcabm/params.hpp"
#include "sfcabm/rng.hpp"
#include "sfcabm/transfer.hpp"

namespace sfcabm {

inline constexpr double undefined_margin = std::numeric_limits<double>::quiet_NaN();

struct FirmState {
    std::uint64_t id = 0;
    /// Intrinsic margin, recentered every iteration.
    double mu = 0.0;
    std::int64_t n_workers = 0;
    std::int64_t planned_workers = 0;
    std::int64_t q_produced = 0;
    std::int64_t q_sold = 0;
    /// Goods this firm wants to buy in the current iteration.
    std::int64_t demand = 0;
    double cash = 0.0;
    double debt = 0.0;
    double profit_gross = 0.0;
    double profit_net = 0.0;
    double mu_gross_realized = undefined_margin;
    double mu_net_realized = undefined_margin;
    std::int64_t birth_t = 0;
    std::int64_t last_sales = 0;
    double last_profit_net = 0.0;
    /// Entrants skip planning in their first iteration; planned_workers is
    /// drawn at entry instead.
    bool entrant = false;

    double equity() const { return cash - debt; }
};

struct WorkerState {
    bool employed = false;
    double savings = 0.0;
};

struct BankState {
    double loans_outstanding = 0.0;
    /// Claims on the initial firm debts, booked at t = 0.
    double opening_equity = 0.0;
    double interest_income_cum = 0.0;
    double write_offs_cum = 0.0;
    double dissolution_income_cum = 0.0;
    double equity = 0.0;
};

/// Outcome of the most recent call to advance() beyond the aggregate row.
struct StepRecord {
    std::int64_t employed = 0;
    std::int64_t planned_jobs = 0;
    std::int64_t total_output = 0;
    std::int64_t total_demand = 0;
    std::int64_t total_sold = 0;
    double mu_eff = 0.0;
    std::int64_t n_bankruptcies = 0;
    std::int64_t job_losses_bankruptcy = 0;
    std::int64_t n_dissolutions = 0;
    /// Age (iterations since entry) of every firm that exited this iteration,
    /// bankrupt or dissolved.
    std::vector<std::int64_t> exit_ages;
    std::vector<std::int64_t> bankruptcy_ages;
};

struct Economy {
    std::int64_t t = 0;
    SimParams params;
    /// Alive firms, ascending id.
    std::vector<FirmState> firms;
    std::vector<WorkerState> workers;
    BankState bank;
    /// Goods-market clearing account; zero outside the settlement step.
    double market_clearing = 0.0;
    double mu_eff_prev = 0.0;
    bool has_mu_eff_prev = false;
    Rng rng;
    std::uint64_t next_firm_id = 0;
    Journal journal;
    StepRecord last_step;
    /// Worker indices; after the job market the first `employed` entries are
    /// the employed workers in random order.
    std::vector<std::size_t> worker_order;
};

} // namespace sfcabm
