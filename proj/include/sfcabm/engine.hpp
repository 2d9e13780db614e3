#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sfcabm/economy.hpp"
#include "sfcabm/params.hpp"
#include "sfcabm/rng.hpp"
#include "sfcabm/stats.hpp"

namespace sfcabm {

/// Builds the t = 0 economy: equal-size firms with small random debts, and a
/// bank holding those debts as claims, so net money is zero.
Economy init_economy(const SimParams& params);

/// Planned output from last period's sales and net profit, floored at zero.
double plan_production(const FirmState& firm, double price);

/// Workers needed for `q_hat` goods at margin `mu`, stochastically rounded.
std::int64_t plan_workforce(double q_hat, double mu, double price, double wage, Rng& rng);

/// Matches planned openings to the labour force. Returns hires per firm and
/// stores them in FirmState::n_workers; reorders worker_order so that the
/// employed come first.
std::vector<std::int64_t> run_job_market(Economy& economy);

/// Borrows the wage shortfall plus its interest markup. Returns the loan.
double take_credit(Economy& economy, std::size_t firm_index);

void pay_wages(Economy& economy);

/// Goods produced by `n_workers` at margin `mu`, stochastically rounded.
std::int64_t produce(double mu, std::int64_t n_workers, double wage, double price, Rng& rng);

/// Sets every agent's goods demand for this iteration and returns the total.
/// Worker demands are written to `worker_demand`, firm demands to
/// FirmState::demand.
std::int64_t consumption_demand(Economy& economy, std::vector<std::int64_t>& worker_demand);

/// Clears the goods market and settles payments through the clearing account.
void run_goods_market(Economy& economy, std::span<const std::int64_t> worker_demand);

/// Profits, interest on the whole debt stock, and repayment from cash.
void settle_accounts(Economy& economy, std::size_t firm_index);

/// Bankruptcy rule: equity below -gamma * wage * workforce.
bool check_bankruptcy(const FirmState& firm, double wage, double gamma);

/// Removes bankrupt firms (writing off residual debt) and firms left with no
/// workforce (dissolved, remaining cash to the bank). Fills the exit fields
/// of economy.last_step.
void resolve_exits(Economy& economy);

/// Shifts every firm's margin by the change in effective margin relative to
/// the previous iteration's (recentered) value. No-op on the first call.
void recenter_margins(Economy& economy, double mu_eff_now);

void spawn_entrants(Economy& economy);

/// One full iteration. Throws AuditFailure if money is not conserved.
TimeSeriesRow advance(Economy& economy);

} // namespace sfcabm
