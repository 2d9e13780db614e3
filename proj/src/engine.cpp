#include "sfcabm/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sfcabm/ledger.hpp"
#include "sfcabm/markets.hpp"

namespace sfcabm {

namespace {

void require_margin(double mu) {
    if (!(mu < 1.0)) {
        throw std::invalid_argument("margin must be below 1, got " + std::to_string(mu));
    }
}

void post_to_firm(Economy& e, TransferKind kind, std::size_t firm_index, double amount) {
    if (amount > 0.0) {
        post(e, {e.t, kind, AccountRef::bank(), AccountRef::firm(firm_index), amount});
    }
}

void post_from_firm(Economy& e, TransferKind kind, std::size_t firm_index, double amount) {
    if (amount > 0.0) {
        post(e, {e.t, kind, AccountRef::firm(firm_index), AccountRef::bank(), amount});
    }
}

// Converts any cash shortfall for an upcoming payment into debt at face value.
void cover_with_overdraft(Economy& e, std::size_t firm_index, double payment) {
    const double shortfall = payment - e.firms[firm_index].cash;
    if (shortfall > 0.0) {
        post_to_firm(e, TransferKind::overdraft, firm_index, shortfall);
    }
}

void firm_purchase(Economy& e, std::size_t i, double amount) {
    if (amount <= 0.0) {
        return;
    }
    cover_with_overdraft(e, i, amount);
    post(e, {e.t, TransferKind::purchase, AccountRef::firm(i), AccountRef::market(), amount});
}

} // namespace

Economy init_economy(const SimParams& params) {
    params.validate();

    Economy e;
    e.params = params;
    e.rng = Rng(params.seed);
    e.workers.assign(static_cast<std::size_t>(params.n_workers), WorkerState{});
    e.worker_order.resize(e.workers.size());
    std::iota(e.worker_order.begin(), e.worker_order.end(), std::size_t{0});

    const auto employed_total = static_cast<std::int64_t>(
        std::floor(static_cast<double>(params.n_workers) * (1.0 - params.init_unemployment)));
    const std::int64_t per_firm = employed_total / params.n_firms_init;

    e.firms.reserve(static_cast<std::size_t>(params.n_firms_init));
    double total_debt = 0.0;
    for (std::int64_t i = 0; i < params.n_firms_init; ++i) {
        FirmState f;
        f.id = e.next_firm_id++;
        f.mu = draw_uniform(params.mu_min, params.mu_max, e.rng);
        f.n_workers = per_firm;
        f.debt = params.init_debt_max > 0.0 ? draw_uniform(0.0, params.init_debt_max, e.rng) : 0.0;
        f.last_sales = produce(f.mu, per_firm, params.wage, params.price, e.rng);
        f.birth_t = 0;
        total_debt += f.debt;
        e.firms.push_back(f);
    }
    const std::int64_t employed = per_firm * params.n_firms_init;
    for (std::int64_t j = 0; j < employed; ++j) {
        e.workers[static_cast<std::size_t>(j)].employed = true;
    }

    // The bank holds the initial debts as claims, so net financial assets
    // across firms and bank sum to zero.
    e.bank.loans_outstanding = total_debt;
    e.bank.opening_equity = total_debt;
    e.bank.equity = total_debt;
    return e;
}

double plan_production(const FirmState& firm, double price) {
    return std::max(0.0, static_cast<double>(firm.last_sales) + firm.last_profit_net / price);
}

std::int64_t plan_workforce(double q_hat, double mu, double price, double wage, Rng& rng) {
    require_margin(mu);
    return stochastic_round(q_hat * (1.0 - mu) * price / wage, rng);
}

std::vector<std::int64_t> run_job_market(Economy& e) {
    const std::int64_t labour = e.params.n_workers;
    std::vector<std::int64_t> plans(e.firms.size());
    std::int64_t openings = 0;
    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        plans[i] = e.firms[i].planned_workers;
        openings += plans[i];
    }

    std::vector<std::int64_t> hires =
        openings <= labour ? plans : allocate_without_replacement(plans, labour, e.rng);
    std::int64_t employed = 0;
    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        e.firms[i].n_workers = hires[i];
        employed += hires[i];
    }

    // Pick the unemployed uniformly by a partial shuffle from the back of
    // worker_order; the front `employed` entries then hold the employed.
    const std::size_t n = e.worker_order.size();
    const auto idle = static_cast<std::size_t>(labour - employed);
    for (std::size_t k = 0; k < idle; ++k) {
        const std::size_t last = n - 1 - k;
        const auto pick = static_cast<std::size_t>(e.rng.below(last + 1));
        std::swap(e.worker_order[pick], e.worker_order[last]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        e.workers[e.worker_order[k]].employed = k < n - idle;
    }

    e.last_step.planned_jobs = openings;
    e.last_step.employed = employed;
    return hires;
}

double take_credit(Economy& e, std::size_t i) {
    FirmState& f = e.firms[i];
    const double bill = static_cast<double>(f.n_workers) * e.params.wage;
    const double shortfall = std::max(0.0, bill - f.cash);
    const double loan = shortfall * (1.0 + e.params.interest_rate);
    post_to_firm(e, TransferKind::loan_issue, i, loan);
    return loan;
}

void pay_wages(Economy& e) {
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        const std::int64_t jobs = e.firms[i].n_workers;
        assert(e.firms[i].cash + 1e-9 >= static_cast<double>(jobs) * e.params.wage);
        for (std::int64_t k = 0; k < jobs; ++k) {
            post(e, {e.t, TransferKind::wage, AccountRef::firm(i),
                     AccountRef::worker(e.worker_order[cursor++]), e.params.wage});
        }
        // Guard against rounding in the loan markup leaving a negative ulp.
        if (e.firms[i].cash < 0.0) {
            post_to_firm(e, TransferKind::overdraft, i, -e.firms[i].cash);
        }
    }
}

std::int64_t produce(double mu, std::int64_t n_workers, double wage, double price, Rng& rng) {
    require_margin(mu);
    return stochastic_round(wage / price * static_cast<double>(n_workers) / (1.0 - mu), rng);
}

std::int64_t consumption_demand(Economy& e, std::vector<std::int64_t>& worker_demand) {
    const double p = e.params.price;
    std::int64_t total = 0;
    worker_demand.resize(e.workers.size());
    for (std::size_t j = 0; j < e.workers.size(); ++j) {
        // Whole goods only, never more than the savings cover.
        const double s = e.workers[j].savings;
        auto d = static_cast<std::int64_t>(std::floor(s / p));
        if (static_cast<double>(d + 1) * p <= s) {
            ++d;
        } else if (d > 0 && static_cast<double>(d) * p > s) {
            --d;
        }
        worker_demand[j] = d;
        total += d;
    }
    for (auto& f : e.firms) {
        const double expected_profit = f.mu * p * static_cast<double>(f.q_produced) -
                                       e.params.interest_rate * f.debt;
        f.demand = stochastic_round(std::max(0.0, expected_profit) / p, e.rng);
        total += f.demand;
    }
    return total;
}

void run_goods_market(Economy& e, std::span<const std::int64_t> worker_demand) {
    const double p = e.params.price;
    const std::size_t nf = e.firms.size();
    std::int64_t supply = 0;
    for (const auto& f : e.firms) {
        supply += f.q_produced;
    }
    std::int64_t demand = 0;
    for (const auto d : worker_demand) {
        demand += d;
    }
    for (const auto& f : e.firms) {
        demand += f.demand;
    }

    std::vector<std::int64_t> worker_bought(worker_demand.begin(), worker_demand.end());
    std::vector<std::int64_t> firm_bought(nf);
    if (supply <= demand) {
        for (auto& f : e.firms) {
            f.q_sold = f.q_produced;
        }
        // Ration the unit demands: workers first, then firms, in index order.
        std::vector<std::int64_t> bins(worker_demand.begin(), worker_demand.end());
        bins.reserve(bins.size() + nf);
        for (const auto& f : e.firms) {
            bins.push_back(f.demand);
        }
        const auto filled = allocate_without_replacement(bins, supply, e.rng);
        std::copy_n(filled.begin(), worker_bought.size(), worker_bought.begin());
        std::copy(filled.begin() + static_cast<std::ptrdiff_t>(worker_bought.size()), filled.end(),
                  firm_bought.begin());
    } else {
        std::vector<std::int64_t> goods(nf);
        for (std::size_t i = 0; i < nf; ++i) {
            goods[i] = e.firms[i].q_produced;
            firm_bought[i] = e.firms[i].demand;
        }
        const auto sold = allocate_without_replacement(goods, demand, e.rng);
        for (std::size_t i = 0; i < nf; ++i) {
            e.firms[i].q_sold = sold[i];
        }
    }

    // Settlement through the clearing account: sellers are credited first,
    // then buyers pay; a firm short of cash draws an overdraft.
    for (std::size_t i = 0; i < nf; ++i) {
        const double revenue = static_cast<double>(e.firms[i].q_sold) * p;
        if (revenue > 0.0) {
            post(e, {e.t, TransferKind::purchase, AccountRef::market(), AccountRef::firm(i), revenue});
        }
    }
    for (std::size_t j = 0; j < worker_bought.size(); ++j) {
        if (worker_bought[j] > 0) {
            post(e, {e.t, TransferKind::purchase, AccountRef::worker(j), AccountRef::market(),
                     static_cast<double>(worker_bought[j]) * p});
        }
    }
    for (std::size_t i = 0; i < nf; ++i) {
        firm_purchase(e, i, static_cast<double>(firm_bought[i]) * p);
    }

    e.last_step.total_output = supply;
    e.last_step.total_demand = demand;
    e.last_step.total_sold = std::min(supply, demand);
}

void settle_accounts(Economy& e, std::size_t i) {
    FirmState& f = e.firms[i];
    const double p = e.params.price;
    const double revenue = static_cast<double>(f.q_sold) * p;
    f.profit_gross = revenue - static_cast<double>(f.n_workers) * e.params.wage;
    const double interest = e.params.interest_rate * f.debt;
    f.profit_net = f.profit_gross - interest;

    if (interest > 0.0) {
        cover_with_overdraft(e, i, interest);
        post_from_firm(e, TransferKind::interest, i, interest);
    }
    post_from_firm(e, TransferKind::repayment, i, std::min(f.cash, f.debt));

    if (f.q_sold > 0) {
        f.mu_gross_realized = f.profit_gross / revenue;
        f.mu_net_realized = f.profit_net / revenue;
    } else {
        f.mu_gross_realized = undefined_margin;
        f.mu_net_realized = undefined_margin;
    }
    f.last_sales = f.q_sold;
    f.last_profit_net = f.profit_net;
}

bool check_bankruptcy(const FirmState& firm, double wage, double gamma) {
    return firm.equity() < -gamma * wage * static_cast<double>(firm.n_workers);
}

void resolve_exits(Economy& e) {
    StepRecord& rec = e.last_step;
    rec.n_bankruptcies = 0;
    rec.job_losses_bankruptcy = 0;
    rec.n_dissolutions = 0;
    rec.exit_ages.clear();
    rec.bankruptcy_ages.clear();

    std::vector<bool> exiting(e.firms.size(), false);
    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        FirmState& f = e.firms[i];
        if (check_bankruptcy(f, e.params.wage, e.params.gamma)) {
            post_from_firm(e, TransferKind::repayment, i, std::min(f.cash, f.debt));
            post_to_firm(e, TransferKind::write_off, i, f.debt);
            ++rec.n_bankruptcies;
            rec.job_losses_bankruptcy += f.n_workers;
            rec.bankruptcy_ages.push_back(e.t - f.birth_t);
            exiting[i] = true;
        } else if (f.n_workers == 0) {
            // No workforce means no sales and zero planned output from here
            // on; the firm leaves without defaulting.
            post_from_firm(e, TransferKind::repayment, i, std::min(f.cash, f.debt));
            post_from_firm(e, TransferKind::dissolution, i, f.cash);
            ++rec.n_dissolutions;
            exiting[i] = true;
        }
        if (exiting[i]) {
            rec.exit_ages.push_back(e.t - f.birth_t);
        }
    }

    std::size_t out = 0;
    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        if (!exiting[i]) {
            if (out != i) {
                e.firms[out] = std::move(e.firms[i]);
            }
            ++out;
        }
    }
    e.firms.resize(out);
}

void recenter_margins(Economy& e, double mu_eff_now) {
    if (!e.has_mu_eff_prev) {
        e.mu_eff_prev = mu_eff_now;
        e.has_mu_eff_prev = true;
        return;
    }
    const double delta = mu_eff_now - e.mu_eff_prev;
    for (auto& f : e.firms) {
        f.mu -= delta;
    }
    // Effective margin of this iteration's hiring after the shift.
    e.mu_eff_prev = mu_eff_now - delta;
}

void spawn_entrants(Economy& e) {
    for (std::int64_t k = 0; k < e.params.nu; ++k) {
        FirmState f;
        f.id = e.next_firm_id++;
        f.mu = draw_uniform(e.params.mu_min, e.params.mu_max, e.rng);
        f.planned_workers = draw_uniform_int(e.params.entry_size_min, e.params.entry_size_max, e.rng);
        f.birth_t = e.t;
        f.entrant = true;
        e.firms.push_back(f);
    }
}

TimeSeriesRow advance(Economy& e) {
    e.journal.begin_iteration();
    const SimParams& prm = e.params;

    for (auto& f : e.firms) {
        if (f.entrant) {
            f.entrant = false;
            continue;
        }
        f.planned_workers =
            plan_workforce(plan_production(f, prm.price), f.mu, prm.price, prm.wage, e.rng);
    }

    run_job_market(e);
    const double mu_eff_now = mu_eff(e);
    e.last_step.mu_eff = mu_eff_now;

    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        take_credit(e, i);
    }
    pay_wages(e);
    for (auto& f : e.firms) {
        f.q_produced = produce(f.mu, f.n_workers, prm.wage, prm.price, e.rng);
    }

    std::vector<std::int64_t> worker_demand;
    consumption_demand(e, worker_demand);
    run_goods_market(e, worker_demand);

    for (std::size_t i = 0; i < e.firms.size(); ++i) {
        settle_accounts(e, i);
    }
    resolve_exits(e);
    if (e.last_step.employed > 0) {
        recenter_margins(e, mu_eff_now);
    }
    spawn_entrants(e);

    const AuditReport report = audit(e);
    if (!report.ok) {
        throw AuditFailure(report);
    }

    const LedgerAggregates agg = aggregates(e);
    TimeSeriesRow row;
    row.t = e.t;
    row.unemployment_rate =
        1.0 - static_cast<double>(e.last_step.employed) / static_cast<double>(prm.n_workers);
    row.n_active_firms = static_cast<std::int64_t>(e.firms.size());
    row.n_bankruptcies = e.last_step.n_bankruptcies;
    row.job_losses_bankruptcy = e.last_step.job_losses_bankruptcy;
    row.aggregate_debt = agg.aggregate_debt;
    row.mu_eff = mu_eff_now;
    row.total_output = e.last_step.total_output;
    row.total_demand = e.last_step.total_demand;
    row.total_sold = e.last_step.total_sold;
    row.bank_equity = agg.bank_equity;
    row.conservation_residual = report.residual;

    ++e.t;
    return row;
}

} // namespace sfcabm
