#include "sfcabm/ledger.hpp"

#include <cmath>

namespace sfcabm {

namespace {

// Neumaier compensated sum; the residual adds many terms of similar size
// with opposite signs.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

FirmState& firm_at(Economy& e, const AccountRef& ref) {
    if (ref.kind != AccountKind::firm) {
        throw std::invalid_argument("transfer: expected a firm account");
    }
    if (ref.index >= e.firms.size()) {
        throw std::invalid_argument("transfer: unknown firm account " + std::to_string(ref.index));
    }
    return e.firms[ref.index];
}

WorkerState& worker_at(Economy& e, const AccountRef& ref) {
    if (ref.kind != AccountKind::worker) {
        throw std::invalid_argument("transfer: expected a worker account");
    }
    if (ref.index >= e.workers.size()) {
        throw std::invalid_argument("transfer: unknown worker account " + std::to_string(ref.index));
    }
    return e.workers[ref.index];
}

void require_bank(const AccountRef& ref) {
    if (ref.kind != AccountKind::bank) {
        throw std::invalid_argument("transfer: expected the bank account");
    }
}

double& cash_of(Economy& e, const AccountRef& ref) {
    switch (ref.kind) {
    case AccountKind::firm:
        return firm_at(e, ref).cash;
    case AccountKind::worker:
        return worker_at(e, ref).savings;
    case AccountKind::market:
        return e.market_clearing;
    case AccountKind::bank:
        break;
    }
    throw std::invalid_argument("transfer: the bank holds no cash account for purchases");
}

std::uint64_t resolve_id(const Economy& e, const AccountRef& ref) {
    return ref.kind == AccountKind::firm ? e.firms[ref.index].id : ref.index;
}

} // namespace

std::string_view to_string(TransferKind kind) {
    switch (kind) {
    case TransferKind::wage: return "wage";
    case TransferKind::loan_issue: return "loan_issue";
    case TransferKind::purchase: return "purchase";
    case TransferKind::interest: return "interest";
    case TransferKind::repayment: return "repayment";
    case TransferKind::write_off: return "write_off";
    case TransferKind::overdraft: return "overdraft";
    case TransferKind::dissolution: return "dissolution";
    }
    return "unknown";
}

AuditFailure::AuditFailure(const AuditReport& report)
    : std::runtime_error("conservation audit failed at t=" + std::to_string(report.t) +
                         ": residual " + std::to_string(report.residual) + ", loan mirror error " +
                         std::to_string(report.loan_mirror_error) + ", tolerance " +
                         std::to_string(report.tolerance)),
      report_(report) {}

void post(Economy& e, const Transfer& tr) {
    const double a = tr.amount;
    if (!(a >= 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("transfer: amount must be finite and >= 0");
    }
    switch (tr.kind) {
    case TransferKind::wage: {
        FirmState& f = firm_at(e, tr.from);
        WorkerState& w = worker_at(e, tr.to);
        f.cash -= a;
        w.savings += a;
        break;
    }
    case TransferKind::loan_issue:
    case TransferKind::overdraft: {
        require_bank(tr.from);
        FirmState& f = firm_at(e, tr.to);
        f.cash += a;
        f.debt += a;
        e.bank.loans_outstanding += a;
        break;
    }
    case TransferKind::purchase: {
        if ((tr.from.kind == AccountKind::market) == (tr.to.kind == AccountKind::market)) {
            throw std::invalid_argument("purchase: exactly one side must be the market account");
        }
        double& src = cash_of(e, tr.from);
        double& dst = cash_of(e, tr.to);
        src -= a;
        dst += a;
        break;
    }
    case TransferKind::interest: {
        FirmState& f = firm_at(e, tr.from);
        require_bank(tr.to);
        f.cash -= a;
        e.bank.interest_income_cum += a;
        e.bank.equity += a;
        e.journal.interest_flow += a;
        break;
    }
    case TransferKind::repayment: {
        FirmState& f = firm_at(e, tr.from);
        require_bank(tr.to);
        f.cash -= a;
        f.debt -= a;
        e.bank.loans_outstanding -= a;
        break;
    }
    case TransferKind::write_off: {
        require_bank(tr.from);
        FirmState& f = firm_at(e, tr.to);
        f.debt -= a;
        e.bank.loans_outstanding -= a;
        e.bank.write_offs_cum += a;
        e.bank.equity -= a;
        e.journal.write_off_flow += a;
        break;
    }
    case TransferKind::dissolution: {
        FirmState& f = firm_at(e, tr.from);
        require_bank(tr.to);
        f.cash -= a;
        e.bank.dissolution_income_cum += a;
        e.bank.equity += a;
        break;
    }
    }
    e.journal.gross_flow += a;
    e.journal.gross_flow_cum += a;
    if (e.journal.retain) {
        e.journal.entries.push_back({tr.t, tr.kind, tr.from.kind, resolve_id(e, tr.from), tr.to.kind,
                                     resolve_id(e, tr.to), a});
    }
}

AuditReport audit(const Economy& e, const AuditTolerance& tol) {
    CompensatedSum residual;
    CompensatedSum debt;
    for (const auto& f : e.firms) {
        residual.add(f.cash);
        residual.add(-f.debt);
        debt.add(f.debt);
    }
    for (const auto& w : e.workers) {
        residual.add(w.savings);
    }
    residual.add(e.bank.equity);
    residual.add(e.market_clearing);

    AuditReport r;
    r.t = e.t;
    r.residual = residual.value();
    r.loan_mirror_error = e.bank.loans_outstanding - debt.value();
    r.gross_flow = e.journal.gross_flow;
    r.tolerance = std::max(tol.absolute_floor, tol.rel_tol * e.journal.gross_flow_cum);
    r.ok = std::abs(r.residual) <= r.tolerance && std::abs(r.loan_mirror_error) <= r.tolerance;
    return r;
}

LedgerAggregates aggregates(const Economy& e) {
    LedgerAggregates out;
    CompensatedSum debt;
    for (const auto& f : e.firms) {
        debt.add(f.debt);
    }
    out.aggregate_debt = debt.value();
    out.bank_equity = e.bank.equity;
    out.interest_flow = e.journal.interest_flow;
    out.write_off_flow = e.journal.write_off_flow;
    return out;
}

} // namespace sfcabm
