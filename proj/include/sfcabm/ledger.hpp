#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sfcabm/economy.hpp"
#include "sfcabm/transfer.hpp"

namespace sfcabm {

struct AuditTolerance {
    double absolute_floor = 1e-6;
    double rel_tol = 1e-12;
};

struct AuditReport {
    std::int64_t t = 0;
    /// Sum of firm equity, worker savings, bank equity and the clearing account.
    double residual = 0.0;
    /// bank.loans_outstanding minus the sum of firm debt.
    double loan_mirror_error = 0.0;
    double gross_flow = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

struct LedgerAggregates {
    double aggregate_debt = 0.0;
    double bank_equity = 0.0;
    double interest_flow = 0.0;
    double write_off_flow = 0.0;
};

/// Raised when the conservation audit fails inside advance().
class AuditFailure : public std::runtime_error {
public:
    explicit AuditFailure(const AuditReport& report);
    const AuditReport& report() const noexcept { return report_; }

private:
    AuditReport report_;
};

/// Applies one balanced transfer to the economy's accounts and records it.
/// Throws std::invalid_argument for negative amounts, unknown accounts or an
/// account pairing the transfer kind does not allow.
void post(Economy& economy, const Transfer& transfer);

AuditReport audit(const Economy& economy, const AuditTolerance& tolerance = {});

LedgerAggregates aggregates(const Economy& economy);

} // namespace sfcabm
