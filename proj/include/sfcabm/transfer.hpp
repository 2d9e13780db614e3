#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sfcabm {

enum class TransferKind : std::uint8_t {
    wage,
    loan_issue,
    purchase,
    interest,
    repayment,
    write_off,
    overdraft,
    /// Cash of a firm that left the market without defaulting (no workforce,
    /// no debt) passes to the bank.
    dissolution,
};

std::string_view to_string(TransferKind kind);

enum class AccountKind : std::uint8_t { firm, worker, bank, market };

/// Account handle. For firms and workers `index` is the position in the
/// economy's container at posting time; the bank and the goods-market
/// clearing account ignore it.
struct AccountRef {
    AccountKind kind = AccountKind::bank;
    std::size_t index = 0;

    static constexpr AccountRef firm(std::size_t i) { return {AccountKind::firm, i}; }
    static constexpr AccountRef worker(std::size_t i) { return {AccountKind::worker, i}; }
    static constexpr AccountRef bank() { return {AccountKind::bank, 0}; }
    static constexpr AccountRef market() { return {AccountKind::market, 0}; }

    bool operator==(const AccountRef&) const = default;
};

struct Transfer {
    std::int64_t t = 0;
    TransferKind kind = TransferKind::wage;
    AccountRef from;
    AccountRef to;
    double amount = 0.0;
};

/// Journal entry with firm indices resolved to the stable firm id.
struct JournalEntry {
    std::int64_t t = 0;
    TransferKind kind = TransferKind::wage;
    AccountKind from_kind = AccountKind::bank;
    std::uint64_t from_id = 0;
    AccountKind to_kind = AccountKind::bank;
    std::uint64_t to_id = 0;
    double amount = 0.0;
};

/// Per-iteration flow counters plus an optional full journal.
struct Journal {
    bool retain = false;
    std::vector<JournalEntry> entries;

    double gross_flow = 0.0;
    double gross_flow_cum = 0.0;
    double interest_flow = 0.0;
    double write_off_flow = 0.0;

    void begin_iteration() {
        gross_flow = 0.0;
        interest_flow = 0.0;
        write_off_flow = 0.0;
        entries.clear();
    }
};

} // namespace sfcabm
