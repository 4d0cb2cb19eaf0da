#pragma once

#include "zeroblock/analytics.hpp"

#include <string>
#include <string_view>

namespace zeroblock {

//! Header of the per-repetition report CSV.
inline constexpr std::string_view report_csv_header =
    "miner,role,hash_power,minted,canonical,orphaned,rejected,share,accidental_forks,intentional_forks,fork_rate,"
    "partial";

/** One row per miner followed by a `total` row. */
std::string format_report_csv(const RevenueReport& report);
//! Inverse of format_report_csv. Throws ParseError with the offending line.
RevenueReport parse_report_csv(std::string_view text);

//! Shares sum to 1 (within `tol`) and per-miner counts add up to the totals row.
bool report_reconciles(const RevenueReport& report, double tol = 1e-6);

} // namespace zeroblock
