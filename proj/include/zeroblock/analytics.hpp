#pragma once

#include "zeroblock/simnet.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace zeroblock {

//! (1 - gamma) / (3 - 2 gamma): smallest adversary share for which withholding pays off.
double selfish_threshold_lower(double gamma);

//! e^-lambda lambda^rho / rho!
double poisson_pmf(unsigned rho, double lambda);

//! (sp e^-sp)(hp e^-hp) sp with hp = 1 - sp.
double event4_max_probability(double sp);

struct Event4Estimate {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double frequency() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
};

/**
 * Frequency of one adversary block followed by one honest block, and nothing
 * else, inside a window in which the network expects one block. Trials run in
 * fixed chunks seeded from `seed`, so both variants return identical counts.
 */
Event4Estimate event4_monte_carlo(double sp, std::uint64_t trials, std::uint64_t seed);
Event4Estimate event4_monte_carlo_serial(double sp, std::uint64_t trials, std::uint64_t seed);

enum class Disposition { Canonical, Orphaned, Rejected };

std::string_view to_string(Disposition d);

struct MinerRevenue {
    MinerId miner = 0;
    Role role = Role::Honest;
    double hash_power = 0.0;
    std::uint64_t minted = 0;
    std::uint64_t canonical = 0;
    std::uint64_t orphaned = 0;
    std::uint64_t rejected = 0;
    double share = 0.0;
    std::uint64_t accidental_forks = 0;
    std::uint64_t intentional_forks = 0;
};

struct RevenueReport {
    std::vector<MinerRevenue> miners;
    MinerRevenue totals;
    std::uint64_t unclassified_forks = 0;
    double fork_rate = 0.0;
    bool partial = false;
};

/** Final chain held by the honest miners with the most combined hash power. */
const Chain& canonical_chain(const SimTrace& trace);

Disposition disposition(const SimTrace& trace, const Chain& canonical, const BlockId& id);

/**
 * Revenue and fork statistics. A fork is a set of published Standard blocks
 * sharing a parent; it is intentional when an adversary block is involved and
 * accidental when all blocks are honest and were published within
 * `fork_window` seconds of each other.
 */
RevenueReport revenue_shares(const SimTrace& trace, double fork_window);

//! Accidental forks per canonical Standard block.
double fork_rate(const SimTrace& trace, double fork_window);

//! Standard blocks in any honest final chain that were first published after the end of their interval.
std::uint64_t withheld_past_boundary(const SimTrace& trace, const MatSchedule& schedule);

} // namespace zeroblock
