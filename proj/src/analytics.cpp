#include "zeroblock/analytics.hpp"

#include "zeroblock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace zeroblock {

namespace {

constexpr std::uint64_t mc_chunk = 1 << 16;

// Arrival times of a rate-`rate` Poisson process on [0, 1), capped at two.
unsigned arrivals(double rate, Rng& rng, double& first)
{
    unsigned n = 0;
    double t = 0.0;
    first = 1.0;
    while (n < 2) {
        t += sample_block_interval(rate, rng);
        if (t >= 1.0) break;
        if (n == 0) first = t;
        ++n;
    }
    return n;
}

std::uint64_t event4_chunk(double sp, std::uint64_t count, std::uint64_t seed)
{
    Rng rng(seed);
    const double hp = 1.0 - sp;
    std::uint64_t hits = 0;
    for (std::uint64_t k = 0; k < count; ++k) {
        double ts, th;
        const unsigned ns = arrivals(sp, rng, ts);
        const unsigned nh = arrivals(hp, rng, th);
        if (ns == 1 && nh == 1 && ts < th) ++hits;
    }
    return hits;
}

void check_sp(double sp)
{
    if (!(sp > 0.0 && sp < 1.0)) throw DomainError("sp must be in (0, 1)");
}

} // namespace

double selfish_threshold_lower(double gamma)
{
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must be in [0, 1]");
    return (1.0 - gamma) / (3.0 - 2.0 * gamma);
}

double poisson_pmf(unsigned rho, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
    return std::exp(-lambda + rho * std::log(lambda) - std::lgamma(rho + 1.0));
}

double event4_max_probability(double sp)
{
    check_sp(sp);
    const double hp = 1.0 - sp;
    return (sp * std::exp(-sp)) * (hp * std::exp(-hp)) * sp;
}

Event4Estimate event4_monte_carlo(double sp, std::uint64_t trials, std::uint64_t seed)
{
    check_sp(sp);
    const auto chunks = static_cast<std::int64_t>((trials + mc_chunk - 1) / mc_chunk);
    std::uint64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
        const auto begin = static_cast<std::uint64_t>(c) * mc_chunk;
        hits += event4_chunk(sp, std::min(mc_chunk, trials - begin), seed + static_cast<std::uint64_t>(c));
    }
    return {trials, hits};
}

Event4Estimate event4_monte_carlo_serial(double sp, std::uint64_t trials, std::uint64_t seed)
{
    check_sp(sp);
    std::uint64_t hits = 0;
    for (std::uint64_t begin = 0, c = 0; begin < trials; begin += mc_chunk, ++c) {
        hits += event4_chunk(sp, std::min(mc_chunk, trials - begin), seed + c);
    }
    return {trials, hits};
}

std::string_view to_string(Disposition d)
{
    switch (d) {
    case Disposition::Canonical: return "canonical";
    case Disposition::Orphaned: return "orphaned";
    case Disposition::Rejected: return "rejected";
    }
    return "?";
}

const Chain& canonical_chain(const SimTrace& trace)
{
    struct Group {
        double power = 0.0;
        MinerId first = 0;
        const Chain* chain = nullptr;
    };
    std::map<BlockId, Group> groups;
    for (const auto& [spec, chain] : trace.final_chains) {
        if (spec.role != Role::Honest) continue;
        auto [it, fresh] = groups.try_emplace(chain.head_id(), Group{0.0, spec.id, &chain});
        it->second.power += spec.hash_share;
        it->second.first = std::min(it->second.first, spec.id);
    }
    if (groups.empty()) throw PreconditionError("trace has no honest final chain");
    const Group* best = nullptr;
    for (const auto& [id, g] : groups) {
        if (!best) {
            best = &g;
            continue;
        }
        const auto gh = g.chain->standard_height(), bh = best->chain->standard_height();
        if (g.power > best->power + 1e-12 ||
            (std::abs(g.power - best->power) <= 1e-12 && (gh > bh || (gh == bh && g.first < best->first)))) {
            best = &g;
        }
    }
    return *best->chain;
}

Disposition disposition(const SimTrace& trace, const Chain& canonical, const BlockId& id)
{
    if (canonical.contains(id)) return Disposition::Canonical;
    if (trace.rejected.contains(id)) return Disposition::Rejected;
    return Disposition::Orphaned;
}

RevenueReport revenue_shares(const SimTrace& trace, double fork_window)
{
    const Chain& canonical = canonical_chain(trace);
    std::unordered_set<BlockId> on_canonical;
    for (const Chain::Node* n = canonical.node(); n; n = n->prev.get()) {
        if (n->block.is_standard()) on_canonical.insert(n->block.id());
    }

    RevenueReport report;
    report.partial = !trace.horizon_reached;
    std::map<MinerId, std::size_t> row;
    for (const auto& [spec, chain] : trace.final_chains) {
        row.emplace(spec.id, report.miners.size());
        report.miners.push_back(MinerRevenue{spec.id, spec.role, spec.hash_share});
    }

    std::map<BlockId, std::vector<const MintedBlock*>> children;
    for (const auto& m : trace.minted) {
        auto& r = report.miners.at(row.at(m.block.creator()));
        ++r.minted;
        if (on_canonical.contains(m.block.id())) ++r.canonical;
        else if (trace.rejected.contains(m.block.id())) ++r.rejected;
        else ++r.orphaned;
        if (m.first_published) children[*m.block.parent()].push_back(&m);
    }

    for (const auto& [parent, kids] : children) {
        if (kids.size() < 2) continue;
        const bool intentional =
            std::any_of(kids.begin(), kids.end(), [](const MintedBlock* m) { return m->adversarial; });
        double lo = kids.front()->first_published.value(), hi = lo;
        for (const auto* m : kids) {
            lo = std::min(lo, *m->first_published);
            hi = std::max(hi, *m->first_published);
        }
        const bool accidental = !intentional && hi - lo <= fork_window;
        if (!intentional && !accidental) {
            ++report.unclassified_forks;
            continue;
        }
        std::set<MinerId> involved;
        for (const auto* m : kids) involved.insert(m->block.creator());
        for (MinerId id : involved) {
            auto& r = report.miners.at(row.at(id));
            if (intentional) ++r.intentional_forks;
            else ++r.accidental_forks;
        }
        if (intentional) ++report.totals.intentional_forks;
        else ++report.totals.accidental_forks;
    }

    report.totals.hash_power = 0.0;
    for (auto& r : report.miners) {
        report.totals.hash_power += r.hash_power;
        report.totals.minted += r.minted;
        report.totals.canonical += r.canonical;
        report.totals.orphaned += r.orphaned;
        report.totals.rejected += r.rejected;
    }
    for (auto& r : report.miners) {
        r.share = report.totals.canonical ? static_cast<double>(r.canonical) / report.totals.canonical : 0.0;
    }
    report.totals.share = report.totals.canonical ? 1.0 : 0.0;
    report.fork_rate = report.totals.canonical ? static_cast<double>(report.totals.accidental_forks) /
                                                     static_cast<double>(report.totals.canonical)
                                               : 0.0;
    return report;
}

double fork_rate(const SimTrace& trace, double fork_window)
{
    return revenue_shares(trace, fork_window).fork_rate;
}

std::uint64_t withheld_past_boundary(const SimTrace& trace, const MatSchedule& schedule)
{
    std::unordered_set<BlockId> late;
    for (const auto& [spec, chain] : trace.final_chains) {
        if (spec.role != Role::Honest) continue;
        for (const Chain::Node* n = chain.node(); n; n = n->prev.get()) {
            if (!n->block.is_standard()) continue;
            const auto& m = trace.minted[trace.minted_index.at(n->block.id())];
            if (!m.first_published || *m.first_published > schedule.boundary(n->block.mat_index())) {
                late.insert(n->block.id());
            }
        }
    }
    return late.size();
}

} // namespace zeroblock
