#include "zeroblock/churn.hpp"

#include "zeroblock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace zeroblock {

using boost::multiprecision::cpp_int;

namespace {

constexpr std::uint64_t mc_chunk = 1 << 14;

std::uint64_t join_chunk(const ChurnParams& p, std::uint64_t count, std::uint64_t seed)
{
    Rng rng(seed);
    const std::uint64_t need = p.sigma / 2 + 1;
    std::uint64_t ok = 0;
    for (std::uint64_t k = 0; k < count; ++k) {
        if (sample_honest(p, rng) >= need) ++ok;
    }
    return ok;
}

double to_double(const Rational& r)
{
    return static_cast<double>(r);
}

} // namespace

void validate(const ChurnParams& p)
{
    if (p.eta + p.psi != p.n) throw DomainError("eta + psi must equal n");
    if (p.sigma < 1 || p.sigma > p.n) throw DomainError("sigma must be in [1, n]");
}

std::vector<ChurnParams> reference_join_rows()
{
    std::vector<ChurnParams> rows;
    for (std::uint64_t psi : {250, 750, 1250, 1750}) rows.push_back(ChurnParams{5000, 8, 5000 - psi, psi});
    return rows;
}

cpp_int binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n) return 0;
    k = std::min(k, n - k);
    cpp_int r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

Rational join_majority_probability_exact(const ChurnParams& p)
{
    validate(p);
    cpp_int favourable = 0;
    for (std::uint64_t h = p.sigma / 2 + 1; h <= p.sigma; ++h) {
        favourable += binomial(p.eta, h) * binomial(p.psi, p.sigma - h);
    }
    return Rational(favourable, binomial(p.n, p.sigma));
}

double join_majority_probability(const ChurnParams& p)
{
    return to_double(join_majority_probability_exact(p));
}

HomogeneousProbabilities homogeneous_probability_exact(const ChurnParams& p)
{
    validate(p);
    const cpp_int total = binomial(p.n, p.sigma);
    HomogeneousProbabilities r;
    r.hcorr = Rational(binomial(p.eta, p.sigma), total);
    r.hnotc = Rational(binomial(p.psi, p.sigma), total);
    r.hom = r.hcorr + r.hnotc;
    return r;
}

HomogeneousProbabilitiesF homogeneous_probability(const ChurnParams& p)
{
    const auto e = homogeneous_probability_exact(p);
    return {to_double(e.hom), to_double(e.hcorr), to_double(e.hnotc)};
}

double retry_success_probability(const ChurnParams& p, std::uint64_t m)
{
    const auto h = homogeneous_probability(p);
    return std::pow(1.0 - h.hom, static_cast<double>(m)) * h.hcorr;
}

JoinOutcome join_protocol(std::span<const Chain> sampled, JoinStrategy strategy, const Target& target,
                          std::optional<BlockId> honest_head)
{
    JoinOutcome out;
    out.strategy = strategy;
    std::map<BlockId, std::pair<std::uint64_t, std::size_t>> votes;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        if (auto fault = validate_chain(sampled[i], target)) {
            out.excluded.push_back(ExcludedChain{i, *fault});
            continue;
        }
        auto [it, fresh] = votes.try_emplace(sampled[i].head_id(), 0, i);
        ++it->second.first;
        if (honest_head && sampled[i].head_id() == *honest_head) ++out.honest_selected;
    }

    const std::pair<std::uint64_t, std::size_t>* best = nullptr;
    for (const auto& [id, v] : votes) {
        if (!best || v.first > best->first) best = &v;
    }
    out.support = best ? best->first : 0;

    const std::uint64_t sigma = sampled.size();
    if (strategy == JoinStrategy::Majority) {
        if (best && 2 * best->first > sigma) {
            out.status = JoinStatus::Chosen;
            out.chosen_chain = sampled[best->second];
        } else {
            out.status = JoinStatus::Inconclusive;
        }
    } else {
        if (best && sigma > 0 && best->first == sigma) {
            out.status = JoinStatus::Chosen;
            out.chosen_chain = sampled[best->second];
        } else {
            out.status = JoinStatus::Retry;
        }
    }
    return out;
}

std::uint64_t sample_honest(const ChurnParams& p, Rng& rng)
{
    std::uint64_t honest_left = p.eta, remaining = p.n, honest = 0;
    for (std::uint64_t k = 0; k < p.sigma; ++k, --remaining) {
        if (uniform01(rng) * static_cast<double>(remaining) < static_cast<double>(honest_left)) {
            ++honest;
            --honest_left;
        }
    }
    return honest;
}

JoinEstimate estimate_join_success(const ChurnParams& p, std::uint64_t trials, std::uint64_t seed)
{
    validate(p);
    const auto chunks = static_cast<std::int64_t>((trials + mc_chunk - 1) / mc_chunk);
    std::uint64_t ok = 0;
#pragma omp parallel for reduction(+ : ok) schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
        const auto begin = static_cast<std::uint64_t>(c) * mc_chunk;
        ok += join_chunk(p, std::min(mc_chunk, trials - begin), seed + static_cast<std::uint64_t>(c));
    }
    return {trials, ok};
}

JoinEstimate estimate_join_success_serial(const ChurnParams& p, std::uint64_t trials, std::uint64_t seed)
{
    validate(p);
    std::uint64_t ok = 0;
    for (std::uint64_t begin = 0, c = 0; begin < trials; begin += mc_chunk, ++c) {
        ok += join_chunk(p, std::min(mc_chunk, trials - begin), seed + c);
    }
    return {trials, ok};
}

} // namespace zeroblock
