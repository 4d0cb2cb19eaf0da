#pragma once

#include "zeroblock/chain.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace zeroblock {

using Rational = boost::multiprecision::cpp_rational;

struct ChurnParams {
    std::uint64_t n = 0;      //!< network size
    std::uint64_t sigma = 0;  //!< peers sampled
    std::uint64_t eta = 0;    //!< honest peers
    std::uint64_t psi = 0;    //!< adversarial peers
};

//! Throws DomainError unless eta + psi = n and 1 <= sigma <= n.
void validate(const ChurnParams& p);

//! The four rows of the bootstrap table: n = 5000, sigma = 8, psi in {250, 750, 1250, 1750}.
std::vector<ChurnParams> reference_join_rows();

boost::multiprecision::cpp_int binomial(std::uint64_t n, std::uint64_t k);

//! P(h >= floor(sigma/2) + 1) for h honest peers in a uniform sample without replacement.
Rational join_majority_probability_exact(const ChurnParams& p);
double join_majority_probability(const ChurnParams& p);

struct HomogeneousProbabilities {
    Rational hom;    //!< all honest or all adversarial
    Rational hcorr;  //!< all honest
    Rational hnotc;  //!< all adversarial
};

HomogeneousProbabilities homogeneous_probability_exact(const ChurnParams& p);

struct HomogeneousProbabilitiesF {
    double hom = 0.0;
    double hcorr = 0.0;
    double hnotc = 0.0;
};

HomogeneousProbabilitiesF homogeneous_probability(const ChurnParams& p);

//! (1 - P_hom)^m P_hcorr.
double retry_success_probability(const ChurnParams& p, std::uint64_t m);

enum class JoinStrategy { Majority, HomogeneousRetry };
enum class JoinStatus { Chosen, Inconclusive, Retry };

struct ExcludedChain {
    std::size_t position = 0;
    ChainFault fault;
};

struct JoinOutcome {
    JoinStatus status = JoinStatus::Inconclusive;
    std::optional<Chain> chosen_chain;
    JoinStrategy strategy = JoinStrategy::Majority;
    std::uint64_t trials = 1;
    //! Peers holding the chosen (or most common) chain.
    std::uint64_t support = 0;
    //! Peers holding `honest_head`, when one was given.
    std::uint64_t honest_selected = 0;
    std::vector<ExcludedChain> excluded;
};

/**
 * Chain selection for a joining node from the chains of its sampled peers.
 * Chains are equal when their head ids are. Invalid chains are excluded but
 * still count towards the sample size.
 */
JoinOutcome join_protocol(std::span<const Chain> sampled, JoinStrategy strategy, const Target& target,
                          std::optional<BlockId> honest_head = std::nullopt);

//! Number of honest peers in one uniform sample of sigma out of n without replacement.
std::uint64_t sample_honest(const ChurnParams& p, Rng& rng);

struct JoinEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double frequency() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

//! Monte Carlo frequency of an honest majority in the sample. Chunked; both variants agree exactly.
JoinEstimate estimate_join_success(const ChurnParams& p, std::uint64_t trials, std::uint64_t seed);
JoinEstimate estimate_join_success_serial(const ChurnParams& p, std::uint64_t trials, std::uint64_t seed);

} // namespace zeroblock
