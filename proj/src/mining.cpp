#include "zeroblock/mining.hpp"

#include "zeroblock/errors.hpp"

#include <algorithm>
#include <cmath>

namespace zeroblock {

namespace {

const double two_pow_32 = 4294967296.0;

std::uint64_t leading_u64(const Digest& d)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return v;
}

} // namespace

Uint256 max_target()
{
    static const Uint256 value = (Uint256(1) << 16) - 1 << 208;
    return value;
}

Target Target::network(const Uint256& threshold)
{
    if (threshold == 0) throw DomainError("target must be positive");
    if (threshold > max_target()) throw DomainError("target exceeds maxTarget");
    return Target(threshold, 256);
}

Target Target::toy(unsigned width, std::uint64_t threshold)
{
    if (width < 1 || width > 63) throw DomainError("toy target width must be in [1, 63]");
    if (threshold == 0 || threshold > (std::uint64_t{1} << width)) {
        throw DomainError("toy target threshold must be in (0, 2^width]");
    }
    return Target(Uint256(threshold), width);
}

bool Target::admits(const Digest& digest) const
{
    if (width_ < 64) {
        const std::uint64_t top = leading_u64(digest) >> (64 - width_);
        return top < threshold_.convert_to<std::uint64_t>();
    }
    Uint256 value;
    boost::multiprecision::import_bits(value, digest.begin(), digest.end(), 8, true);
    return (value >> (256 - width_)) < threshold_;
}

double Target::success_ratio() const
{
    return std::ldexp(threshold_.convert_to<double>(), -static_cast<int>(width_));
}

Difficulty::Difficulty(BigFloat value) : value_(std::move(value))
{
    if (!(value_ > 0)) throw DomainError("difficulty must be positive");
}

HashPower::HashPower(double hashes_per_second) : rate(hashes_per_second)
{
    if (!(rate > 0)) throw DomainError("hash power must be positive");
}

Difficulty difficulty_from_target(const Target& t)
{
    if (!t.is_network()) throw DomainError("difficulty is defined for full-width network targets only");
    if (t.threshold() == 0) throw DomainError("target must be positive");
    return Difficulty(BigFloat(max_target()) / BigFloat(t.threshold()));
}

Target target_from_difficulty(const Difficulty& d)
{
    if (d.value() < 1) throw DomainError("difficulty below 1 maps above maxTarget");
    const BigFloat exact = BigFloat(max_target()) / d.value();
    const Uint256 rounded = static_cast<Uint256>(boost::multiprecision::round(exact));
    return Target::network(std::clamp(rounded, Uint256(1), max_target()));
}

double success_probability(const Difficulty& d)
{
    return 1.0 / (d.to_double() * two_pow_32);
}

double expected_time(const Difficulty& d, HashPower hp)
{
    return d.to_double() * two_pow_32 / hp.rate;
}

Difficulty adjust_difficulty(std::span<const double> recent, double epoch_start, const Difficulty& d,
                             const RetargetParams& params)
{
    if (params.epoch == 0) throw PreconditionError("retarget epoch must be positive");
    if (!(params.clamp >= 1.0)) throw PreconditionError("retarget clamp must be >= 1");
    if (recent.size() < params.epoch) {
        throw InsufficientHistoryError("retarget needs " + std::to_string(params.epoch) +
                                       " discovery times, got " + std::to_string(recent.size()));
    }
    const double expected_span = static_cast<double>(params.epoch) * params.avt_net;
    const double actual_span = recent.back() - epoch_start;
    double factor = actual_span > 0 ? expected_span / actual_span : params.clamp;
    factor = std::clamp(factor, 1.0 / params.clamp, params.clamp);
    return Difficulty(d.value() * BigFloat(factor));
}

MatIndex MatSchedule::interval_at(double t) const
{
    const double rel = (t - offset) / mat();
    if (rel <= 1.0) return 1;
    return static_cast<MatIndex>(std::ceil(rel));
}

double mat_boundary(const MatSchedule& s, MatIndex index)
{
    return s.boundary(index);
}

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_block_interval(double rate, Rng& rng)
{
    if (!(rate > 0)) throw PreconditionError("block rate must be positive");
    return -std::log1p(-uniform01(rng)) / rate;
}

Digest pow_hash(const BlockId& prev, std::uint64_t nonce)
{
    std::array<std::uint8_t, 40> buf;
    std::copy(prev.digest.begin(), prev.digest.end(), buf.begin());
    for (int i = 0; i < 8; ++i) buf[32 + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    return sha256(buf);
}

bool try_nonce(const BlockId& prev, std::uint64_t nonce, const Target& t)
{
    return t.admits(pow_hash(prev, nonce));
}

NonceSearch find_nonce(const BlockId& prev, const Target& t, std::uint64_t start, std::uint64_t max_attempts)
{
    NonceSearch search;
    std::uint64_t nonce = start;
    while (search.attempts < max_attempts) {
        ++search.attempts;
        if (try_nonce(prev, nonce, t)) {
            search.nonce = nonce;
            search.found = true;
            return search;
        }
        ++nonce;
    }
    return search;
}

Target default_pow_target()
{
    return Target::toy(16, 4096);
}

} // namespace zeroblock
