#pragma once

#include "zeroblock/hash.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>
#include <span>

namespace zeroblock {

using Uint256 = boost::multiprecision::uint256_t;
using BigFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

using MatIndex = std::uint64_t;
using Rng = std::mt19937_64;

//! (2^16 - 1) * 2^208, the largest admissible network target.
Uint256 max_target();

/**
 * Proof-of-work threshold.
 *
 * A digest satisfies the target when its leading `width` bits, read as a
 * big-endian unsigned integer, are strictly below `threshold`. Network
 * targets use the full 256-bit width and are bounded by max_target(); toy
 * targets use a reduced width so that desk-scale runs can mine real hashes.
 */
class Target {
public:
    static Target network(const Uint256& threshold);
    static Target toy(unsigned width, std::uint64_t threshold);

    const Uint256& threshold() const { return threshold_; }
    unsigned width() const { return width_; }
    bool is_network() const { return width_ == 256; }

    bool admits(const Digest& digest) const;
    //! threshold / 2^width as a double.
    double success_ratio() const;

    friend bool operator==(const Target&, const Target&) = default;

private:
    Target(Uint256 threshold, unsigned width) : threshold_(std::move(threshold)), width_(width) {}

    Uint256 threshold_;
    unsigned width_;
};

//! D = maxTarget / T, kept at 256-bit binary precision.
class Difficulty {
public:
    explicit Difficulty(BigFloat value);
    explicit Difficulty(double value) : Difficulty(BigFloat(value)) {}

    const BigFloat& value() const { return value_; }
    double to_double() const { return value_.convert_to<double>(); }

private:
    BigFloat value_;
};

struct HashPower {
    explicit HashPower(double hashes_per_second);
    double rate;
};

Difficulty difficulty_from_target(const Target& t);
//! Inverse of difficulty_from_target, truncated to an integer threshold.
Target target_from_difficulty(const Difficulty& d);

//! Probability that a single nonce solves the puzzle, 1 / (D * 2^32).
double success_probability(const Difficulty& d);
//! Expected seconds to find a block, D * 2^32 / rate.
double expected_time(const Difficulty& d, HashPower hp);

struct RetargetParams {
    std::size_t epoch = 2016;
    double avt_net = 600.0;
    //! Adjustment is limited to [1/clamp, clamp] per epoch.
    double clamp = 4.0;
};

/**
 * Proportional retarget: d * (epoch * avt_net) / (last discovery - epoch_start).
 * `recent` are Standard-block discovery times (dummies excluded); only the
 * last `epoch` entries are used.
 */
Difficulty adjust_difficulty(std::span<const double> recent, double epoch_start, const Difficulty& d,
                             const RetargetParams& params = {});

/**
 * Global `mat` interval grid. Interval i (i >= 1) covers (boundary(i-1), boundary(i)].
 * `offset` shifts one miner's view of the grid (clock skew experiments).
 */
struct MatSchedule {
    double avt_net = 600.0;
    double ipt = 60.0;
    double offset = 0.0;

    double mat() const { return avt_net + ipt; }
    double boundary(MatIndex index) const { return offset + static_cast<double>(index) * mat(); }
    //! Index of the interval containing t.
    MatIndex interval_at(double t) const;
};

double mat_boundary(const MatSchedule& s, MatIndex index);

//! Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);
//! Exponential inter-arrival time with mean 1 / rate.
double sample_block_interval(double rate, Rng& rng);

//! FHF(prev, nonce): SHA-256 over prev digest followed by the big-endian nonce.
Digest pow_hash(const BlockId& prev, std::uint64_t nonce);
bool try_nonce(const BlockId& prev, std::uint64_t nonce, const Target& t);

struct NonceSearch {
    std::uint64_t nonce = 0;
    std::uint64_t attempts = 0;
    bool found = false;
};

//! Sequential nonce search from `start`, giving up after `max_attempts`.
NonceSearch find_nonce(const BlockId& prev, const Target& t, std::uint64_t start,
                       std::uint64_t max_attempts = UINT64_MAX);

//! Target used by the simulator and chain tools unless configured otherwise (p = 1/16).
Target default_pow_target();

} // namespace zeroblock
