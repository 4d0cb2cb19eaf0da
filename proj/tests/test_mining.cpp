#include "support.hpp"

#include "zeroblock/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace zeroblock;
namespace mp = boost::multiprecision;

TEST_CASE("difficulty and target")
{
    const Uint256 max = max_target();
    CHECK(max == (Uint256(0xFFFF) << 208));
    CHECK(difficulty_from_target(Target::network(max)).to_double() == doctest::Approx(1.0));
    CHECK(difficulty_from_target(Target::network(max / 2)).to_double() == doctest::Approx(2.0));
    CHECK_THROWS_AS(Target::network(0), DomainError);
    CHECK_THROWS(Target::network(max + 1));

    std::mt19937_64 rng(99);
    for (int k = 0; k < 200; ++k) {
        Uint256 t = 0;
        for (int w = 0; w < 4; ++w) t = (t << 64) | rng();
        t = t % max + 1;
        const Target back = target_from_difficulty(difficulty_from_target(Target::network(t)));
        const Uint256 diff = back.threshold() > t ? back.threshold() - t : t - back.threshold();
        CHECK(diff <= 1);
    }
}

TEST_CASE("success probability and expected time")
{
    CHECK(success_probability(Difficulty(1.0)) == std::ldexp(1.0, -32));
    CHECK(success_probability(Difficulty(2.0)) == std::ldexp(1.0, -33));
    CHECK(expected_time(Difficulty(1.0), HashPower(std::ldexp(1.0, 32))) == doctest::Approx(1.0));
    const Difficulty d(12345.678);
    CHECK(expected_time(d, HashPower(2e9)) == doctest::Approx(expected_time(d, HashPower(1e9)) / 2));
    // Calibration with avt_net = 600 s.
    const HashPower net(std::ldexp(1.0, 32) * 1000.0 / 600.0);
    CHECK(expected_time(Difficulty(1000.0), net) == doctest::Approx(600.0));
    for (double dv : {1.0, 3.5, 1e6, 1e13}) {
        for (double rate : {1.0, 7e12}) {
            const Difficulty dd(dv);
            CHECK(std::abs(expected_time(dd, HashPower(rate)) * rate * success_probability(dd) - 1.0) < 1e-12);
        }
    }
    CHECK_THROWS(HashPower(0.0));
}

TEST_CASE("toy hash success frequency matches the exact ratio")
{
    // Brute force over a 20-bit toy hash: count admitted nonces against threshold / 2^20.
    const Target t = Target::toy(20, 1 << 14);
    CHECK(t.success_ratio() == doctest::Approx(1.0 / 64));
    const BlockId prev = make_genesis().id();
    const int trials = 1 << 16;
    int hits = 0;
    for (int n = 0; n < trials; ++n) {
        const Digest h = pow_hash(prev, static_cast<std::uint64_t>(n));
        const std::uint32_t top20 = (std::uint32_t{h[0]} << 12) | (std::uint32_t{h[1]} << 4) | (h[2] >> 4);
        const bool expected = top20 < (1u << 14);
        CHECK(try_nonce(prev, static_cast<std::uint64_t>(n), t) == expected);
        hits += expected;
    }
    const double p = 1.0 / 64, sd = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(hits / double(trials) - p) < 4 * sd);

    const Target permissive = Target::toy(20, 1 << 20);
    for (std::uint64_t n = 0; n < 100; ++n) CHECK(try_nonce(prev, n, permissive));
}

TEST_CASE("pow_hash is sha256 of prev and the big-endian nonce")
{
    const BlockId prev = make_genesis().id();
    std::vector<std::uint8_t> buf(prev.digest.begin(), prev.digest.end());
    put_be(buf, 0x0102030405060708ull, 8);
    CHECK(pow_hash(prev, 0x0102030405060708ull) == sha256(buf));
    CHECK(to_hex(sha256("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fixture mined at build time verifies")
{
    std::istringstream in(zbtest::slurp(ZB_POW_FIXTURE));
    std::string prev_hex;
    std::uint64_t nonce = 0, threshold = 0;
    unsigned width = 0;
    REQUIRE(static_cast<bool>(in >> prev_hex >> nonce >> width >> threshold));
    const auto prev = BlockId::from_hex(prev_hex);
    REQUIRE(prev);
    const Target t = Target::toy(width, threshold);
    CHECK(try_nonce(*prev, nonce, t));
    const auto search = find_nonce(*prev, t, 0);
    CHECK(search.found);
    CHECK(search.nonce == nonce);
    if (nonce > 0) CHECK_FALSE(try_nonce(*prev, nonce - 1, t));
}

TEST_CASE("retarget arithmetic")
{
    const RetargetParams p{4, 600.0, 4.0};
    const Difficulty d(10.0);
    const std::vector<double> on_time{600, 1200, 1800, 2400};
    CHECK(adjust_difficulty(on_time, 0.0, d, p).to_double() == doctest::Approx(10.0));
    const std::vector<double> fast{300, 600, 900, 1200};
    CHECK(adjust_difficulty(fast, 0.0, d, p).to_double() == doctest::Approx(20.0));
    // Hand computation: span 3000 - 1000 = 2000 s against 2400 s expected.
    const std::vector<double> toy{1500, 2100, 2600, 3000};
    CHECK(adjust_difficulty(toy, 1000.0, d, p).to_double() == doctest::Approx(10.0 * 2400.0 / 2000.0));
    const std::vector<double> very_fast{1, 2, 3, 4};
    CHECK(adjust_difficulty(very_fast, 0.0, d, p).to_double() == doctest::Approx(40.0));
    const std::vector<double> very_slow{1e6, 2e6, 3e6, 4e6};
    CHECK(adjust_difficulty(very_slow, 0.0, d, p).to_double() == doctest::Approx(2.5));
    const std::vector<double> short_history{600, 1200};
    CHECK_THROWS_AS(adjust_difficulty(short_history, 0.0, d, p), InsufficientHistoryError);
    const std::vector<double> bitcoin(2016, 0.0);
    std::vector<double> half(2016);
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = 300.0 * static_cast<double>(i + 1);
    CHECK(adjust_difficulty(half, 0.0, d).to_double() == doctest::Approx(20.0));
}

TEST_CASE("mat schedule")
{
    const MatSchedule s;
    CHECK(s.mat() == 660.0);
    CHECK(mat_boundary(s, 0) == 0.0);
    CHECK(mat_boundary(s, 1) == 660.0);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const MatIndex i = 1 + rng() % 100000;
        CHECK(s.boundary(i) - s.boundary(i - 1) == doctest::Approx(660.0));
        CHECK(s.interval_at(s.boundary(i)) == i);
        CHECK(s.interval_at(s.boundary(i) + 1e-3) == i + 1);
    }
}

TEST_CASE("exponential sampling")
{
    Rng a(42), b(42);
    for (int k = 0; k < 100; ++k) CHECK(sample_block_interval(0.5, a) == sample_block_interval(0.5, b));

    Rng rng(7);
    const int n = 1'000'000;
    const double rate = 1.0 / 600.0;
    double sum = 0.0;
    int within = 0;
    for (int k = 0; k < n; ++k) {
        const double x = sample_block_interval(rate, rng);
        sum += x;
        within += x <= 600.0;
    }
    CHECK(std::abs(sum / n - 600.0) / 600.0 < 0.01);
    const double p = 1.0 - std::exp(-1.0);
    CHECK(std::abs(within / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

namespace {

// Two-sided one-sample Kolmogorov-Smirnov statistic against Exp(rate).
double ks_exponential(std::vector<double> xs, double rate)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = 1.0 - std::exp(-rate * xs[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

} // namespace

TEST_CASE("hash mode inter-block times are exponential")
{
    SimConfig c;
    c.miners = {{1, Role::Honest, 1.0}};
    c.zeroblock = false;
    c.backend = MiningBackend::Hash;
    c.pow_target = Target::toy(16, 16);
    c.duration_blocks = 10000;
    c.seed = 17;
    c.record_trace = false;
    c.avt_net = 600.0;
    const SimTrace trace = run(c);
    const auto blocks = trace.final_chains.front().second.blocks();
    std::vector<double> gaps;
    double last = 0.0;
    for (const auto& b : blocks) {
        if (!b.is_standard()) continue;
        const double t = trace.minted[trace.minted_index.at(b.id())].mint_time;
        gaps.push_back(t - last);
        last = t;
    }
    REQUIRE(gaps.size() >= 10000);
    // Critical value at the 1% level: 1.628 / sqrt(n).
    const double d = ks_exponential(gaps, 1.0 / 600.0);
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(gaps.size())));
}

TEST_CASE("retargeting converges to the expected block time")
{
    SimConfig c;
    c.miners = {{1, Role::Honest, 1.0}};
    c.zeroblock = false;
    c.hash_scale = 3.0;
    c.retarget_epoch = 128;
    c.propagation = PropagationModel::constant(0.0);
    c.duration_blocks = 128 * 100;
    c.seed = 5;
    c.record_trace = false;
    const SimTrace trace = run(c);
    std::vector<double> times;
    for (const auto& b : trace.final_chains.front().second.blocks()) {
        if (b.is_standard()) times.push_back(trace.minted[trace.minted_index.at(b.id())].mint_time);
    }
    // Skip three epochs, then average over the rest.
    const std::size_t start = 3 * 128;
    const double mean = (times.back() - times[start - 1]) / static_cast<double>(times.size() - start);
    CHECK(std::abs(mean - 600.0) / 600.0 < 0.05);
    CHECK(trace.final_difficulty == doctest::Approx(3.0).epsilon(0.25));
}
