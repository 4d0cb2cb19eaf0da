#pragma once

#include "zeroblock/chain.hpp"
#include "zeroblock/simnet.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace zbtest {

inline std::filesystem::path fixture(const std::string& name)
{
    return std::filesystem::path(ZB_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Mines a Standard block on `chain` for interval `index`, folding any skipped intervals into the parent.
inline zeroblock::Block mine_block(const zeroblock::Chain& chain, zeroblock::MatIndex index, zeroblock::MinerId creator,
                                   std::uint64_t payload = 0,
                                   const zeroblock::Target& target = zeroblock::default_pow_target())
{
    const auto parent = zeroblock::expected_parent(chain.head(), index);
    const auto found = zeroblock::find_nonce(parent, target, 0);
    return zeroblock::Block::standard(parent, index, found.nonce, creator, payload);
}

inline zeroblock::Chain extend(const zeroblock::Chain& chain, zeroblock::MatIndex index, zeroblock::MinerId creator = 1,
                               std::uint64_t payload = 0)
{
    return chain.append(mine_block(chain, index, creator, payload));
}

inline zeroblock::Chain extend_dummy(const zeroblock::Chain& chain, zeroblock::MatIndex index)
{
    return chain.append(zeroblock::make_dummy(chain.head(), index));
}

// Random valid chain: each interval gets a Standard block with probability p_standard, else a dummy.
template <class Rng>
zeroblock::Chain random_chain(Rng& rng, std::size_t intervals, double p_standard)
{
    zeroblock::Chain c;
    for (zeroblock::MatIndex i = 1; i <= intervals; ++i) {
        if (zeroblock::uniform01(rng) < p_standard) c = extend(c, i, static_cast<zeroblock::MinerId>(i % 4), i);
        else c = extend_dummy(c, i);
    }
    return c;
}

inline zeroblock::SimConfig three_miners(double alpha, bool zeroblock, std::uint64_t blocks, std::uint64_t seed)
{
    zeroblock::SimConfig c;
    const double h = (1.0 - alpha) / 2.0;
    c.miners = {{0, zeroblock::Role::Selfish, alpha}, {1, zeroblock::Role::Honest, h},
                {2, zeroblock::Role::Honest, 1.0 - alpha - h}};
    c.zeroblock = zeroblock;
    c.duration_blocks = blocks;
    c.seed = seed;
    return c;
}

inline zeroblock::SimConfig honest_pair(bool zeroblock, std::uint64_t blocks, std::uint64_t seed)
{
    zeroblock::SimConfig c;
    c.miners = {{1, zeroblock::Role::Honest, 0.5}, {2, zeroblock::Role::Honest, 0.5}};
    c.zeroblock = zeroblock;
    c.duration_blocks = blocks;
    c.seed = seed;
    return c;
}

} // namespace zbtest
