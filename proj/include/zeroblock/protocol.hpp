#pragma once

#include "zeroblock/chain.hpp"
#include "zeroblock/mining.hpp"

#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace zeroblock {

struct ProtocolRules {
    //! false selects plain longest-chain mining (no dummies, no timeliness rule).
    bool zeroblock = true;
    //! Keep mining for the whole interval instead of stopping at avt_net.
    bool mine_until_boundary = false;
    MatSchedule schedule;
    Target target = default_pow_target();
};

//! How an honest miner settles an arrival whose chain has the same standard height as its own.
enum class TieBreak { FirstReceived, PreferIncoming, KeepLocal };

struct MinerState {
    MinerId miner_id = 0;
    Chain local_chain;
    bool flag_new_block = false;
    //! Current interval index (Delta).
    MatIndex index = 1;
    std::uint64_t nonce = 0;
    //! Start of the current interval; scounter() is time minus this anchor.
    double scounter_anchor = 0.0;
    double hash_power = 1.0;
    double last_time = 0.0;
    //! Blocks validated while their interval was current, by id.
    std::unordered_map<BlockId, MatIndex> timely;
};

enum class PolicyMode { VanillaBitcoin, AgainstZeroblock };

struct SelfishState {
    MinerId miner_id = 0;
    Chain private_chain;
    //! Best chain received from the network.
    Chain public_view;
    std::int64_t lead = 0;
    double hash_power = 0.0;
    PolicyMode policy_mode = PolicyMode::VanillaBitcoin;
    //! Number of blocks at the tail of private_chain nobody else has seen.
    std::size_t unpublished = 0;
    //! Both branches are public and of equal height.
    bool racing = false;
    MatIndex index = 1;
    bool builds_dummies = false;
    double last_time = 0.0;
};

struct BlockArrival {
    Chain chain;
    double time = 0.0;
    TieBreak tie = TieBreak::FirstReceived;
};

struct MatExpiry {
    MatIndex index = 0;
    double time = 0.0;
};

struct PoWSuccess {
    BlockId parent;
    std::uint64_t nonce = 0;
    double time = 0.0;
    std::uint64_t payload_tag = 0;
};

struct Tick {
    double time = 0.0;
};

using MinerEvent = std::variant<BlockArrival, MatExpiry, PoWSuccess, Tick>;

double event_time(const MinerEvent& e);

struct Broadcast {
    Chain chain;
};
struct AdoptChain {
    Chain chain;
};
struct GenerateDummy {
    MatIndex index = 0;
    Block block;
};
struct StartMining {
    BlockId parent;
    MatIndex mat_index = 0;
};
struct Withhold {
    Block block;
};
struct RevealPrivate {
    //! Standard height of the revealed prefix.
    std::uint64_t prefix_height = 0;
    Chain chain;
};
struct RejectBlock {
    Block block;
    RejectReason reason;
};

using MinerAction =
    std::variant<Broadcast, AdoptChain, GenerateDummy, StartMining, Withhold, RevealPrivate, RejectBlock>;

template <class S>
struct StepResult {
    S state;
    std::vector<MinerAction> actions;
};

/** Where a miner is currently directing its hash power. */
struct MiningWindow {
    BlockId parent;
    MatIndex mat_index = 0;
    //! Mining stops at this absolute time (infinity when unbounded).
    double end = std::numeric_limits<double>::infinity();
};

MinerState make_honest(MinerId id, double hash_power, const ProtocolRules& rules);
SelfishState make_selfish(MinerId id, double hash_power, PolicyMode mode, bool builds_dummies = false);

StepResult<MinerState> honest_step(MinerState s, const MinerEvent& e, const ProtocolRules& rules);
StepResult<SelfishState> selfish_step(SelfishState s, const MinerEvent& e, const ProtocolRules& rules);

//! std::nullopt when the miner is idle at time `now`.
std::optional<MiningWindow> mining_window(const MinerState& s, const ProtocolRules& rules, double now);
std::optional<MiningWindow> mining_window(const SelfishState& s, const ProtocolRules& rules, double now);

//! Most recent Standard block of a chain, if any.
std::optional<Block> last_standard(const Chain& chain);

} // namespace zeroblock
