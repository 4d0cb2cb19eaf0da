#pragma once

#include "zeroblock/chain.hpp"
#include "zeroblock/mining.hpp"
#include "zeroblock/propagation.hpp"
#include "zeroblock/protocol.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace zeroblock {

enum class Role { Honest, Selfish };
enum class MiningBackend { Stochastic, Hash };

std::string_view to_string(Role role);

struct MinerSpec {
    MinerId id = 0;
    Role role = Role::Honest;
    //! Fraction of network hash power.
    double hash_share = 0.0;
    //! Shift of this miner's interval grid in seconds (clock skew experiments only).
    double clock_offset = 0.0;
};

struct SimConfig {
    std::vector<MinerSpec> miners;
    double avt_net = 600.0;
    double ipt = 60.0;
    PropagationModel propagation = PropagationModel::uniform(0.0, 40.0);
    bool zeroblock = true;
    bool mine_until_boundary = false;
    //! Fraction of honest power that settles on the adversary branch in a tie; unset = first received.
    std::optional<double> forced_gamma;
    bool adversary_builds_dummies = false;
    //! Stop once some honest miner holds this many standard blocks (0 = unused).
    std::uint64_t duration_blocks = 0;
    //! Stop at this simulated time (0 = unused).
    double duration_seconds = 0.0;
    std::uint64_t seed = 1;
    //! Difficulty epoch in standard blocks; 0 disables retargeting.
    std::size_t retarget_epoch = 0;
    double retarget_clamp = 4.0;
    //! Network hash power relative to the initial difficulty calibration.
    double hash_scale = 1.0;
    MiningBackend backend = MiningBackend::Stochastic;
    Target pow_target = default_pow_target();
    bool allow_majority_adversary = false;
    bool record_trace = true;
};

//! Throws ConfigError describing the first problem found.
void validate(const SimConfig& config);

struct Mint {
    MinerId miner = 0;
    std::uint64_t generation = 0;
    BlockId parent;
    std::uint64_t nonce = 0;
};
struct Deliver {
    MinerId from = 0;
    MinerId to = 0;
    Chain chain;
};
struct MatBoundary {
    MinerId miner = 0;
    MatIndex index = 0;
};
struct RetargetCheck {
    std::uint64_t height = 0;
};

struct SimEvent {
    double time = 0.0;
    std::uint64_t sequence = 0;
    std::variant<Mint, Deliver, MatBoundary, RetargetCheck> kind;
};

/** Min-queue on (time, sequence); sequence numbers follow insertion order. */
class EventQueue {
public:
    void push(double time, std::variant<Mint, Deliver, MatBoundary, RetargetCheck> kind);
    SimEvent pop();
    const SimEvent& top() const { return heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const
        {
            if (a.time != b.time) return a.time > b.time;
            return a.sequence > b.sequence;
        }
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_sequence_ = 0;
};

enum class TraceKind { Mint, Broadcast, Deliver, Accept, Reject, Dummy, Reveal, Withhold };

std::string_view to_string(TraceKind kind);

struct TraceRecord {
    double time = 0.0;
    TraceKind kind = TraceKind::Mint;
    MinerId miner = 0;
    BlockId block;
    std::string extra;
};

struct MintedBlock {
    Block block;
    double mint_time = 0.0;
    //! First time any miner other than the creator could see it.
    std::optional<double> first_published;
    bool adversarial = false;
    //! Time each miner (config order) first held the block; infinity if never.
    std::vector<double> seen_by;
};

struct SimTrace {
    std::vector<TraceRecord> records;
    //! Standard blocks in mint order.
    std::vector<MintedBlock> minted;
    std::unordered_map<BlockId, std::size_t> minted_index;
    //! Standard blocks some honest miner rejected.
    std::unordered_set<BlockId> rejected;
    //! Final chain of each miner, in config order.
    std::vector<std::pair<MinerSpec, Chain>> final_chains;
    bool horizon_reached = false;
    double end_time = 0.0;
    std::uint64_t events_processed = 0;
    double final_difficulty = 1.0;
};

SimTrace run(const SimConfig& config);

//! Newline-delimited `time,kind,miner,block_id,extra` records.
void write_trace(std::ostream& out, const SimTrace& trace);
std::string serialize_trace(const SimTrace& trace);

} // namespace zeroblock
