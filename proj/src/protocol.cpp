#include "zeroblock/protocol.hpp"

#include "zeroblock/errors.hpp"

#include <string>

namespace zeroblock {

namespace {

// Intervals after which an entry of the timely-seen set can no longer matter.
constexpr MatIndex timely_horizon = 64;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void advance_clock(double& last, double t)
{
    if (t < last) {
        throw SequencingError("event at t=" + std::to_string(t) + " precedes previous event at t=" +
                              std::to_string(last));
    }
    last = t;
}

// Appends locally generated dummies for every interval in (head.mat_index, upto].
Chain pad_dummies(Chain chain, MatIndex upto, std::vector<MinerAction>& actions)
{
    while (chain.head().mat_index() < upto) {
        Block d = make_dummy(chain.head(), chain.head().mat_index() + 1);
        actions.push_back(GenerateDummy{d.mat_index(), d});
        chain = chain.append(std::move(d));
    }
    return chain;
}

void honest_arrival(MinerState& s, const BlockArrival& a, const ProtocolRules& rules,
                    std::vector<MinerAction>& actions)
{
    const auto d = diverge(s.local_chain, a.chain);
    if (d.incoming_only.empty()) return;
    if (d.incoming_only.back().is_dummy()) {
        actions.push_back(RejectBlock{d.incoming_only.back(), RejectReason::ForeignDummy});
        return;
    }
    if (auto fault = validate_extension(d.ancestor, d.incoming_only, rules.target)) {
        actions.push_back(RejectBlock{d.incoming_only[fault->position], fault->reason});
        return;
    }
    if (rules.zeroblock) {
        for (const auto& b : d.incoming_only) {
            if (!b.is_standard()) continue;
            if (b.mat_index() > s.index) {
                actions.push_back(RejectBlock{b, RejectReason::FutureMatIndex});
                return;
            }
            if (b.mat_index() == s.index) {
                s.timely.emplace(b.id(), b.mat_index());
            } else if (!s.timely.contains(b.id())) {
                actions.push_back(RejectBlock{b, RejectReason::StaleMatIndex});
                return;
            }
        }
    }

    const auto incoming_height = a.chain.standard_height();
    const auto local_height = s.local_chain.standard_height();
    const bool adopt = incoming_height > local_height ||
                       (incoming_height == local_height && a.tie == TieBreak::PreferIncoming);
    if (!adopt) return;

    Chain chosen = a.chain;
    if (rules.zeroblock) chosen = pad_dummies(std::move(chosen), s.index - 1, actions);
    s.local_chain = chosen;
    actions.push_back(AdoptChain{chosen});
    if (rules.zeroblock && chosen.head().mat_index() == s.index) s.flag_new_block = true;
}

} // namespace

double event_time(const MinerEvent& e)
{
    return std::visit([](const auto& ev) { return ev.time; }, e);
}

MinerState make_honest(MinerId id, double hash_power, const ProtocolRules& rules)
{
    MinerState s;
    s.miner_id = id;
    s.hash_power = hash_power;
    s.index = 1;
    s.scounter_anchor = rules.schedule.boundary(0);
    s.last_time = 0.0;
    return s;
}

SelfishState make_selfish(MinerId id, double hash_power, PolicyMode mode, bool builds_dummies)
{
    SelfishState s;
    s.miner_id = id;
    s.hash_power = hash_power;
    s.policy_mode = mode;
    s.builds_dummies = builds_dummies;
    return s;
}

std::optional<Block> last_standard(const Chain& chain)
{
    for (const Chain::Node* n = chain.node(); n; n = n->prev.get()) {
        if (n->block.is_standard()) return n->block;
    }
    return std::nullopt;
}

std::optional<MiningWindow> mining_window(const MinerState& s, const ProtocolRules& rules, double now)
{
    const Block& head = s.local_chain.head();
    if (!rules.zeroblock) return MiningWindow{head.id(), head.mat_index() + 1};
    if (s.flag_new_block || head.mat_index() >= s.index) return std::nullopt;
    const double end = rules.mine_until_boundary ? rules.schedule.boundary(s.index)
                                                 : s.scounter_anchor + rules.schedule.avt_net;
    if (now >= end) return std::nullopt;
    return MiningWindow{expected_parent(head, s.index), s.index, end};
}

std::optional<MiningWindow> mining_window(const SelfishState& s, const ProtocolRules& rules, double now)
{
    const Block& head = s.private_chain.head();
    if (s.policy_mode == PolicyMode::VanillaBitcoin) return MiningWindow{head.id(), head.mat_index() + 1};
    if (head.mat_index() >= s.index) return std::nullopt;
    const double end = rules.schedule.boundary(s.index);
    if (now >= end) return std::nullopt;
    return MiningWindow{expected_parent(head, s.index), s.index, end};
}

StepResult<MinerState> honest_step(MinerState s, const MinerEvent& e, const ProtocolRules& rules)
{
    const double t = event_time(e);
    advance_clock(s.last_time, t);
    if (rules.zeroblock && t > rules.schedule.boundary(s.index)) {
        throw SequencingError("miner " + std::to_string(s.miner_id) + " received an event at t=" +
                              std::to_string(t) + " after the end of interval " + std::to_string(s.index));
    }

    std::vector<MinerAction> actions;
    std::visit(overloaded{
                   [&](const BlockArrival& a) { honest_arrival(s, a, rules, actions); },
                   [&](const MatExpiry& m) {
                       if (!rules.zeroblock) return;
                       if (m.index != s.index || t < rules.schedule.boundary(s.index)) {
                           throw SequencingError("expiry of interval " + std::to_string(m.index) +
                                                 " delivered to a miner in interval " + std::to_string(s.index));
                       }
                       if (!s.flag_new_block && s.local_chain.head().mat_index() < s.index) {
                           s.local_chain = pad_dummies(s.local_chain, s.index, actions);
                           actions.push_back(AdoptChain{s.local_chain});
                       }
                       ++s.index;
                       s.flag_new_block = false;
                       s.scounter_anchor = rules.schedule.boundary(s.index - 1);
                       if (s.index > timely_horizon) {
                           std::erase_if(s.timely, [&](const auto& kv) { return kv.second + timely_horizon < s.index; });
                       }
                   },
                   [&](const PoWSuccess& p) {
                       const auto w = mining_window(s, rules, t);
                       if (!w || w->parent != p.parent) return;
                       if (!try_nonce(p.parent, p.nonce, rules.target)) {
                           throw PreconditionError("PoW success reported with a nonce that misses the target");
                       }
                       if (rules.zeroblock) s.local_chain = pad_dummies(s.local_chain, w->mat_index - 1, actions);
                       Block b = Block::standard(p.parent, w->mat_index, p.nonce, s.miner_id, p.payload_tag);
                       s.nonce = p.nonce;
                       if (rules.zeroblock) {
                           s.flag_new_block = true;
                           s.timely.emplace(b.id(), b.mat_index());
                       }
                       s.local_chain = s.local_chain.append(std::move(b));
                       actions.push_back(Broadcast{s.local_chain});
                   },
                   [](const Tick&) {},
               },
               e);

    if (!std::holds_alternative<PoWSuccess>(e)) {
        if (auto w = mining_window(s, rules, t); w && !actions.empty()) {
            actions.push_back(StartMining{w->parent, w->mat_index});
        }
    }
    return {std::move(s), std::move(actions)};
}

namespace {

// Prefix of the private chain at `height`, without trailing dummies.
Chain publishable_prefix(const Chain& chain, std::uint64_t height)
{
    Chain prefix = chain.prefix_at_height(height);
    while (prefix.head().is_dummy()) prefix = prefix.parent_chain();
    return prefix;
}

void reveal(SelfishState& s, std::uint64_t height, std::vector<MinerAction>& actions)
{
    Chain prefix = publishable_prefix(s.private_chain, height);
    actions.push_back(RevealPrivate{prefix.standard_height(), prefix});
}

std::uint64_t published_height(const SelfishState& s)
{
    return s.private_chain.standard_height() - s.unpublished;
}

} // namespace

StepResult<SelfishState> selfish_step(SelfishState s, const MinerEvent& e, const ProtocolRules& rules)
{
    const double t = event_time(e);
    advance_clock(s.last_time, t);
    const bool against_zb = s.policy_mode == PolicyMode::AgainstZeroblock;
    if (against_zb && t > rules.schedule.boundary(s.index)) {
        throw SequencingError("selfish miner received an event at t=" + std::to_string(t) +
                              " after the end of interval " + std::to_string(s.index));
    }

    // Against the interval rule, a block is only worth publishing while it
    // still reaches every honest miner before the boundary.
    const bool can_publish = !against_zb || t + rules.schedule.ipt <= rules.schedule.boundary(s.index);

    std::vector<MinerAction> actions;
    std::visit(overloaded{
                   [&](const BlockArrival& a) {
                       if (a.chain.standard_height() <= s.public_view.standard_height()) return;
                       const auto d = diverge(s.public_view, a.chain);
                       if (auto fault = validate_extension(d.ancestor, d.incoming_only, rules.target)) {
                           actions.push_back(RejectBlock{d.incoming_only[fault->position], fault->reason});
                           return;
                       }
                       s.public_view = a.chain;
                       if (!can_publish) {
                           if (s.private_chain.standard_height() < s.public_view.standard_height()) {
                               s.private_chain = s.public_view;
                               s.unpublished = 0;
                               s.racing = false;
                               actions.push_back(AdoptChain{s.private_chain});
                           }
                           return;
                       }
                       const auto hp = s.private_chain.standard_height();
                       const auto hh = s.public_view.standard_height();
                       const auto lead = static_cast<std::int64_t>(hp) - static_cast<std::int64_t>(hh);
                       if (lead < 0) {
                           s.private_chain = s.public_view;
                           s.unpublished = 0;
                           s.racing = false;
                           actions.push_back(AdoptChain{s.private_chain});
                       } else if (lead == 0) {
                           if (s.unpublished > 0) {
                               reveal(s, hp, actions);
                               s.unpublished = 0;
                               s.racing = true;
                           }
                       } else if (lead == 1) {
                           if (s.unpublished > 0) {
                               reveal(s, hp, actions);
                               s.unpublished = 0;
                               s.racing = false;
                               s.public_view = s.private_chain;
                           }
                       } else if (published_height(s) < hh) {
                           reveal(s, hh, actions);
                           s.unpublished = static_cast<std::size_t>(hp - hh);
                       }
                   },
                   [&](const MatExpiry& m) {
                       if (!against_zb) return;
                       if (m.index != s.index || t < rules.schedule.boundary(s.index)) {
                           throw SequencingError("expiry of interval " + std::to_string(m.index) +
                                                 " delivered to a selfish miner in interval " +
                                                 std::to_string(s.index));
                       }
                       if (s.unpublished > 0) {
                           s.private_chain = publishable_prefix(s.private_chain, published_height(s));
                           s.unpublished = 0;
                           actions.push_back(AdoptChain{s.private_chain});
                       }
                       if (!s.racing && s.public_view.standard_height() >= s.private_chain.standard_height() &&
                           s.public_view.head_id() != s.private_chain.head_id()) {
                           s.private_chain = s.public_view;
                           actions.push_back(AdoptChain{s.private_chain});
                       }
                       if (s.builds_dummies && s.private_chain.head().mat_index() < s.index) {
                           Block d = make_dummy(s.private_chain.head(), s.index);
                           actions.push_back(GenerateDummy{d.mat_index(), d});
                           s.private_chain = s.private_chain.append(std::move(d));
                       }
                       ++s.index;
                   },
                   [&](const PoWSuccess& p) {
                       const auto w = mining_window(s, rules, t);
                       if (!w || w->parent != p.parent) return;
                       if (!try_nonce(p.parent, p.nonce, rules.target)) {
                           throw PreconditionError("PoW success reported with a nonce that misses the target");
                       }
                       Block b = Block::standard(p.parent, w->mat_index, p.nonce, s.miner_id, p.payload_tag);
                       s.private_chain = s.private_chain.append(b);
                       if (s.racing && can_publish) {
                           s.racing = false;
                           s.unpublished = 0;
                           s.public_view = s.private_chain;
                           actions.push_back(Broadcast{s.private_chain});
                       } else {
                           ++s.unpublished;
                           actions.push_back(Withhold{std::move(b)});
                       }
                   },
                   [](const Tick&) {},
               },
               e);

    s.lead = static_cast<std::int64_t>(s.private_chain.standard_height()) -
             static_cast<std::int64_t>(s.public_view.standard_height());
    return {std::move(s), std::move(actions)};
}

} // namespace zeroblock
