#include "zeroblock/simnet.hpp"

#include "zeroblock/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace zeroblock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Hash-mode searches give up after this many nonces when the window is unbounded.
constexpr std::uint64_t max_hash_attempts = std::uint64_t{1} << 32;

struct Node {
    MinerSpec spec;
    ProtocolRules rules;
    std::variant<MinerState, SelfishState> state;
    std::uint64_t generation = 0;
    std::optional<MiningWindow> scheduled;
};

const Chain& chain_of(const Node& n)
{
    return std::visit(overloaded{[](const MinerState& s) -> const Chain& { return s.local_chain; },
                                 [](const SelfishState& s) -> const Chain& { return s.private_chain; }},
                      n.state);
}

std::optional<MiningWindow> window_of(const Node& n, double now)
{
    return std::visit([&](const auto& s) { return mining_window(s, n.rules, now); }, n.state);
}

std::string kv(const char* key, std::uint64_t value)
{
    return std::string(key) + "=" + std::to_string(value);
}

class Simulator {
public:
    explicit Simulator(const SimConfig& cfg) : cfg_(cfg)
    {
        std::seed_seq seq{cfg.seed, std::uint64_t{0x5eed}};
        std::array<std::uint64_t, 4> seeds;
        seq.generate(seeds.begin(), seeds.end());
        mint_rng_.seed(seeds[0]);
        net_rng_.seed(seeds[1]);
        tie_rng_.seed(seeds[2]);
        nonce_rng_.seed(seeds[3]);

        for (const auto& m : cfg.miners) {
            Node n{m, ProtocolRules{cfg.zeroblock, cfg.mine_until_boundary,
                                    MatSchedule{cfg.avt_net, cfg.ipt, m.clock_offset}, cfg.pow_target},
                   MinerState{}, 0, std::nullopt};
            if (m.role == Role::Honest) {
                n.state = make_honest(m.id, m.hash_share, n.rules);
            } else {
                n.state = make_selfish(m.id, m.hash_share,
                                       cfg.zeroblock ? PolicyMode::AgainstZeroblock : PolicyMode::VanillaBitcoin,
                                       cfg.adversary_builds_dummies);
                selfish_.insert(m.id);
            }
            nodes_.push_back(std::move(n));
        }
        next_retarget_ = cfg.retarget_epoch;
    }

    SimTrace run()
    {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            reschedule(i, 0.0);
            if (cfg_.zeroblock) queue_.push(nodes_[i].rules.schedule.boundary(1), MatBoundary{nodes_[i].spec.id, 1});
        }

        while (!queue_.empty()) {
            if (cfg_.duration_seconds > 0 && queue_.top().time > cfg_.duration_seconds) {
                trace_.horizon_reached = true;
                trace_.end_time = cfg_.duration_seconds;
                break;
            }
            SimEvent ev = queue_.pop();
            now_ = ev.time;
            ++trace_.events_processed;
            std::visit(overloaded{[&](Mint& m) { on_mint(m); }, [&](Deliver& d) { on_deliver(d); },
                                  [&](MatBoundary& b) { on_boundary(b); },
                                  [&](RetargetCheck& r) { on_retarget(r); }},
                       ev.kind);
            trace_.end_time = now_;
            if (cfg_.duration_blocks > 0 && best_height_ >= cfg_.duration_blocks) {
                trace_.horizon_reached = true;
                break;
            }
        }

        for (const auto& n : nodes_) trace_.final_chains.emplace_back(n.spec, chain_of(n));
        trace_.final_difficulty = difficulty_.to_double();
        spdlog::debug("simulation finished at t={} after {} events, {} standard blocks minted", trace_.end_time,
                      trace_.events_processed, trace_.minted.size());
        return std::move(trace_);
    }

private:
    std::size_t index_of(MinerId id) const
    {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].spec.id == id) return i;
        }
        throw PreconditionError("unknown miner id " + std::to_string(id));
    }

    double rate_of(const Node& n) const
    {
        return n.spec.hash_share * cfg_.hash_scale / (difficulty_.to_double() * cfg_.avt_net);
    }

    void reschedule(std::size_t i, double now)
    {
        Node& n = nodes_[i];
        const auto w = window_of(n, now);
        if (!w) {
            if (n.scheduled) ++n.generation;
            n.scheduled.reset();
            return;
        }
        if (n.scheduled && n.scheduled->parent == w->parent && n.scheduled->end == w->end) return;
        ++n.generation;
        n.scheduled = w;

        if (cfg_.backend == MiningBackend::Stochastic) {
            const double t = now + sample_block_interval(rate_of(n), mint_rng_);
            if (t < w->end) queue_.push(t, Mint{n.spec.id, n.generation, w->parent, 0});
            return;
        }

        const double hashes_per_second = rate_of(n) / cfg_.pow_target.success_ratio();
        std::uint64_t budget = max_hash_attempts;
        if (std::isfinite(w->end)) {
            budget = static_cast<std::uint64_t>(std::max(0.0, std::floor((w->end - now) * hashes_per_second)));
        }
        const auto search = find_nonce(w->parent, cfg_.pow_target, nonce_rng_(), budget);
        if (!search.found) return;
        const double t = now + static_cast<double>(search.attempts) / hashes_per_second;
        if (t < w->end) queue_.push(t, Mint{n.spec.id, n.generation, w->parent, search.nonce});
    }

    void record(TraceKind kind, MinerId miner, const BlockId& id, std::string extra)
    {
        if (!cfg_.record_trace) return;
        trace_.records.push_back(TraceRecord{now_, kind, miner, id, std::move(extra)});
    }

    void note_minted(const Block& b)
    {
        if (!b.is_standard() || trace_.minted_index.contains(b.id())) return;
        trace_.minted_index.emplace(b.id(), trace_.minted.size());
        MintedBlock m{b, now_, std::nullopt, selfish_.contains(b.creator()),
                      std::vector<double>(nodes_.size(), std::numeric_limits<double>::infinity())};
        m.seen_by[index_of(b.creator())] = now_;
        trace_.minted.push_back(std::move(m));
        record(TraceKind::Mint, b.creator(), b.id(), kv("mat", b.mat_index()));
    }

    void publish(std::size_t from, const Chain& chain)
    {
        for (const Chain::Node* c = chain.node(); c; c = c->prev.get()) {
            if (!c->block.is_standard()) continue;
            auto it = trace_.minted_index.find(c->block.id());
            if (it == trace_.minted_index.end()) continue;
            auto& m = trace_.minted[it->second];
            if (m.first_published) break;
            m.first_published = now_;
        }
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            if (j == from) continue;
            const double delay = propagation_delay(cfg_.propagation, net_rng_);
            queue_.push(now_ + delay, Deliver{nodes_[from].spec.id, nodes_[j].spec.id, chain});
        }
    }

    void mark_seen(std::size_t i, const Chain& chain)
    {
        for (const Chain::Node* c = chain.node(); c; c = c->prev.get()) {
            if (!c->block.is_standard()) continue;
            auto it = trace_.minted_index.find(c->block.id());
            if (it == trace_.minted_index.end()) continue;
            double& seen = trace_.minted[it->second].seen_by[i];
            if (seen <= now_) break;
            seen = now_;
        }
    }

    void apply(std::size_t i, const std::vector<MinerAction>& actions)
    {
        Node& n = nodes_[i];
        const MinerId id = n.spec.id;
        const bool honest = n.spec.role == Role::Honest;
        for (const auto& action : actions) {
            std::visit(
                overloaded{
                    [&](const Broadcast& a) {
                        note_minted(a.chain.head());
                        record(TraceKind::Broadcast, id, a.chain.head_id(), kv("height", a.chain.standard_height()));
                        publish(i, a.chain);
                    },
                    [&](const RevealPrivate& a) {
                        record(TraceKind::Reveal, id, a.chain.head_id(), kv("height", a.prefix_height));
                        publish(i, a.chain);
                    },
                    [&](const Withhold& a) {
                        note_minted(a.block);
                        record(TraceKind::Withhold, id, a.block.id(), kv("mat", a.block.mat_index()));
                    },
                    [&](const AdoptChain& a) {
                        const MatIndex index =
                            std::visit([](const auto& s) { return s.index; }, n.state);
                        record(TraceKind::Accept, id, a.chain.head_id(), kv("index", index));
                    },
                    [&](const GenerateDummy& a) { record(TraceKind::Dummy, id, a.block.id(), kv("index", a.index)); },
                    [&](const RejectBlock& a) {
                        if (honest && a.block.is_standard()) trace_.rejected.insert(a.block.id());
                        record(TraceKind::Reject, id, a.block.id(), "reason=" + std::string(to_string(a.reason)));
                    },
                    [](const StartMining&) {},
                },
                action);
        }
        if (honest) {
            const auto h = chain_of(n).standard_height();
            if (h > best_height_) {
                best_height_ = h;
                if (next_retarget_ > 0 && best_height_ >= next_retarget_) {
                    queue_.push(now_, RetargetCheck{next_retarget_});
                    next_retarget_ += cfg_.retarget_epoch;
                }
            }
        }
    }

    template <class E>
    void step(std::size_t i, const E& event)
    {
        Node& n = nodes_[i];
        std::vector<MinerAction> actions;
        std::visit(overloaded{[&](MinerState& s) {
                                  auto r = honest_step(std::move(s), event, n.rules);
                                  s = std::move(r.state);
                                  actions = std::move(r.actions);
                              },
                              [&](SelfishState& s) {
                                  auto r = selfish_step(std::move(s), event, n.rules);
                                  s = std::move(r.state);
                                  actions = std::move(r.actions);
                              }},
                   n.state);
        apply(i, actions);
    }

    void on_mint(const Mint& m)
    {
        const std::size_t i = index_of(m.miner);
        Node& n = nodes_[i];
        if (m.generation != n.generation) return;
        n.scheduled.reset();
        std::uint64_t nonce = m.nonce;
        if (cfg_.backend == MiningBackend::Stochastic) {
            nonce = find_nonce(m.parent, cfg_.pow_target, nonce_rng_()).nonce;
        }
        step(i, MinerEvent{PoWSuccess{m.parent, nonce, now_, ++payload_counter_}});
        reschedule(i, now_);
    }

    TieBreak tie_for(const Node& n, const Chain& incoming)
    {
        if (!cfg_.forced_gamma || n.spec.role != Role::Honest) return TieBreak::FirstReceived;
        const Chain& local = chain_of(n);
        if (local.standard_height() != incoming.standard_height()) return TieBreak::FirstReceived;
        const auto a = last_standard(local);
        const auto b = last_standard(incoming);
        if (!a || !b || a->id() == b->id()) return TieBreak::FirstReceived;
        const bool local_adv = selfish_.contains(a->creator());
        const bool incoming_adv = selfish_.contains(b->creator());
        if (local_adv == incoming_adv) return TieBreak::FirstReceived;
        const double p_switch = incoming_adv ? *cfg_.forced_gamma : 1.0 - *cfg_.forced_gamma;
        return uniform01(tie_rng_) < p_switch ? TieBreak::PreferIncoming : TieBreak::KeepLocal;
    }

    void on_deliver(const Deliver& d)
    {
        const std::size_t i = index_of(d.to);
        record(TraceKind::Deliver, d.to, d.chain.head_id(), kv("from", d.from));
        mark_seen(i, d.chain);
        const TieBreak tie = tie_for(nodes_[i], d.chain);
        step(i, MinerEvent{BlockArrival{d.chain, now_, tie}});
        reschedule(i, now_);
    }

    void on_boundary(const MatBoundary& b)
    {
        const std::size_t i = index_of(b.miner);
        step(i, MinerEvent{MatExpiry{b.index, now_}});
        queue_.push(nodes_[i].rules.schedule.boundary(b.index + 1), MatBoundary{b.miner, b.index + 1});
        reschedule(i, now_);
    }

    void on_retarget(const RetargetCheck& r)
    {
        const Node* best = nullptr;
        for (const auto& n : nodes_) {
            if (n.spec.role != Role::Honest) continue;
            if (!best || chain_of(n).standard_height() > chain_of(*best).standard_height()) best = &n;
        }
        std::vector<double> times;
        for (const auto& b : chain_of(*best).prefix_at_height(r.height).blocks()) {
            if (!b.is_standard()) continue;
            times.push_back(trace_.minted[trace_.minted_index.at(b.id())].mint_time);
        }
        const std::size_t epoch = cfg_.retarget_epoch;
        const double epoch_start = times.size() > epoch ? times[times.size() - epoch - 1] : 0.0;
        std::vector<double> recent(times.end() - static_cast<std::ptrdiff_t>(epoch), times.end());
        difficulty_ = adjust_difficulty(recent, epoch_start, difficulty_,
                                        RetargetParams{epoch, cfg_.avt_net, cfg_.retarget_clamp});
        spdlog::debug("retarget at height {}: difficulty {}", r.height, difficulty_.to_double());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            nodes_[i].scheduled.reset();
            ++nodes_[i].generation;
            reschedule(i, now_);
        }
    }

    const SimConfig& cfg_;
    std::vector<Node> nodes_;
    std::set<MinerId> selfish_;
    EventQueue queue_;
    Rng mint_rng_, net_rng_, tie_rng_, nonce_rng_;
    SimTrace trace_;
    Difficulty difficulty_{1.0};
    double now_ = 0.0;
    std::uint64_t best_height_ = 0;
    std::uint64_t next_retarget_ = 0;
    std::uint64_t payload_counter_ = 0;
};

} // namespace

std::string_view to_string(Role role)
{
    return role == Role::Honest ? "honest" : "selfish";
}

std::string_view to_string(TraceKind kind)
{
    switch (kind) {
    case TraceKind::Mint: return "mint";
    case TraceKind::Broadcast: return "broadcast";
    case TraceKind::Deliver: return "deliver";
    case TraceKind::Accept: return "accept";
    case TraceKind::Reject: return "reject";
    case TraceKind::Dummy: return "dummy";
    case TraceKind::Reveal: return "reveal";
    case TraceKind::Withhold: return "withhold";
    }
    return "?";
}

void EventQueue::push(double time, std::variant<Mint, Deliver, MatBoundary, RetargetCheck> kind)
{
    heap_.push(SimEvent{time, next_sequence_++, std::move(kind)});
}

SimEvent EventQueue::pop()
{
    SimEvent ev = heap_.top();
    heap_.pop();
    return ev;
}

void validate(const SimConfig& c)
{
    if (c.miners.empty()) throw ConfigError("at least one miner is required");
    std::set<MinerId> ids;
    double total = 0.0, selfish = 0.0;
    bool any_honest = false;
    for (const auto& m : c.miners) {
        if (!ids.insert(m.id).second) throw ConfigError("duplicate miner id " + std::to_string(m.id));
        if (!(m.hash_share > 0.0) || m.hash_share > 1.0) {
            throw ConfigError("miner " + std::to_string(m.id) + " hash share must be in (0, 1]");
        }
        if (!(m.clock_offset >= 0.0) || m.clock_offset > c.ipt) {
            throw ConfigError("miner " + std::to_string(m.id) + " clock offset must be in [0, ipt]");
        }
        total += m.hash_share;
        if (m.role == Role::Selfish) selfish += m.hash_share;
        else any_honest = true;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("hash shares sum to " + std::to_string(total) + ", expected 1");
    }
    if (!any_honest) throw ConfigError("at least one honest miner is required");
    if (selfish > 0.49 + 1e-12 && !c.allow_majority_adversary) {
        throw ConfigError("selfish hash share " + std::to_string(selfish) +
                          " exceeds 0.49; set allow_majority_adversary to override");
    }
    if (!(c.avt_net > 0.0) || !std::isfinite(c.avt_net)) throw ConfigError("avt_net must be positive");
    if (!(c.ipt >= 0.0) || !std::isfinite(c.ipt)) throw ConfigError("ipt must be non-negative");
    if (c.propagation.max_delay() > c.ipt) {
        throw ConfigError("propagation delays can exceed ipt (" + c.propagation.describe() + ")");
    }
    if (c.forced_gamma && !(*c.forced_gamma >= 0.0 && *c.forced_gamma <= 1.0)) {
        throw ConfigError("forced_gamma must be in [0, 1]");
    }
    if (c.duration_blocks == 0 && !(c.duration_seconds > 0.0)) {
        throw ConfigError("either duration_blocks or duration_seconds must be set");
    }
    if (c.duration_seconds < 0.0) throw ConfigError("duration_seconds must be non-negative");
    if (!(c.hash_scale > 0.0) || !std::isfinite(c.hash_scale)) throw ConfigError("hash_scale must be positive");
    if (c.retarget_epoch > 0) {
        if (c.backend != MiningBackend::Stochastic) throw ConfigError("retargeting requires the stochastic backend");
        if (!(c.retarget_clamp >= 1.0)) throw ConfigError("retarget_clamp must be >= 1");
    }
}

SimTrace run(const SimConfig& config)
{
    validate(config);
    return Simulator(config).run();
}

void write_trace(std::ostream& out, const SimTrace& trace)
{
    char time_buf[64];
    for (const auto& r : trace.records) {
        std::snprintf(time_buf, sizeof time_buf, "%.6f", r.time);
        out << time_buf << ',' << to_string(r.kind) << ',' << r.miner << ',' << r.block.hex() << ',' << r.extra
            << '\n';
    }
}

std::string serialize_trace(const SimTrace& trace)
{
    std::ostringstream os;
    write_trace(os, trace);
    return os.str();
}

} // namespace zeroblock
