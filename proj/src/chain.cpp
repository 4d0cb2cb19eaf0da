#include "zeroblock/chain.hpp"
#include "zeroblock/errors.hpp"

#include <algorithm>

namespace zeroblock {

namespace {

// Gaps longer than this are treated as broken links rather than re-derived.
constexpr MatIndex max_rederived_gap = MatIndex{1} << 20;

} // namespace

Chain::Node::~Node()
{
    // Unlink iteratively so that dropping a long chain does not recurse.
    auto p = std::move(prev);
    while (p && p.use_count() == 1) {
        auto next = std::move(p->prev);
        p = std::move(next);
    }
}

Chain::Chain() : node_(std::make_shared<const Node>(make_genesis(), nullptr, 0, 1)) {}

Chain Chain::append(Block block) const
{
    const std::uint64_t height = node_->standard_height + (block.is_standard() ? 1 : 0);
    return Chain(std::make_shared<const Node>(std::move(block), node_, height, node_->length + 1));
}

Chain Chain::parent_chain() const
{
    if (!node_->prev) throw PreconditionError("genesis-only chain has no parent chain");
    return Chain(node_->prev);
}

std::vector<Block> Chain::blocks() const
{
    std::vector<Block> out;
    out.reserve(node_->length);
    for (const Node* n = node_.get(); n; n = n->prev.get()) out.push_back(n->block);
    std::reverse(out.begin(), out.end());
    return out;
}

Chain Chain::prefix_at_height(std::uint64_t height) const
{
    std::shared_ptr<const Node> n = node_;
    while (n->standard_height > height) n = n->prev;
    return Chain(std::move(n));
}

bool Chain::contains(const BlockId& id) const
{
    for (const Node* n = node_.get(); n; n = n->prev.get()) {
        if (n->block.id() == id) return true;
    }
    return false;
}

std::string_view to_string(RejectReason reason)
{
    switch (reason) {
    case RejectReason::WrongParent: return "WrongParent";
    case RejectReason::BadPoW: return "BadPoW";
    case RejectReason::StaleMatIndex: return "StaleMatIndex";
    case RejectReason::FutureMatIndex: return "FutureMatIndex";
    case RejectReason::ForeignDummy: return "ForeignDummy";
    }
    return "?";
}

Verdict validate_block(const Block& b, const Chain& local, const Target& target,
                       std::optional<MatIndex> current_index)
{
    if (b.is_dummy()) return Verdict::reject(RejectReason::ForeignDummy);
    if (b.kind() == BlockKind::Genesis) return Verdict::reject(RejectReason::WrongParent);
    if (current_index) {
        if (b.mat_index() < *current_index) return Verdict::reject(RejectReason::StaleMatIndex);
        if (b.mat_index() > *current_index) return Verdict::reject(RejectReason::FutureMatIndex);
    }
    if (b.mat_index() <= local.head().mat_index()) return Verdict::reject(RejectReason::StaleMatIndex);
    if (b.parent() != local.head_id()) return Verdict::reject(RejectReason::WrongParent);
    if (!try_nonce(*b.parent(), b.nonce(), target)) return Verdict::reject(RejectReason::BadPoW);
    return Verdict::accept();
}

BlockId expected_parent(const Block& prev, MatIndex next_index)
{
    if (next_index <= prev.mat_index() + 1) return prev.id();
    if (next_index - prev.mat_index() > max_rederived_gap) return BlockId{};
    BlockId id = prev.id();
    for (MatIndex i = prev.mat_index() + 1; i < next_index; ++i) id = Block::dummy(id, i).id();
    return id;
}

std::optional<ChainFault> validate_extension(const Block& base, const std::vector<Block>& blocks,
                                             const Target& target)
{
    const Block* prev = &base;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const Block& b = blocks[k];
        if (b.kind() == BlockKind::Genesis) return ChainFault{k, RejectReason::WrongParent};
        if (b.mat_index() <= prev->mat_index()) return ChainFault{k, RejectReason::StaleMatIndex};
        if (b.is_dummy()) {
            if (b.parent() != prev->id()) return ChainFault{k, RejectReason::WrongParent};
        } else {
            if (b.parent() != expected_parent(*prev, b.mat_index())) {
                return ChainFault{k, RejectReason::WrongParent};
            }
            if (!try_nonce(*b.parent(), b.nonce(), target)) return ChainFault{k, RejectReason::BadPoW};
        }
        prev = &b;
    }
    return std::nullopt;
}

std::optional<ChainFault> validate_chain(const Chain& chain, const Target& target)
{
    auto blocks = chain.blocks();
    if (blocks.front().id() != make_genesis().id()) return ChainFault{0, RejectReason::WrongParent};
    const Block genesis = blocks.front();
    blocks.erase(blocks.begin());
    auto fault = validate_extension(genesis, blocks, target);
    if (fault) fault->position += 1;
    return fault;
}

Divergence diverge(const Chain& local, const Chain& incoming)
{
    const Chain::Node* a = local.node();
    const Chain::Node* b = incoming.node();
    std::vector<Block> local_only;
    std::vector<Block> incoming_only;
    while (a != b && a->block.id() != b->block.id()) {
        if (a->block.mat_index() >= b->block.mat_index()) {
            local_only.push_back(a->block);
            a = a->prev.get();
        } else {
            incoming_only.push_back(b->block);
            b = b->prev.get();
        }
        if (!a || !b) throw PreconditionError("chains do not share a genesis block");
    }
    std::reverse(local_only.begin(), local_only.end());
    std::reverse(incoming_only.begin(), incoming_only.end());
    return Divergence{a->block, b->length - 1, std::move(local_only), std::move(incoming_only)};
}

ForkChoice fork_choice(const Chain& local, const Chain& incoming, const Target& target)
{
    auto d = diverge(local, incoming);
    if (d.incoming_only.empty()) return ForkChoice{local, false, std::nullopt};
    if (auto fault = validate_extension(d.ancestor, d.incoming_only, target)) {
        fault->position += d.ancestor_position + 1;
        return ForkChoice{local, false, fault};
    }
    if (incoming.standard_height() > local.standard_height()) return ForkChoice{incoming, true, std::nullopt};
    return ForkChoice{local, false, std::nullopt};
}

Chain compact(const Chain& chain)
{
    const auto blocks = chain.blocks();
    Chain out;
    std::vector<Block> pending_dummies;
    bool after_standard = false;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        if (b.is_dummy()) {
            pending_dummies.push_back(b);
            continue;
        }
        if (!after_standard) {
            for (auto& d : pending_dummies) out = out.append(std::move(d));
        }
        pending_dummies.clear();
        out = out.append(b);
        after_standard = b.is_standard();
    }
    for (auto& d : pending_dummies) out = out.append(std::move(d));
    return out;
}

} // namespace zeroblock
