#include "zeroblock/chain.hpp"
#include "zeroblock/errors.hpp"

namespace zeroblock {

namespace {

void put_field(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> bytes)
{
    put_be(out, bytes.size(), 4);
    out.insert(out.end(), bytes.begin(), bytes.end());
}

void put_int_field(std::vector<std::uint8_t>& out, std::uint64_t value, int width)
{
    put_be(out, static_cast<std::uint64_t>(width), 4);
    put_be(out, value, width);
}

void put_empty(std::vector<std::uint8_t>& out)
{
    put_be(out, 0, 4);
}

} // namespace

std::string_view to_string(BlockKind kind)
{
    switch (kind) {
    case BlockKind::Genesis: return "genesis";
    case BlockKind::Standard: return "standard";
    case BlockKind::Dummy: return "dummy";
    }
    return "?";
}

std::optional<BlockKind> block_kind_from_string(std::string_view text)
{
    if (text == "genesis") return BlockKind::Genesis;
    if (text == "standard") return BlockKind::Standard;
    if (text == "dummy") return BlockKind::Dummy;
    return std::nullopt;
}

const Digest& fixed_string_hash()
{
    static const Digest h = sha256(std::string_view("FixedStringZB"));
    return h;
}

Block Block::genesis()
{
    Block b;
    b.kind_ = BlockKind::Genesis;
    b.seal();
    return b;
}

Block Block::standard(const BlockId& parent, MatIndex mat_index, std::uint64_t nonce, MinerId creator,
                      std::uint64_t payload_tag)
{
    Block b;
    b.kind_ = BlockKind::Standard;
    b.parent_ = parent;
    b.mat_index_ = mat_index;
    b.nonce_ = nonce;
    b.creator_ = creator;
    b.payload_tag_ = payload_tag;
    b.seal();
    return b;
}

Block Block::dummy(const BlockId& parent, MatIndex mat_index)
{
    Block b;
    b.kind_ = BlockKind::Dummy;
    b.parent_ = parent;
    b.mat_index_ = mat_index;
    b.seal();
    return b;
}

std::optional<DummyCore> Block::dummy_core() const
{
    if (kind_ != BlockKind::Dummy) return std::nullopt;
    return DummyCore{*parent_, fixed_string_hash(), mat_index_};
}

std::vector<std::uint8_t> Block::encode() const
{
    std::vector<std::uint8_t> out;
    out.reserve(160);
    const std::uint8_t kind = static_cast<std::uint8_t>(kind_);
    put_field(out, std::span(&kind, 1));
    if (parent_) put_field(out, parent_->digest);
    else put_empty(out);
    put_int_field(out, mat_index_, 8);
    if (kind_ == BlockKind::Standard) {
        put_int_field(out, nonce_, 8);
        put_int_field(out, creator_, 4);
        put_int_field(out, payload_tag_, 8);
    } else {
        put_empty(out);
        put_empty(out);
        put_empty(out);
    }
    if (kind_ == BlockKind::Dummy) {
        std::vector<std::uint8_t> core;
        core.reserve(72);
        core.insert(core.end(), parent_->digest.begin(), parent_->digest.end());
        core.insert(core.end(), fixed_string_hash().begin(), fixed_string_hash().end());
        put_be(core, mat_index_, 8);
        put_field(out, core);
    } else {
        put_empty(out);
    }
    return out;
}

void Block::seal()
{
    id_ = BlockId{sha256(encode())};
}

Block make_genesis()
{
    static const Block g = Block::genesis();
    return g;
}

Block make_dummy(const Block& head, MatIndex index)
{
    if (index <= head.mat_index()) {
        throw PreconditionError("dummy index " + std::to_string(index) + " must exceed head index " +
                                std::to_string(head.mat_index()));
    }
    return Block::dummy(head.id(), index);
}

} // namespace zeroblock
