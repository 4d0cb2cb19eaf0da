#pragma once

#include "zeroblock/hash.hpp"
#include "zeroblock/mining.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zeroblock {

using MinerId = std::uint32_t;

enum class BlockKind : std::uint8_t { Genesis = 0, Standard = 1, Dummy = 2 };

std::string_view to_string(BlockKind kind);
std::optional<BlockKind> block_kind_from_string(std::string_view text);

//! Hash of "FixedStringZB", committed to by every dummy block.
const Digest& fixed_string_hash();

/** Content a dummy Zeroblock commits to: previous head, fixed-string hash and interval index. */
struct DummyCore {
    BlockId prev_head;
    Digest fixed_string_hash{};
    MatIndex index = 0;

    friend bool operator==(const DummyCore&, const DummyCore&) = default;
};

/**
 * Immutable block. The id is the SHA-256 of the canonical encoding and is
 * computed once at construction.
 *
 * Canonical encoding: for each field in declaration order (kind, parent,
 * mat_index, nonce, creator, payload_tag, dummy_core) a 4-byte big-endian
 * length followed by the field bytes; integers are big-endian fixed width
 * (index/nonce/payload 8 bytes, creator 4 bytes). Absent fields have length 0.
 */
class Block {
public:
    static Block genesis();
    static Block standard(const BlockId& parent, MatIndex mat_index, std::uint64_t nonce, MinerId creator,
                          std::uint64_t payload_tag);
    static Block dummy(const BlockId& parent, MatIndex mat_index);

    BlockKind kind() const { return kind_; }
    bool is_standard() const { return kind_ == BlockKind::Standard; }
    bool is_dummy() const { return kind_ == BlockKind::Dummy; }
    const std::optional<BlockId>& parent() const { return parent_; }
    MatIndex mat_index() const { return mat_index_; }
    std::uint64_t nonce() const { return nonce_; }
    MinerId creator() const { return creator_; }
    std::uint64_t payload_tag() const { return payload_tag_; }
    std::optional<DummyCore> dummy_core() const;
    const BlockId& id() const { return id_; }

    std::vector<std::uint8_t> encode() const;

    friend bool operator==(const Block& a, const Block& b) { return a.id_ == b.id_; }

private:
    Block() = default;
    void seal();

    BlockKind kind_ = BlockKind::Genesis;
    std::optional<BlockId> parent_;
    MatIndex mat_index_ = 0;
    std::uint64_t nonce_ = 0;
    MinerId creator_ = 0;
    std::uint64_t payload_tag_ = 0;
    BlockId id_;
};

Block make_genesis();
//! Dummy Zeroblock on top of `head` for interval `index`. Requires index > head.mat_index().
Block make_dummy(const Block& head, MatIndex index);

/**
 * Persistent block sequence starting at genesis. Extension shares the
 * existing prefix, so copies and appends are O(1). `append` does not
 * validate; use validate_chain / fork_choice for that.
 */
class Chain {
public:
    Chain();

    const Block& head() const { return node_->block; }
    const BlockId& head_id() const { return node_->block.id(); }
    std::uint64_t standard_height() const { return node_->standard_height; }
    std::size_t size() const { return node_->length; }

    Chain append(Block block) const;
    //! Chain without its head. Requires size() > 1.
    Chain parent_chain() const;
    //! Genesis-first copy of the blocks.
    std::vector<Block> blocks() const;
    //! Longest prefix whose standard height is at most `height`.
    Chain prefix_at_height(std::uint64_t height) const;
    bool contains(const BlockId& id) const;

    friend bool operator==(const Chain& a, const Chain& b) { return a.head_id() == b.head_id() && a.size() == b.size(); }

    struct Node {
        Block block;
        mutable std::shared_ptr<const Node> prev;
        std::uint64_t standard_height;
        std::size_t length;

        Node(Block b, std::shared_ptr<const Node> p, std::uint64_t h, std::size_t len)
            : block(std::move(b)), prev(std::move(p)), standard_height(h), length(len) {}
        ~Node();
    };

    const Node* node() const { return node_.get(); }

private:
    explicit Chain(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

enum class RejectReason { WrongParent, BadPoW, StaleMatIndex, FutureMatIndex, ForeignDummy };

std::string_view to_string(RejectReason reason);

struct Verdict {
    std::optional<RejectReason> reason;

    bool accepted() const { return !reason; }
    static Verdict accept() { return {}; }
    static Verdict reject(RejectReason r) { return {r}; }
};

/**
 * Single-block validation against a local chain. `current_index` is the
 * validator's mat index; pass std::nullopt to validate without the
 * timeliness rule (plain longest-chain mode).
 */
Verdict validate_block(const Block& b, const Chain& local, const Target& target,
                       std::optional<MatIndex> current_index);

/**
 * Parent id a Standard block with index `next_index` must commit to when it
 * follows `prev`. Intervals strictly between them are filled with the
 * deterministic dummy run, so this also covers compacted chains.
 */
BlockId expected_parent(const Block& prev, MatIndex next_index);

struct ChainFault {
    std::size_t position;  //!< 0-based position from genesis
    RejectReason reason;
};

//! Checks parent commitments, PoW and strictly increasing mat indices.
std::optional<ChainFault> validate_chain(const Chain& chain, const Target& target);

//! Validates `blocks` (oldest first) as an extension of `base`; positions are relative to `blocks`.
std::optional<ChainFault> validate_extension(const Block& base, const std::vector<Block>& blocks,
                                             const Target& target);

struct Divergence {
    Block ancestor;
    std::size_t ancestor_position;     //!< position of the ancestor in `incoming`
    std::vector<Block> local_only;     //!< oldest first
    std::vector<Block> incoming_only;  //!< oldest first
};

//! Splits two chains at their most recent common block.
Divergence diverge(const Chain& local, const Chain& incoming);

struct ForkChoice {
    Chain chosen;
    bool switched = false;
    std::optional<ChainFault> diagnostic;  //!< set when `incoming` failed validation
};

//! Longest standard height wins; on equal height the local (first received) chain is kept.
ForkChoice fork_choice(const Chain& local, const Chain& incoming, const Target& target);

//! Removes every dummy run that is followed by a Standard block.
Chain compact(const Chain& chain);

//! Line-oriented text format: kind,mat_index,parent_hex,nonce,creator,payload,id_hex.
std::string format_chain(const Chain& chain);
//! Parses the text format. Ids are recomputed and must match; links are not validated.
Chain parse_chain(std::string_view text);

} // namespace zeroblock
