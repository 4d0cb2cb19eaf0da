#include "support.hpp"

#include "zeroblock/errors.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace zeroblock;
using zbtest::extend;
using zbtest::extend_dummy;

namespace {

std::set<BlockId> standard_ids(const Chain& c)
{
    std::set<BlockId> out;
    for (const auto& b : c.blocks()) {
        if (b.is_standard()) out.insert(b.id());
    }
    return out;
}

} // namespace

TEST_CASE("genesis is fixed")
{
    const Block g = make_genesis();
    CHECK(g.kind() == BlockKind::Genesis);
    CHECK(g.mat_index() == 0);
    CHECK_FALSE(g.parent().has_value());
    CHECK(make_genesis().id() == g.id());
    CHECK(Chain().standard_height() == 0);
    CHECK(Chain().size() == 1);
    // Independently computed SHA-256 of the length-prefixed genesis encoding.
    CHECK(g.id().hex() == "a8911a34d9a8b5d323f4fc9ed14a47e27e322f296121a7c55bd8c7c9f7924dca");
}

TEST_CASE("dummy blocks are deterministic")
{
    const Block g = make_genesis();
    const Block d = make_dummy(g, 1);
    CHECK(d.is_dummy());
    CHECK(d.parent() == g.id());
    CHECK(d.mat_index() == 1);
    CHECK(make_dummy(g, 1).id() == d.id());
    CHECK(make_dummy(g, 2).id() != d.id());
    CHECK(d.dummy_core()->prev_head == g.id());
    CHECK(d.dummy_core()->fixed_string_hash == sha256("FixedStringZB"));
    CHECK(d.dummy_core()->index == 1);

    const Chain c = extend(extend(Chain(), 1), 5);
    CHECK_THROWS_AS(make_dummy(c.head(), 5), PreconditionError);
    CHECK_THROWS_AS(make_dummy(c.head(), 4), PreconditionError);
    CHECK_NOTHROW(make_dummy(c.head(), 6));
}

TEST_CASE("block ids follow the canonical encoding")
{
    const Block a = Block::standard(make_genesis().id(), 1, 7, 2, 9);
    const Block b = Block::standard(make_genesis().id(), 1, 7, 2, 9);
    const Block c = Block::standard(make_genesis().id(), 1, 7, 2, 10);
    CHECK(a.id() == b.id());
    CHECK(a.id() != c.id());
    CHECK(a.id() == BlockId{sha256(a.encode())});
    CHECK(BlockId::from_hex(a.id().hex())->digest == a.id().digest);
    CHECK_FALSE(BlockId::from_hex("xyz").has_value());
}

TEST_CASE("validate_block")
{
    const Target t = default_pow_target();
    Chain local = extend(Chain(), 1);
    local = extend_dummy(local, 2);
    local = extend_dummy(local, 3);

    SUBCASE("honest block on the current head in the current interval is accepted")
    {
        const Block b = zbtest::mine_block(local, 4, 1);
        CHECK(validate_block(b, local, t, 4).accepted());
        CHECK(validate_block(b, local, t, std::nullopt).accepted());
    }
    SUBCASE("withheld block from an earlier interval is stale")
    {
        const Chain before = local.parent_chain();
        const Block late = Block::standard(before.head_id(), 3, zbtest::mine_block(before, 3, 0).nonce(), 0, 0);
        CHECK(validate_block(late, local, t, 4).reason == RejectReason::StaleMatIndex);
    }
    SUBCASE("block for a future interval")
    {
        const Block b = zbtest::mine_block(local, 5, 1);
        CHECK(validate_block(b, local, t, 4).reason == RejectReason::FutureMatIndex);
    }
    SUBCASE("flipping a nonce bit breaks the proof of work")
    {
        const Block good = zbtest::mine_block(local, 4, 1);
        std::uint64_t nonce = good.nonce();
        for (unsigned bit = 0; bit < 64; ++bit) {
            nonce = good.nonce() ^ (std::uint64_t{1} << bit);
            if (!try_nonce(local.head_id(), nonce, t)) break;
        }
        const Block bad = Block::standard(local.head_id(), 4, nonce, 1, 0);
        CHECK(validate_block(bad, local, t, 4).reason == RejectReason::BadPoW);
    }
    SUBCASE("wrong parent")
    {
        // Skips the local dummies instead of committing to them.
        const BlockId skipped = local.parent_chain().parent_chain().head_id();
        const Block b = Block::standard(skipped, 4, find_nonce(skipped, t, 0).nonce, 1, 0);
        CHECK(validate_block(b, local, t, 4).reason == RejectReason::WrongParent);
    }
    SUBCASE("dummies are never accepted from peers")
    {
        CHECK(validate_block(make_dummy(local.head(), 4), local, t, 4).reason == RejectReason::ForeignDummy);
    }
}

TEST_CASE("validate_chain accepts generated chains and locates faults")
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const Chain c = zbtest::random_chain(rng, 30, 0.6);
        CHECK_FALSE(validate_chain(c, default_pow_target()).has_value());
        MatIndex last = 0;
        for (const auto& b : c.blocks()) {
            if (b.kind() != BlockKind::Genesis) CHECK(b.mat_index() > last);
            last = b.mat_index();
        }
    }

    Chain c = extend(extend(Chain(), 1), 2);
    const Block stray = zbtest::mine_block(Chain(), 3, 4);
    c = c.append(stray);
    const auto fault = validate_chain(c, default_pow_target());
    REQUIRE(fault);
    CHECK(fault->position == 3);
    CHECK(fault->reason == RejectReason::WrongParent);
}

TEST_CASE("fork choice")
{
    const Target t = default_pow_target();
    const Chain base = extend(extend(Chain(), 1, 1), 2, 1);
    const Chain five = extend(extend(extend(base, 3, 1), 4, 1), 5, 1);
    const Chain six = extend(five, 6, 2);
    const Chain rival5 = extend(extend(extend(base, 3, 2, 1), 4, 2, 1), 5, 2, 1);

    CHECK(fork_choice(five, six, t).chosen == six);
    CHECK(fork_choice(five, six, t).switched);
    CHECK(fork_choice(six, five, t).chosen == six);
    CHECK(fork_choice(five, rival5, t).chosen == five);
    CHECK_FALSE(fork_choice(five, rival5, t).switched);

    // Corrupt one parent link in an otherwise longer chain.
    Chain corrupt = extend(base, 3, 2, 7);
    corrupt = corrupt.append(zbtest::mine_block(base, 4, 2));
    corrupt = extend(extend(extend(corrupt, 5, 2), 6, 2), 7, 2);
    const auto fc = fork_choice(five, corrupt, t);
    CHECK(fc.chosen == five);
    CHECK_FALSE(fc.switched);
    REQUIRE(fc.diagnostic);
    CHECK(fc.diagnostic->reason == RejectReason::WrongParent);
}

TEST_CASE("diverge splits at the common ancestor")
{
    const Chain base = extend(extend(Chain(), 1), 2);
    const Chain a = extend(extend(base, 3, 1), 4, 1);
    const Chain b = extend(base, 3, 2, 5);
    const auto d = diverge(a, b);
    CHECK(d.ancestor.id() == base.head_id());
    CHECK(d.local_only.size() == 2);
    CHECK(d.incoming_only.size() == 1);
    CHECK(d.incoming_only[0].id() == b.head_id());
    CHECK(diverge(a, a).incoming_only.empty());
}

TEST_CASE("compaction removes interior dummy runs")
{
    const Chain b1 = extend(Chain(), 1);
    const Chain full = extend(extend_dummy(extend_dummy(b1, 2), 3), 4);
    const Chain compacted = compact(full);
    const auto blocks = compacted.blocks();
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[1].id() == b1.head_id());
    CHECK(blocks[2].id() == full.head_id());
    CHECK_FALSE(validate_chain(compacted, default_pow_target()).has_value());

    const Chain plain = extend(extend(Chain(), 1), 2);
    CHECK(compact(plain).blocks() == plain.blocks());

    const Chain trailing = extend_dummy(extend_dummy(full, 5), 6);
    CHECK(compact(trailing).size() == compacted.size() + 2);
}

TEST_CASE("compaction properties over generated chains")
{
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 200; ++k) {
        const Chain c = zbtest::random_chain(rng, 1 + k % 40, 0.1 + 0.8 * uniform01(rng));
        const Chain once = compact(c);
        CHECK(compact(once).blocks() == once.blocks());
        CHECK(once.standard_height() == c.standard_height());
        CHECK(standard_ids(once) == standard_ids(c));
        CHECK_FALSE(validate_chain(once, default_pow_target()).has_value());
        // No dummy remains directly before a Standard block, except in the leading run after genesis.
        const auto blocks = once.blocks();
        bool seen_standard = false;
        for (std::size_t i = 1; i + 1 < blocks.size(); ++i) {
            seen_standard = seen_standard || blocks[i].is_standard();
            if (seen_standard && blocks[i].is_dummy()) CHECK_FALSE(blocks[i + 1].is_standard());
        }
    }
}

TEST_CASE("chain text format round-trips")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 30; ++k) {
        const Chain c = zbtest::random_chain(rng, 25, 0.5);
        const std::string text = format_chain(c);
        const Chain back = parse_chain(text);
        CHECK(back.blocks() == c.blocks());
        CHECK(format_chain(back) == text);
        CHECK_FALSE(validate_chain(back, default_pow_target()).has_value());
    }
}

TEST_CASE("chain parser diagnostics carry line numbers")
{
    const std::string good = format_chain(extend(extend(Chain(), 1), 2));
    auto line_of = [](const std::string& text) {
        try {
            parse_chain(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    std::string bad_id = good;
    bad_id[bad_id.size() - 2] = bad_id[bad_id.size() - 2] == '0' ? '1' : '0';
    CHECK(line_of(bad_id) == 3);
    CHECK(line_of("standard,1,-,-,-,-,00\n") == 1);
    CHECK(line_of(good + "genesis,0,-,-,-,-,x\n") == 4);
    CHECK(line_of("genesis,0\n") == 1);
}

TEST_CASE("fixture chain compacts to the golden file")
{
    const Chain c = parse_chain(zbtest::slurp(zbtest::fixture("interleaved.chain")));
    CHECK_FALSE(validate_chain(c, default_pow_target()).has_value());
    const std::string golden = zbtest::slurp(zbtest::fixture("interleaved.compacted.chain"));
    CHECK(format_chain(compact(c)) == golden);
    CHECK(format_chain(compact(parse_chain(golden))) == golden);
}

TEST_CASE("broken-parent fixture is rejected at the mutated block")
{
    const Chain c = parse_chain(zbtest::slurp(zbtest::fixture("broken-parent.chain")));
    const auto fault = validate_chain(c, default_pow_target());
    REQUIRE(fault);
    CHECK(fault->position == 5);
    CHECK(fault->reason == RejectReason::WrongParent);
}
