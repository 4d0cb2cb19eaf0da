#include "zeroblock/chain.hpp"
#include "zeroblock/errors.hpp"

#include <charconv>
#include <sstream>

namespace zeroblock {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class Int>
std::optional<Int> parse_int(std::string_view text)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

template <class Int>
Int require_int(std::string_view text, std::size_t line, const char* field)
{
    auto v = parse_int<Int>(text);
    if (!v) throw ParseError(line, std::string("bad ") + field + " '" + std::string(text) + "'");
    return *v;
}

Block parse_block(std::string_view line, std::size_t lineno)
{
    const auto f = split(line, ',');
    if (f.size() != 7) {
        throw ParseError(lineno, "expected 7 comma-separated fields, got " + std::to_string(f.size()));
    }
    const auto kind = block_kind_from_string(f[0]);
    if (!kind) throw ParseError(lineno, "unknown block kind '" + std::string(f[0]) + "'");
    const auto mat = require_int<MatIndex>(f[1], lineno, "mat_index");
    auto id = BlockId::from_hex(f[6]);
    if (!id) throw ParseError(lineno, "bad block id");

    std::optional<BlockId> parent;
    if (f[2] != "-") {
        parent = BlockId::from_hex(f[2]);
        if (!parent) throw ParseError(lineno, "bad parent id");
    }

    std::optional<Block> block;
    switch (*kind) {
    case BlockKind::Genesis:
        if (parent || mat != 0 || f[3] != "-" || f[4] != "-" || f[5] != "-") {
            throw ParseError(lineno, "genesis must have index 0 and no other fields");
        }
        block = Block::genesis();
        break;
    case BlockKind::Dummy:
        if (!parent) throw ParseError(lineno, "dummy block without parent");
        if (f[3] != "-" || f[4] != "-" || f[5] != "-") {
            throw ParseError(lineno, "dummy block must not carry nonce, creator or payload");
        }
        block = Block::dummy(*parent, mat);
        break;
    case BlockKind::Standard:
        if (!parent) throw ParseError(lineno, "standard block without parent");
        block = Block::standard(*parent, mat, require_int<std::uint64_t>(f[3], lineno, "nonce"),
                                require_int<MinerId>(f[4], lineno, "creator"),
                                require_int<std::uint64_t>(f[5], lineno, "payload"));
        break;
    }
    if (block->id() != *id) throw ParseError(lineno, "block id does not match its content");
    return *block;
}

} // namespace

std::string format_chain(const Chain& chain)
{
    std::ostringstream os;
    for (const auto& b : chain.blocks()) {
        os << to_string(b.kind()) << ',' << b.mat_index() << ',' << (b.parent() ? b.parent()->hex() : "-") << ',';
        if (b.is_standard()) {
            os << b.nonce() << ',' << b.creator() << ',' << b.payload_tag();
        } else {
            os << "-,-,-";
        }
        os << ',' << b.id().hex() << '\n';
    }
    return os.str();
}

Chain parse_chain(std::string_view text)
{
    std::optional<Chain> chain;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        Block b = parse_block(line, lineno);
        if (!chain) {
            if (b.kind() != BlockKind::Genesis) throw ParseError(lineno, "chain must start with the genesis block");
            chain.emplace();
            continue;
        }
        if (b.kind() == BlockKind::Genesis) throw ParseError(lineno, "genesis block after the first line");
        *chain = chain->append(std::move(b));
    }
    if (!chain) throw ParseError(0, "empty chain file");
    return *chain;
}

} // namespace zeroblock
