#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zeroblock {

using Digest = std::array<std::uint8_t, 32>;

//! SHA-256 of a byte string.
Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::optional<Digest> digest_from_hex(std::string_view hex);

/** Identifier of a block: the hash of its canonical encoding. */
struct BlockId {
    Digest digest{};

    std::string hex() const { return to_hex(digest); }
    static std::optional<BlockId> from_hex(std::string_view hex);

    friend auto operator<=>(const BlockId&, const BlockId&) = default;
};

//! Appends big-endian fixed-width integers to a byte buffer.
inline void put_be(std::vector<std::uint8_t>& out, std::uint64_t value, int width)
{
    for (int shift = (width - 1) * 8; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

} // namespace zeroblock

template <>
struct std::hash<zeroblock::BlockId> {
    std::size_t operator()(const zeroblock::BlockId& id) const noexcept
    {
        std::size_t h;
        std::memcpy(&h, id.digest.data(), sizeof h);
        return h;
    }
};
