#pragma once

// CRC-32 (IEEE 802.3 polynomial, reflected) used to checksum slice files.
// Callable incrementally: feed chunks in order, passing the previous return
// value as `crc`.

#include <array>
#include <cstddef>

#include "lsr/types.hpp"

namespace lsr::io {

namespace detail {

constexpr std::array<u32, 256> make_crc32_table() {
    std::array<u32, 256> table{};
    for (u32 i = 0; i < 256; ++i) {
        u32 c = i;
        for (int bit = 0; bit < 8; ++bit)
            c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        table[i] = c;
    }
    return table;
}

inline constexpr std::array<u32, 256> kCrc32Table = make_crc32_table();

}  // namespace detail

inline u32 crc32(const void* data, std::size_t n, u32 crc = 0) {
    const auto* p = static_cast<const unsigned char*>(data);
    u32 c = crc ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i)
        c = detail::kCrc32Table[(c ^ p[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

}  // namespace lsr::io
