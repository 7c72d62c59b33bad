#pragma once

#include <cstddef>
#include <cstdint>

namespace lsr {

using Index = std::int64_t;
using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using f32 = float;
using f64 = double;

enum class StorageKind : u32 { dense = 0, sparse = 1 };

inline const char* storage_kind_name(StorageKind k) {
    return k == StorageKind::dense ? "dense" : "sparse";
}

}  // namespace lsr
