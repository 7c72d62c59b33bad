#pragma once

#include <cmath>
#include <string_view>

#include "lsr/types.hpp"

// Counter-based PRNG: output t of stream(seed) is mix64(seed + (t+1)*GOLDEN),
// so a stream is fully determined by its seed and position. Normal draws use
// Box-Muller on pairs of uniforms. Pinned and versioned: model files record
// the generator id and matrices are regenerated from (seed, shape) on load.

namespace lsr::rng {

inline constexpr const char* kGeneratorVersion = "splitmix64-boxmuller/v1";
inline constexpr u64 kGolden = 0x9E3779B97F4A7C15ull;

inline u64 mix64(u64 z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Label-keyed sub-seed so one root seed drives every randomized stage
/// (sketch, fold shuffles, synthesis) without stream collisions.
inline u64 derive(u64 seed, std::string_view label) {
    u64 h = 0xCBF29CE484222325ull;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return mix64(seed ^ mix64(h));
}

class Stream {
public:
    explicit Stream(u64 seed) : seed_(seed) {}

    u64 next_u64() { return mix64(seed_ + (++counter_) * kGolden); }

    /// Uniform in (0, 1]. Never returns 0, so log() below is safe.
    f64 next_unit() {
        return static_cast<f64>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    f64 next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const f64 u1 = next_unit();
        const f64 u2 = next_unit();
        const f64 r = std::sqrt(-2.0 * std::log(u1));
        const f64 theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Fisher-Yates index for shuffles: uniform in [0, n) by rejection.
    u64 next_below(u64 n) {
        const u64 limit = n * (~u64{0} / n);
        u64 x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

private:
    u64 seed_;
    u64 counter_ = 0;
    bool have_spare_ = false;
    f64 spare_ = 0.0;
};

inline void fill_normal_f32(f32* out, std::size_t n, u64 seed) {
    Stream s(seed);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<f32>(s.next_normal());
}

}  // namespace lsr::rng
