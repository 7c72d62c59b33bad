#pragma once

#include <atomic>
#include <cstddef>
#include <limits>
#include <new>
#include <vector>

namespace lsr::memtrack {

// Byte counters for every numerical payload buffer in the library.
// current() is the live total, peak() the high-water mark since the last
// reset_peak(). The streaming-memory tests assert on peak() around fit calls.

namespace detail {
inline std::atomic<std::size_t>& current_bytes() {
    static std::atomic<std::size_t> v{0};
    return v;
}
inline std::atomic<std::size_t>& peak_bytes() {
    static std::atomic<std::size_t> v{0};
    return v;
}
}  // namespace detail

inline void add(std::size_t n) {
    std::size_t cur = detail::current_bytes().fetch_add(n) + n;
    std::size_t peak = detail::peak_bytes().load();
    while (cur > peak && !detail::peak_bytes().compare_exchange_weak(peak, cur)) {
    }
}

inline void sub(std::size_t n) { detail::current_bytes().fetch_sub(n); }

inline std::size_t current() { return detail::current_bytes().load(); }
inline std::size_t peak() { return detail::peak_bytes().load(); }

inline void reset_peak() { detail::peak_bytes().store(current()); }

template <typename T>
struct TrackedAllocator {
    using value_type = T;

    TrackedAllocator() noexcept = default;
    template <typename U>
    TrackedAllocator(const TrackedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        if (n > std::numeric_limits<std::size_t>::max() / sizeof(T))
            throw std::bad_alloc();
        add(n * sizeof(T));
        return static_cast<T*>(::operator new(n * sizeof(T)));
    }
    void deallocate(T* p, std::size_t n) noexcept {
        sub(n * sizeof(T));
        ::operator delete(p);
    }

    template <typename U>
    bool operator==(const TrackedAllocator<U>&) const noexcept {
        return true;
    }
};

}  // namespace lsr::memtrack

namespace lsr {

// All matrix payloads and algorithm scratch buffers use this vector type so
// the tracker sees them.
template <typename T>
using Buffer = std::vector<T, memtrack::TrackedAllocator<T>>;

}  // namespace lsr
