#include "lsr/kernels.hpp"

#include <atomic>

#include "lsr/error.hpp"

namespace lsr::kernels {

namespace scalar {

f64 dot_f32(const f32* a, const f32* b, std::size_t n) {
    f64 acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += static_cast<f64>(a[i]) * static_cast<f64>(b[i]);
    return acc;
}

void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n) {
    const f64 a = static_cast<f64>(alpha);
    for (std::size_t i = 0; i < n; ++i) acc[i] += a * static_cast<f64>(x[i]);
}

f64 spdot_f32(const f32* col, const u64* idx, const f32* val, std::size_t nnz) {
    f64 acc = 0.0;
    for (std::size_t t = 0; t < nnz; ++t)
        acc += static_cast<f64>(col[idx[t]]) * static_cast<f64>(val[t]);
    return acc;
}

void spaxpy_acc(f64* acc, f32 alpha, const u64* idx, const f32* val,
                std::size_t nnz) {
    const f64 a = static_cast<f64>(alpha);
    for (std::size_t t = 0; t < nnz; ++t)
        acc[idx[t]] += a * static_cast<f64>(val[t]);
}

void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq) {
    f64 s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const f64 v = static_cast<f64>(x[i]);
        s += v;
        ss += v * v;
    }
    sum += s;
    sumsq += ss;
}

void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale) {
    for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] - shift) * scale;
}

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
bool supported();
f64 dot_f32(const f32* a, const f32* b, std::size_t n);
void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n);
void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n);
f64 spdot_f32(const f32* col, const u64* idx, const f32* val, std::size_t nnz);
void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq);
void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
f64 dot_f32(const f32* a, const f32* b, std::size_t n);
void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n);
void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n);
void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq);
void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale);
}  // namespace neon
#endif

namespace {

struct KernelTable {
    f64 (*dot)(const f32*, const f32*, std::size_t);
    void (*axpy)(f32*, f32, const f32*, std::size_t);
    void (*axpy_acc)(f64*, f32, const f32*, std::size_t);
    f64 (*spdot)(const f32*, const u64*, const f32*, std::size_t);
    void (*spaxpy_acc)(f64*, f32, const u64*, const f32*, std::size_t);
    void (*sum_sumsq)(const f32*, std::size_t, f64&, f64&);
    void (*scale_shift)(f32*, std::size_t, f32, f32);
};

constexpr KernelTable kScalarTable = {
    scalar::dot_f32,       scalar::axpy_f32,      scalar::axpy_acc,
    scalar::spdot_f32,     scalar::spaxpy_acc,    scalar::sum_sumsq_f32,
    scalar::scale_shift_f32,
};

#if defined(__x86_64__) || defined(_M_X64)
// The scatter-add has no AVX2 counterpart (no scatter instruction); the
// scalar loop stays in the table.
constexpr KernelTable kAvx2Table = {
    avx2::dot_f32,       avx2::axpy_f32,      avx2::axpy_acc,
    avx2::spdot_f32,     scalar::spaxpy_acc,  avx2::sum_sumsq_f32,
    avx2::scale_shift_f32,
};
#endif

#if defined(__aarch64__)
constexpr KernelTable kNeonTable = {
    neon::dot_f32,       neon::axpy_f32,      neon::axpy_acc,
    scalar::spdot_f32,   scalar::spaxpy_acc,  neon::sum_sumsq_f32,
    neon::scale_shift_f32,
};
#endif

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2:
            return &kAvx2Table;
#endif
#if defined(__aarch64__)
        case Backend::neon:
            return &kNeonTable;
#endif
        default:
            return nullptr;
    }
}

Backend detect_best() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2::supported()) return Backend::avx2;
#elif defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const KernelTable& table() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        Backend b = detect_best();
        t = table_for(b);
        g_backend.store(b, std::memory_order_relaxed);
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

}  // namespace

Backend active() {
    table();
    return g_backend.load(std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "?";
}

bool backend_supported(Backend b) {
    if (b == Backend::scalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
    if (b == Backend::avx2) return avx2::supported();
#endif
#if defined(__aarch64__)
    if (b == Backend::neon) return true;
#endif
    return false;
}

void force(Backend b) {
    if (!backend_supported(b))
        throw Error(std::string("kernel backend not supported on this CPU: ") +
                    backend_name(b));
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(table_for(b), std::memory_order_release);
}

void select_best() { force(detect_best()); }

f64 dot_f32(const f32* a, const f32* b, std::size_t n) {
    return table().dot(a, b, n);
}
void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n) {
    table().axpy(y, alpha, x, n);
}
void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n) {
    table().axpy_acc(acc, alpha, x, n);
}
f64 spdot_f32(const f32* col, const u64* idx, const f32* val, std::size_t nnz) {
    return table().spdot(col, idx, val, nnz);
}
void spaxpy_acc(f64* acc, f32 alpha, const u64* idx, const f32* val,
                std::size_t nnz) {
    table().spaxpy_acc(acc, alpha, idx, val, nnz);
}
void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq) {
    table().sum_sumsq(x, n, sum, sumsq);
}
void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale) {
    table().scale_shift(x, n, shift, scale);
}

}  // namespace lsr::kernels
