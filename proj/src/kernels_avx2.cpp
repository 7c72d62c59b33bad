// AVX2+FMA kernel variants. Compiled with per-function target attributes so
// this TU builds without -mavx2; the dispatcher only installs these after a
// cpuid check. Every accumulator widens f32 lanes to f64 before summing,
// matching the scalar reference semantics.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "lsr/kernels.hpp"

#define LSR_AVX2 __attribute__((target("avx2,fma")))

namespace lsr::kernels::avx2 {

bool supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

LSR_AVX2 inline f64 hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

LSR_AVX2 f64 dot_f32(const f32* a, const f32* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
        const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
        const __m256d b_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
        const __m256d b_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
        acc0 = _mm256_fmadd_pd(a_lo, b_lo, acc0);
        acc1 = _mm256_fmadd_pd(a_hi, b_hi, acc1);
    }
    f64 acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += static_cast<f64>(a[i]) * static_cast<f64>(b[i]);
    return acc;
}

LSR_AVX2 void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n) {
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vx = _mm256_loadu_ps(x + i);
        const __m256 vy = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, vx, vy));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

LSR_AVX2 void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(static_cast<f64>(alpha));
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vx = _mm256_loadu_ps(x + i);
        const __m256d x_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vx));
        const __m256d x_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vx, 1));
        const __m256d acc_lo = _mm256_loadu_pd(acc + i);
        const __m256d acc_hi = _mm256_loadu_pd(acc + i + 4);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(va, x_lo, acc_lo));
        _mm256_storeu_pd(acc + i + 4, _mm256_fmadd_pd(va, x_hi, acc_hi));
    }
    const f64 a = static_cast<f64>(alpha);
    for (; i < n; ++i) acc[i] += a * static_cast<f64>(x[i]);
}

LSR_AVX2 f64 spdot_f32(const f32* col, const u64* idx, const f32* val,
                       std::size_t nnz) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t t = 0;
    for (; t + 4 <= nnz; t += 4) {
        const __m256i vi =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx + t));
        const __m128 gathered = _mm256_i64gather_ps(col, vi, 4);
        const __m256d g = _mm256_cvtps_pd(gathered);
        const __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(val + t));
        acc = _mm256_fmadd_pd(g, v, acc);
    }
    f64 s = hsum(acc);
    for (; t < nnz; ++t)
        s += static_cast<f64>(col[idx[t]]) * static_cast<f64>(val[t]);
    return s;
}

LSR_AVX2 void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    __m256d q0 = _mm256_setzero_pd();
    __m256d q1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vx = _mm256_loadu_ps(x + i);
        const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vx));
        const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vx, 1));
        s0 = _mm256_add_pd(s0, lo);
        s1 = _mm256_add_pd(s1, hi);
        q0 = _mm256_fmadd_pd(lo, lo, q0);
        q1 = _mm256_fmadd_pd(hi, hi, q1);
    }
    f64 s = hsum(_mm256_add_pd(s0, s1));
    f64 q = hsum(_mm256_add_pd(q0, q1));
    for (; i < n; ++i) {
        const f64 v = static_cast<f64>(x[i]);
        s += v;
        q += v * v;
    }
    sum += s;
    sumsq += q;
}

LSR_AVX2 void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale) {
    const __m256 vshift = _mm256_set1_ps(shift);
    const __m256 vscale = _mm256_set1_ps(scale);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vx = _mm256_loadu_ps(x + i);
        _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_sub_ps(vx, vshift), vscale));
    }
    for (; i < n; ++i) x[i] = (x[i] - shift) * scale;
}

}  // namespace lsr::kernels::avx2

#endif  // x86-64
