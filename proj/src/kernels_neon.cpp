// NEON kernel variants for aarch64. NEON is baseline on aarch64 so no
// runtime feature probe is needed. f32 lanes are widened to f64 pairs
// before accumulation, same contract as the scalar kernels.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "lsr/kernels.hpp"

namespace lsr::kernels::neon {

f64 dot_f32(const f32* a, const f32* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t va = vld1q_f32(a + i);
        const float32x4_t vb = vld1q_f32(b + i);
        acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)),
                         vcvt_f64_f32(vget_low_f32(vb)));
        acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    }
    f64 acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i)
        acc += static_cast<f64>(a[i]) * static_cast<f64>(b[i]);
    return acc;
}

void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n) {
    const float32x4_t va = vdupq_n_f32(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vx = vld1q_f32(x + i);
        const float32x4_t vy = vld1q_f32(y + i);
        vst1q_f32(y + i, vfmaq_f32(vy, va, vx));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(static_cast<f64>(alpha));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vx = vld1q_f32(x + i);
        float64x2_t lo = vld1q_f64(acc + i);
        float64x2_t hi = vld1q_f64(acc + i + 2);
        lo = vfmaq_f64(lo, va, vcvt_f64_f32(vget_low_f32(vx)));
        hi = vfmaq_f64(hi, va, vcvt_high_f64_f32(vx));
        vst1q_f64(acc + i, lo);
        vst1q_f64(acc + i + 2, hi);
    }
    const f64 a = static_cast<f64>(alpha);
    for (; i < n; ++i) acc[i] += a * static_cast<f64>(x[i]);
}

void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq) {
    float64x2_t s = vdupq_n_f64(0.0);
    float64x2_t q = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vx = vld1q_f32(x + i);
        const float64x2_t lo = vcvt_f64_f32(vget_low_f32(vx));
        const float64x2_t hi = vcvt_high_f64_f32(vx);
        s = vaddq_f64(s, vaddq_f64(lo, hi));
        q = vfmaq_f64(q, lo, lo);
        q = vfmaq_f64(q, hi, hi);
    }
    f64 ss = vaddvq_f64(s);
    f64 qq = vaddvq_f64(q);
    for (; i < n; ++i) {
        const f64 v = static_cast<f64>(x[i]);
        ss += v;
        qq += v * v;
    }
    sum += ss;
    sumsq += qq;
}

void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale) {
    const float32x4_t vshift = vdupq_n_f32(shift);
    const float32x4_t vscale = vdupq_n_f32(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vx = vld1q_f32(x + i);
        vst1q_f32(x + i, vmulq_f32(vsubq_f32(vx, vshift), vscale));
    }
    for (; i < n; ++i) x[i] = (x[i] - shift) * scale;
}

}  // namespace lsr::kernels::neon

#endif  // __aarch64__
