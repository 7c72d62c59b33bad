#pragma once

#include <cstddef>

#include "lsr/types.hpp"

// =============================================================================
// Data-parallel inner loops shared by every algorithm in the library.
//
// Each kernel has a scalar reference implementation and SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64) selected once at startup from CPU
// capabilities. All accumulating kernels widen f32 operands to f64 before
// summing; results are bitwise-deterministic for a fixed backend.
//
// Tests force each backend in turn and assert scalar/SIMD equivalence.
// =============================================================================

namespace lsr::kernels {

enum class Backend { scalar, avx2, neon };

Backend active();
const char* backend_name(Backend b);
bool backend_supported(Backend b);

/// Select a backend explicitly (tests; `force(Backend::scalar)` is always
/// valid). Throws Error if the CPU lacks the requested extension.
void force(Backend b);

/// Re-run CPU detection and select the best supported backend.
void select_best();

/// sum_i a[i] * b[i], accumulated in f64.
f64 dot_f32(const f32* a, const f32* b, std::size_t n);

/// y[i] += alpha * x[i] in f32.
void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n);

/// acc[i] += alpha * x[i], acc in f64.
void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n);

/// sum_t col[idx[t]] * val[t], accumulated in f64 (sparse-column dot).
f64 spdot_f32(const f32* col, const u64* idx, const f32* val, std::size_t nnz);

/// acc[idx[t]] += alpha * val[t], acc in f64 (sparse scatter-add; the indices
/// of one CSC column are strictly increasing, so no conflicts).
void spaxpy_acc(f64* acc, f32 alpha, const u64* idx, const f32* val,
                std::size_t nnz);

/// Accumulate sum and sum of squares of x in f64 (statistics pass).
void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq);

/// x[i] = (x[i] - shift) * scale (column standardization transform).
void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale);

namespace scalar {
f64 dot_f32(const f32* a, const f32* b, std::size_t n);
void axpy_f32(f32* y, f32 alpha, const f32* x, std::size_t n);
void axpy_acc(f64* acc, f32 alpha, const f32* x, std::size_t n);
f64 spdot_f32(const f32* col, const u64* idx, const f32* val, std::size_t nnz);
void spaxpy_acc(f64* acc, f32 alpha, const u64* idx, const f32* val,
                std::size_t nnz);
void sum_sumsq_f32(const f32* x, std::size_t n, f64& sum, f64& sumsq);
void scale_shift_f32(f32* x, std::size_t n, f32 shift, f32 scale);
}  // namespace scalar

}  // namespace lsr::kernels
