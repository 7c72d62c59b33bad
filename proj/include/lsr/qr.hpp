#pragma once

// Householder QR in two forms.
//
// householder_qr: in-core reduced factorization A = QR with orthonormal Q
// and a nonnegative-diagonal upper-triangular R. The oracle path.
//
// QrState: the out-of-core form. Only a K̄×K̄ triangle persists; each row
// block Ys is absorbed by factoring the stack [R; Ys], exploiting the
// triangular top block so each reflector touches one triangle row plus the
// new block. Q is never formed here, by design: the streaming algorithm
// that owns this state reconstructs everything it needs from R alone, and
// no API on QrState exposes Q.
//
// Both paths compute in f64 internally and narrow to f32 at the surface,
// so the incremental and in-core R factors agree to f32 rounding no matter
// how many blocks were absorbed. The nonnegative-diagonal convention makes
// R unique for full-column-rank input, which keeps oracle comparisons
// elementwise rather than up-to-sign.

#include "lsr/dense.hpp"
#include "lsr/memtrack.hpp"

namespace lsr {

struct QrResult {
    DenseMatrix q;  // M×N, orthonormal columns
    DenseMatrix r;  // N×N, upper triangular, nonnegative diagonal
};

// Reduced QR via Householder reflections; requires rows ≥ cols.
QrResult householder_qr(const DenseMatrix& a);

class QrState {
public:
    explicit QrState(Index kbar);

    // Absorbs a row block: the triangle becomes the R factor of
    // [old triangle; ys]. Blocks must arrive in slice order.
    void absorb(const DenseMatrix& ys);

    Index kbar() const { return kbar_; }
    Index rows_absorbed() const { return rows_absorbed_; }

    // f32 view of the running triangle (exact zeros below the diagonal).
    DenseMatrix r() const;

    // Solves Rᵀ B = a by forward substitution against the full-precision
    // internal triangle. Same contract as the free solve_rtranspose.
    DenseMatrix solve_rtranspose(const DenseMatrix& a) const;

private:
    Buffer<f64> r_;  // kbar×kbar column-major; strictly-lower part stays 0
    Index kbar_ = 0;
    Index rows_absorbed_ = 0;
};

// First-block initialization: y1 must have kbar columns and at least kbar
// rows (the tall-and-skinny requirement on the leading slice).
QrState qr_init(const DenseMatrix& y1, Index kbar);

// Functional wrapper over QrState::absorb.
QrState qr_update(QrState state, const DenseMatrix& ys);

// Solves Rᵀ B = a by forward substitution without ever forming R⁻¹.
// r must be square upper triangular with no diagonal entry below
// 1e-6 · max|diag|; violations raise a rank error naming the numerical
// rank and advising a smaller sketch width.
DenseMatrix solve_rtranspose(const DenseMatrix& r, const DenseMatrix& a);

}  // namespace lsr
