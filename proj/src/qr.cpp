#include "lsr/qr.hpp"

#include <algorithm>
#include <cmath>

#include "lsr/error.hpp"

namespace lsr {

namespace {

// Shared forward-substitution core over an f64 column-major triangle.
// (Rᵀ)_{i,j} = R_{j,i}, so row i of the lower-triangular system reads
// column entries r[j,i] for j < i.
DenseMatrix solve_rtranspose_f64(const f64* r, Index k, const DenseMatrix& a) {
    if (a.rows() != k)
        throw shape_mismatch("solve_rtranspose", k, k, a.rows(), a.cols());

    f64 max_diag = 0.0;
    for (Index i = 0; i < k; ++i)
        max_diag = std::max(max_diag, std::abs(r[static_cast<std::size_t>(i * k + i)]));
    Index numeric_rank = 0;
    for (Index i = 0; i < k; ++i) {
        const f64 d = std::abs(r[static_cast<std::size_t>(i * k + i)]);
        if (max_diag > 0.0 && d >= 1e-6 * max_diag) ++numeric_rank;
    }
    if (numeric_rank < k)
        throw RankError("triangular factor is rank deficient: numerical rank " +
                            std::to_string(numeric_rank) + " of " + std::to_string(k) +
                            "; choose a smaller sketch width kbar",
                        numeric_rank);

    DenseMatrix b(k, a.cols());
    Buffer<f64> col(static_cast<std::size_t>(k));
    for (Index c = 0; c < a.cols(); ++c) {
        for (Index i = 0; i < k; ++i) {
            f64 s = static_cast<f64>(a(i, c));
            const f64* ri = r + static_cast<std::size_t>(i * k);  // column i = row i of Rᵀ
            for (Index j = 0; j < i; ++j) s -= ri[j] * col[static_cast<std::size_t>(j)];
            col[static_cast<std::size_t>(i)] = s / ri[i];
        }
        f32* bc = b.col(c);
        for (Index i = 0; i < k; ++i) bc[i] = static_cast<f32>(col[static_cast<std::size_t>(i)]);
    }
    return b;
}

}  // namespace

QrResult householder_qr(const DenseMatrix& a) {
    const Index m = a.rows();
    const Index n = a.cols();
    if (m < n)
        throw ShapeError("householder_qr: need rows >= cols, got " + std::to_string(m) +
                         " x " + std::to_string(n));

    // Work in f64: w carries the evolving matrix, v the reflectors (column
    // j of v is zero above row j).
    Buffer<f64> w(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        const f32* src = a.col(j);
        f64* dst = w.data() + static_cast<std::size_t>(j * m);
        for (Index i = 0; i < m; ++i) dst[i] = src[i];
    }
    Buffer<f64> v(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0.0);
    Buffer<f64> vtv(static_cast<std::size_t>(n), 0.0);

    const Index t = std::min(m - 1, n);
    for (Index j = 0; j < t; ++j) {
        f64* wj = w.data() + static_cast<std::size_t>(j * m);
        f64 sigma = 0.0;
        for (Index i = j + 1; i < m; ++i) sigma += wj[i] * wj[i];
        if (sigma == 0.0) continue;  // column already collapsed; sign fixed later

        const f64 a0 = wj[j];
        const f64 mu = std::sqrt(a0 * a0 + sigma);
        // Maps (a0, tail) to (+mu, 0). The a0 > 0 branch avoids cancellation.
        const f64 v0 = a0 <= 0.0 ? a0 - mu : -sigma / (a0 + mu);
        f64* vj = v.data() + static_cast<std::size_t>(j * m);
        vj[j] = v0;
        for (Index i = j + 1; i < m; ++i) vj[i] = wj[i];
        vtv[static_cast<std::size_t>(j)] = v0 * v0 + sigma;

        wj[j] = mu;
        for (Index i = j + 1; i < m; ++i) wj[i] = 0.0;
        for (Index c = j + 1; c < n; ++c) {
            f64* wc = w.data() + static_cast<std::size_t>(c * m);
            f64 dot = 0.0;
            for (Index i = j; i < m; ++i) dot += vj[i] * wc[i];
            const f64 coef = 2.0 * dot / vtv[static_cast<std::size_t>(j)];
            for (Index i = j; i < m; ++i) wc[i] -= coef * vj[i];
        }
    }

    // Q = H_0 ... H_{t-1} E with E the first n identity columns; apply in
    // reverse so each reflector hits the partially built product.
    Buffer<f64> q(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0.0);
    for (Index j = 0; j < n; ++j) q[static_cast<std::size_t>(j * m + j)] = 1.0;
    for (Index j = t - 1; j >= 0; --j) {
        if (vtv[static_cast<std::size_t>(j)] == 0.0) continue;
        const f64* vj = v.data() + static_cast<std::size_t>(j * m);
        for (Index c = 0; c < n; ++c) {
            f64* qc = q.data() + static_cast<std::size_t>(c * m);
            f64 dot = 0.0;
            for (Index i = j; i < m; ++i) dot += vj[i] * qc[i];
            const f64 coef = 2.0 * dot / vtv[static_cast<std::size_t>(j)];
            for (Index i = j; i < m; ++i) qc[i] -= coef * vj[i];
        }
    }

    // Enforce the nonnegative-diagonal convention: a row flip of R paired
    // with the matching column flip of Q leaves QR unchanged.
    for (Index j = 0; j < n; ++j) {
        if (w[static_cast<std::size_t>(j * m + j)] < 0.0) {
            for (Index c = j; c < n; ++c) w[static_cast<std::size_t>(c * m + j)] = -w[static_cast<std::size_t>(c * m + j)];
            f64* qj = q.data() + static_cast<std::size_t>(j * m);
            for (Index i = 0; i < m; ++i) qj[i] = -qj[i];
        }
    }

    QrResult result;
    result.q = DenseMatrix(m, n);
    for (Index j = 0; j < n; ++j) {
        const f64* src = q.data() + static_cast<std::size_t>(j * m);
        f32* dst = result.q.col(j);
        for (Index i = 0; i < m; ++i) dst[i] = static_cast<f32>(src[i]);
    }
    result.r = DenseMatrix(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i <= j; ++i)
            result.r(i, j) = static_cast<f32>(w[static_cast<std::size_t>(j * m + i)]);
    return result;
}

QrState::QrState(Index kbar)
    : r_(static_cast<std::size_t>(kbar) * static_cast<std::size_t>(kbar), 0.0),
      kbar_(kbar) {
    if (kbar < 1) throw ShapeError("QrState: kbar must be at least 1");
}

void QrState::absorb(const DenseMatrix& ys) {
    if (ys.cols() != kbar_)
        throw shape_mismatch("qr_update", kbar_, kbar_, ys.rows(), ys.cols());
    const Index k = kbar_;
    const Index rows = ys.rows();
    if (rows == 0) return;

    Buffer<f64> w(static_cast<std::size_t>(rows) * static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) {
        const f32* src = ys.col(j);
        f64* dst = w.data() + static_cast<std::size_t>(j * rows);
        for (Index i = 0; i < rows; ++i) dst[i] = src[i];
    }

    auto rat = [&](Index i, Index j) -> f64& {
        return r_[static_cast<std::size_t>(j * kbar_ + i)];
    };

    // Factor the stack [R; W]. The top block is upper triangular, so the
    // reflector for column j lives on {triangle row j} ∪ {all of W};
    // triangle rows above j are untouched and rows below j stay zero.
    for (Index j = 0; j < k; ++j) {
        f64* wj = w.data() + static_cast<std::size_t>(j * rows);
        f64 sigma = 0.0;
        for (Index i = 0; i < rows; ++i) sigma += wj[i] * wj[i];
        const f64 a0 = rat(j, j);
        if (sigma == 0.0) {
            if (a0 < 0.0)
                for (Index c = j; c < k; ++c) rat(j, c) = -rat(j, c);
            continue;
        }
        const f64 mu = std::sqrt(a0 * a0 + sigma);
        const f64 v0 = a0 <= 0.0 ? a0 - mu : -sigma / (a0 + mu);
        const f64 vtv = v0 * v0 + sigma;

        rat(j, j) = mu;
        for (Index c = j + 1; c < k; ++c) {
            f64* wc = w.data() + static_cast<std::size_t>(c * rows);
            f64 dot = v0 * rat(j, c);
            for (Index i = 0; i < rows; ++i) dot += wj[i] * wc[i];
            const f64 coef = 2.0 * dot / vtv;
            rat(j, c) -= coef * v0;
            for (Index i = 0; i < rows; ++i) wc[i] -= coef * wj[i];
        }
    }
    rows_absorbed_ += rows;
}

DenseMatrix QrState::r() const {
    DenseMatrix out(kbar_, kbar_);
    for (Index j = 0; j < kbar_; ++j)
        for (Index i = 0; i <= j; ++i)
            out(i, j) = static_cast<f32>(r_[static_cast<std::size_t>(j * kbar_ + i)]);
    return out;
}

DenseMatrix QrState::solve_rtranspose(const DenseMatrix& a) const {
    return solve_rtranspose_f64(r_.data(), kbar_, a);
}

QrState qr_init(const DenseMatrix& y1, Index kbar) {
    if (y1.cols() != kbar)
        throw shape_mismatch("qr_init", y1.rows(), y1.cols(), kbar, kbar);
    if (y1.rows() < kbar)
        throw ShapeError("qr_init: first block has " + std::to_string(y1.rows()) +
                         " rows but the sketch width kbar=" + std::to_string(kbar) +
                         " requires at least kbar rows in the first slice");
    QrState state(kbar);
    state.absorb(y1);
    return state;
}

QrState qr_update(QrState state, const DenseMatrix& ys) {
    state.absorb(ys);
    return state;
}

DenseMatrix solve_rtranspose(const DenseMatrix& r, const DenseMatrix& a) {
    if (r.rows() != r.cols())
        throw shape_mismatch("solve_rtranspose", r.rows(), r.cols(), a.rows(), a.cols());
    const Index k = r.rows();
    Buffer<f64> tri(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i <= j; ++i)
            tri[static_cast<std::size_t>(j * k + i)] = static_cast<f64>(r(i, j));
    return solve_rtranspose_f64(tri.data(), k, a);
}

}  // namespace lsr
