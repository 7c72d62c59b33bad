#include "lsr/matmul.hpp"

#include <algorithm>

#include "lsr/kernels.hpp"

namespace lsr {

namespace {

void check_inner(const char* op, Index a_rows, Index a_cols, Index b_rows,
                 Index b_cols, Index inner_a, Index inner_b) {
    if (inner_a != inner_b)
        throw shape_mismatch(op, a_rows, a_cols, b_rows, b_cols);
}

void narrow_column(f32* dst, const f64* src, Index n) {
    for (Index i = 0; i < n; ++i) dst[i] = static_cast<f32>(src[i]);
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("matmul", a.rows(), a.cols(), b.rows(), b.cols(), a.cols(), b.rows());
    DenseMatrix c(a.rows(), b.cols());
    Buffer<f64> acc(static_cast<std::size_t>(a.rows()));
    for (Index j = 0; j < b.cols(); ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const f32* bj = b.col(j);
        for (Index k = 0; k < a.cols(); ++k)
            kernels::axpy_acc(acc.data(), bj[k], a.col(k), static_cast<std::size_t>(a.rows()));
        narrow_column(c.col(j), acc.data(), a.rows());
    }
    return c;
}

DenseMatrix matmul(const SparseColMatrix& a, const DenseMatrix& b) {
    check_inner("matmul", a.rows(), a.cols(), b.rows(), b.cols(), a.cols(), b.rows());
    DenseMatrix c(a.rows(), b.cols());
    Buffer<f64> acc(static_cast<std::size_t>(a.rows()));
    for (Index j = 0; j < b.cols(); ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const f32* bj = b.col(j);
        for (Index p = 0; p < a.cols(); ++p) {
            const auto rows = a.col_rows(p);
            if (rows.empty()) continue;
            kernels::spaxpy_acc(acc.data(), bj[p], rows.data(), a.col_vals(p).data(),
                                rows.size());
        }
        narrow_column(c.col(j), acc.data(), a.rows());
    }
    return c;
}

DenseMatrix matmul(const DenseMatrix& a, const SparseColMatrix& b) {
    check_inner("matmul", a.rows(), a.cols(), b.rows(), b.cols(), a.cols(), b.rows());
    DenseMatrix c(a.rows(), b.cols());
    Buffer<f64> acc(static_cast<std::size_t>(a.rows()));
    for (Index j = 0; j < b.cols(); ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const auto rows = b.col_rows(j);
        const auto vals = b.col_vals(j);
        for (std::size_t t = 0; t < rows.size(); ++t)
            kernels::axpy_acc(acc.data(), vals[t], a.col(static_cast<Index>(rows[t])),
                              static_cast<std::size_t>(a.rows()));
        narrow_column(c.col(j), acc.data(), a.rows());
    }
    return c;
}

DenseMatrix matmul(const Matrix& a, const DenseMatrix& b) {
    if (const auto* d = std::get_if<DenseMatrix>(&a)) return matmul(*d, b);
    return matmul(std::get<SparseColMatrix>(a), b);
}

DenseMatrix transpose_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("transpose_matmul", a.rows(), a.cols(), b.rows(), b.cols(), a.rows(), b.rows());
    DenseMatrix c(a.cols(), b.cols());
    const auto n = static_cast<std::size_t>(a.rows());
    for (Index j = 0; j < b.cols(); ++j) {
        f32* cj = c.col(j);
        const f32* bj = b.col(j);
        for (Index i = 0; i < a.cols(); ++i)
            cj[i] = static_cast<f32>(kernels::dot_f32(a.col(i), bj, n));
    }
    return c;
}

DenseMatrix transpose_matmul(const DenseMatrix& a, const SparseColMatrix& b) {
    check_inner("transpose_matmul", a.rows(), a.cols(), b.rows(), b.cols(), a.rows(), b.rows());
    DenseMatrix c(a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        f32* cj = c.col(j);
        const auto rows = b.col_rows(j);
        const auto vals = b.col_vals(j);
        for (Index i = 0; i < a.cols(); ++i)
            cj[i] = static_cast<f32>(
                kernels::spdot_f32(a.col(i), rows.data(), vals.data(), rows.size()));
    }
    return c;
}

DenseMatrix transpose_matmul(const SparseColMatrix& a, const DenseMatrix& b) {
    check_inner("transpose_matmul", a.rows(), a.cols(), b.rows(), b.cols(), a.rows(), b.rows());
    DenseMatrix c(a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        f32* cj = c.col(j);
        const f32* bj = b.col(j);
        for (Index i = 0; i < a.cols(); ++i) {
            const auto rows = a.col_rows(i);
            cj[i] = static_cast<f32>(
                kernels::spdot_f32(bj, rows.data(), a.col_vals(i).data(), rows.size()));
        }
    }
    return c;
}

DenseMatrix transpose_matmul(const DenseMatrix& a, const Matrix& b) {
    if (const auto* d = std::get_if<DenseMatrix>(&b)) return transpose_matmul(a, *d);
    return transpose_matmul(a, std::get<SparseColMatrix>(b));
}

void transpose_matmul_acc(DenseMatrix& acc, const DenseMatrix& a,
                          const DenseMatrix& b) {
    check_inner("transpose_matmul_acc", a.rows(), a.cols(), b.rows(), b.cols(), a.rows(), b.rows());
    if (acc.rows() != a.cols() || acc.cols() != b.cols())
        throw shape_mismatch("transpose_matmul_acc", acc.rows(), acc.cols(), a.cols(), b.cols());
    const auto n = static_cast<std::size_t>(a.rows());
    for (Index j = 0; j < b.cols(); ++j) {
        f32* cj = acc.col(j);
        const f32* bj = b.col(j);
        for (Index i = 0; i < a.cols(); ++i)
            cj[i] += static_cast<f32>(kernels::dot_f32(a.col(i), bj, n));
    }
}

void transpose_matmul_acc(DenseMatrix& acc, const DenseMatrix& a,
                          const SparseColMatrix& b) {
    check_inner("transpose_matmul_acc", a.rows(), a.cols(), b.rows(), b.cols(), a.rows(), b.rows());
    if (acc.rows() != a.cols() || acc.cols() != b.cols())
        throw shape_mismatch("transpose_matmul_acc", acc.rows(), acc.cols(), a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        f32* cj = acc.col(j);
        const auto rows = b.col_rows(j);
        const auto vals = b.col_vals(j);
        for (Index i = 0; i < a.cols(); ++i)
            cj[i] += static_cast<f32>(
                kernels::spdot_f32(a.col(i), rows.data(), vals.data(), rows.size()));
    }
}

void transpose_matmul_acc(DenseMatrix& acc, const DenseMatrix& a, const Matrix& b) {
    if (const auto* d = std::get_if<DenseMatrix>(&b)) {
        transpose_matmul_acc(acc, a, *d);
        return;
    }
    transpose_matmul_acc(acc, a, std::get<SparseColMatrix>(b));
}

}  // namespace lsr
