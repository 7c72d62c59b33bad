#pragma once

// Matrix products over dense/sparse operand combinations. All variants
// accumulate in f64 and narrow once per output entry; sparse operands are
// traversed by stored nonzeros so cost scales with nnz, never rows*cols.
// Results are always dense. Sparse-times-sparse is out of scope.

#include "lsr/matrix.hpp"

namespace lsr {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const SparseColMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const SparseColMatrix& b);
DenseMatrix matmul(const Matrix& a, const DenseMatrix& b);

// aT * b without materializing the transpose.
DenseMatrix transpose_matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose_matmul(const DenseMatrix& a, const SparseColMatrix& b);
DenseMatrix transpose_matmul(const SparseColMatrix& a, const DenseMatrix& b);
DenseMatrix transpose_matmul(const DenseMatrix& a, const Matrix& b);

// acc += aT * b, the streaming accumulator update. acc stays f32; each
// contribution is a full f64 dot product.
void transpose_matmul_acc(DenseMatrix& acc, const DenseMatrix& a,
                          const DenseMatrix& b);
void transpose_matmul_acc(DenseMatrix& acc, const DenseMatrix& a,
                          const SparseColMatrix& b);
void transpose_matmul_acc(DenseMatrix& acc, const DenseMatrix& a,
                          const Matrix& b);

}  // namespace lsr
