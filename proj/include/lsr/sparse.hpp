#pragma once

// Compressed sparse column matrix with f32 values and u64 row indices.
// Construction always canonicalizes: per-column row indices sorted and
// unique (duplicate triplets are summed), explicit zeros dropped.

#include <span>

#include "lsr/dense.hpp"
#include "lsr/error.hpp"
#include "lsr/memtrack.hpp"
#include "lsr/types.hpp"

namespace lsr {

struct Triplet {
    u64 row;
    u64 col;
    f32 value;
};

class SparseColMatrix {
public:
    SparseColMatrix() : col_ptr_(1, 0) {}

    SparseColMatrix(Index rows, Index cols)
        : rows_(rows), cols_(cols), col_ptr_(static_cast<std::size_t>(cols) + 1, 0) {
        if (rows < 0 || cols < 0)
            throw ShapeError("SparseColMatrix: negative extent");
    }

    // Canonicalizing constructor: sorts, merges duplicates, drops zeros.
    static SparseColMatrix from_triplets(Index rows, Index cols,
                                         std::span<const Triplet> triplets);

    // Adopts pre-built CSC arrays. Validates the structural invariants
    // (monotone col_ptr, strictly increasing in-range row indices) unless
    // the caller vouches for them.
    static SparseColMatrix from_parts(Index rows, Index cols, Buffer<u64> col_ptr,
                                      Buffer<u64> row_idx, Buffer<f32> values,
                                      bool validate = true);

    // Checks the structural invariants, throwing ShapeError on the first
    // violation. Stored zeros are tolerated here: pattern-preserving value
    // transforms may produce them legitimately.
    void validate() const;

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index nnz() const { return static_cast<Index>(row_idx_.size()); }

    std::span<const u64> col_rows(Index j) const {
        return {row_idx_.data() + col_ptr_[static_cast<std::size_t>(j)],
                row_idx_.data() + col_ptr_[static_cast<std::size_t>(j) + 1]};
    }
    std::span<const f32> col_vals(Index j) const {
        return {values_.data() + col_ptr_[static_cast<std::size_t>(j)],
                values_.data() + col_ptr_[static_cast<std::size_t>(j) + 1]};
    }
    // Mutable view for in-place value transforms that keep the pattern.
    std::span<f32> col_vals_mut(Index j) {
        return {values_.data() + col_ptr_[static_cast<std::size_t>(j)],
                values_.data() + col_ptr_[static_cast<std::size_t>(j) + 1]};
    }

    const Buffer<u64>& col_ptr() const { return col_ptr_; }
    const Buffer<u64>& row_idx() const { return row_idx_; }
    const Buffer<f32>& values() const { return values_; }

    DenseMatrix to_dense() const;

    bool all_finite() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    Buffer<u64> col_ptr_;
    Buffer<u64> row_idx_;
    Buffer<f32> values_;
};

}  // namespace lsr
