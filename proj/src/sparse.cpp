#include "lsr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lsr {

SparseColMatrix SparseColMatrix::from_triplets(Index rows, Index cols,
                                               std::span<const Triplet> triplets) {
    SparseColMatrix m(rows, cols);
    for (const Triplet& t : triplets) {
        if (t.row >= static_cast<u64>(rows) || t.col >= static_cast<u64>(cols))
            throw ShapeError("from_triplets: entry outside matrix extent");
    }

    std::vector<std::size_t> order(triplets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (triplets[a].col != triplets[b].col) return triplets[a].col < triplets[b].col;
        return triplets[a].row < triplets[b].row;
    });

    m.row_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t i = 0;
    for (Index j = 0; j < cols; ++j) {
        while (i < order.size() && triplets[order[i]].col == static_cast<u64>(j)) {
            const u64 row = triplets[order[i]].row;
            f64 v = 0.0;
            // Duplicate coordinates are summed before the zero test, so a
            // pair that cancels exactly leaves no stored entry.
            while (i < order.size() && triplets[order[i]].col == static_cast<u64>(j) &&
                   triplets[order[i]].row == row) {
                v += static_cast<f64>(triplets[order[i]].value);
                ++i;
            }
            const f32 narrowed = static_cast<f32>(v);
            if (narrowed != 0.0f) {
                m.row_idx_.push_back(row);
                m.values_.push_back(narrowed);
            }
        }
        m.col_ptr_[static_cast<std::size_t>(j) + 1] = m.row_idx_.size();
    }
    return m;
}

SparseColMatrix SparseColMatrix::from_parts(Index rows, Index cols,
                                            Buffer<u64> col_ptr, Buffer<u64> row_idx,
                                            Buffer<f32> values, bool validate) {
    SparseColMatrix m(rows, cols);
    if (col_ptr.size() != static_cast<std::size_t>(cols) + 1)
        throw ShapeError("from_parts: col_ptr length must be cols + 1");
    if (row_idx.size() != values.size())
        throw ShapeError("from_parts: row index and value arrays differ in length");
    if (col_ptr.back() != row_idx.size())
        throw ShapeError("from_parts: col_ptr endpoints do not bracket nnz");
    m.col_ptr_ = std::move(col_ptr);
    m.row_idx_ = std::move(row_idx);
    m.values_ = std::move(values);
    if (validate) m.validate();
    return m;
}

// Structural canonical form only: pattern-preserving value transforms
// (column normalization) may leave a stored value at exactly 0, and such
// matrices must still round-trip through slice files. Zero dropping is the
// job of the canonicalizing constructors, not of this check.
void SparseColMatrix::validate() const {
    if (col_ptr_.size() != static_cast<std::size_t>(cols_) + 1 || col_ptr_.front() != 0 ||
        col_ptr_.back() != row_idx_.size())
        throw ShapeError("sparse matrix: col_ptr endpoints do not bracket nnz");
    for (Index j = 0; j < cols_; ++j) {
        const u64 begin = col_ptr_[static_cast<std::size_t>(j)];
        const u64 end = col_ptr_[static_cast<std::size_t>(j) + 1];
        if (end < begin) throw ShapeError("sparse matrix: col_ptr not nondecreasing");
        for (u64 t = begin; t < end; ++t) {
            if (row_idx_[t] >= static_cast<u64>(rows_))
                throw ShapeError("sparse matrix: row index out of range");
            if (t > begin && row_idx_[t] <= row_idx_[t - 1])
                throw ShapeError("sparse matrix: row indices not strictly increasing within a column");
        }
    }
}

DenseMatrix SparseColMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (Index j = 0; j < cols_; ++j) {
        f32* dst = d.col(j);
        const auto rows = col_rows(j);
        const auto vals = col_vals(j);
        for (std::size_t t = 0; t < rows.size(); ++t)
            dst[rows[t]] = vals[t];
    }
    return d;
}

bool SparseColMatrix::all_finite() const {
    for (const f32 v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace lsr
