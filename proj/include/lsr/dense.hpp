#pragma once

// Column-major dense matrix of f32. This is the workhorse container: sketch
// outputs, QR factors, accumulators, and projected data all live here.
// Payload memory is tracked (see memtrack.hpp) so peak-usage contracts can
// be asserted in tests.

#include <cmath>
#include <utility>

#include "lsr/error.hpp"
#include "lsr/memtrack.hpp"
#include "lsr/types.hpp"

namespace lsr {

class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(Index rows, Index cols)
        : rows_(rows), cols_(cols), data_(check_extent(rows, cols), 0.0f) {}

    static DenseMatrix from_column_major(Index rows, Index cols,
                                         Buffer<f32> data) {
        if (static_cast<Index>(data.size()) != rows * cols)
            throw ShapeError("from_column_major: data length does not equal rows * cols");
        DenseMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.data_ = std::move(data);
        return m;
    }

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index size() const { return rows_ * cols_; }

    f32& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(j * rows_ + i)]; }
    f32 operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(j * rows_ + i)]; }

    f32& at(Index i, Index j) {
        check_index(i, j);
        return (*this)(i, j);
    }
    f32 at(Index i, Index j) const {
        check_index(i, j);
        return (*this)(i, j);
    }

    f32* col(Index j) { return data_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(rows_); }
    const f32* col(Index j) const { return data_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(rows_); }

    f32* data() { return data_.data(); }
    const f32* data() const { return data_.data(); }

    bool all_finite() const {
        for (const f32 v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    static std::size_t check_extent(Index rows, Index cols) {
        if (rows < 0 || cols < 0)
            throw ShapeError("DenseMatrix: negative extent");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    void check_index(Index i, Index j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
            throw ShapeError("DenseMatrix::at: index out of range");
    }

    Index rows_ = 0;
    Index cols_ = 0;
    Buffer<f32> data_;
};

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
    return t;
}

// Stacks a on top of b. Used by tests and by the coupled QR update.
inline DenseMatrix concat_rows(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols())
        throw shape_mismatch("concat_rows", a.rows(), a.cols(), b.rows(), b.cols());
    DenseMatrix out(a.rows() + b.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        f32* dst = out.col(j);
        const f32* top = a.col(j);
        for (Index i = 0; i < a.rows(); ++i) dst[i] = top[i];
        const f32* bot = b.col(j);
        for (Index i = 0; i < b.rows(); ++i) dst[a.rows() + i] = bot[i];
    }
    return out;
}

}  // namespace lsr
