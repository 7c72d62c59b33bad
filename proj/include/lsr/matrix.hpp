#pragma once

// Tagged union over the two storage layouts. Slices read back from disk
// carry whichever representation the store holds; algorithm code that is
// layout-agnostic takes a Matrix, layout-specific code overloads on the
// concrete types.

#include <variant>

#include "lsr/dense.hpp"
#include "lsr/sparse.hpp"

namespace lsr {

using Matrix = std::variant<DenseMatrix, SparseColMatrix>;

inline Index matrix_rows(const Matrix& m) {
    return std::visit([](const auto& x) { return x.rows(); }, m);
}

inline Index matrix_cols(const Matrix& m) {
    return std::visit([](const auto& x) { return x.cols(); }, m);
}

inline StorageKind matrix_kind(const Matrix& m) {
    return std::holds_alternative<DenseMatrix>(m) ? StorageKind::dense
                                                  : StorageKind::sparse;
}

inline DenseMatrix densify(const Matrix& m) {
    if (const auto* d = std::get_if<DenseMatrix>(&m)) return *d;
    return std::get<SparseColMatrix>(m).to_dense();
}

}  // namespace lsr
