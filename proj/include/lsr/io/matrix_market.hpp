#pragma once

// Matrix Market reader/writer. Accepts coordinate and array formats, the
// real/integer/pattern fields, and general/symmetric storage. Coordinate
// files load as sparse, array files as dense. All parse failures carry the
// offending 1-based line number.

#include <filesystem>

#include "lsr/matrix.hpp"

namespace lsr::io {

Matrix read_matrix_market(const std::filesystem::path& path);

// Sparse matrices are written as coordinate/real/general, dense as
// array/real/general.
void write_matrix_market(const std::filesystem::path& path, const Matrix& m);

}  // namespace lsr::io
