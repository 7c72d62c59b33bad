#pragma once

// Minimal numeric CSV import for small dense matrices and label vectors.
// No quoting or escaping: fields are plain numbers separated by commas.

#include <filesystem>
#include <vector>

#include "lsr/dense.hpp"

namespace lsr::io {

DenseMatrix read_dense_csv(const std::filesystem::path& path);

// One integer class id per line.
std::vector<Index> read_labels(const std::filesystem::path& path);

void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& m);

}  // namespace lsr::io
