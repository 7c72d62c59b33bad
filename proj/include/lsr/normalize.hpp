#pragma once

// Column standardization: subtract the column mean and divide by twice the
// column standard deviation. Two modes:
//
//   sparse: statistics over stored nonzeros of continuous columns only;
//           binary columns pass through untouched; the sparsity pattern is
//           preserved exactly.
//   dense:  statistics over all N entries of every column; output is dense.
//
// The sd estimator is the population one (divide by n); constant columns
// (sd = 0, or no data in sparse mode) transform to 0 instead of dividing
// by zero.

#include <filesystem>
#include <span>
#include <vector>

#include "lsr/slice_store.hpp"

namespace lsr {

enum class NormMode : u32 { none = 0, dense = 1, sparse = 2 };
enum class ColumnKind : u32 { continuous = 0, binary = 1 };

const char* norm_mode_name(NormMode mode);
NormMode norm_mode_from_name(const std::string& name);

struct NormStats {
    NormMode mode = NormMode::none;
    std::vector<f64> mean;            // length P
    std::vector<f64> sd;              // length P, population estimator
    std::vector<ColumnKind> column_kind;  // length P

    Index cols() const { return static_cast<Index>(mean.size()); }
    bool constant(Index j) const { return sd[static_cast<std::size_t>(j)] == 0.0; }
};

// Single streaming pass over the store.
NormStats fit_norm(const SliceStore& store, NormMode mode,
                   std::span<const ColumnKind> column_kinds);
NormStats fit_norm(const Matrix& x, NormMode mode,
                   std::span<const ColumnKind> column_kinds);

// Convenience: every column continuous.
NormStats fit_norm(const SliceStore& store, NormMode mode);
NormStats fit_norm(const Matrix& x, NormMode mode);

// Writes the transformed data as a new store under out_dir. Sparse mode on
// a sparse store keeps the store sparse; dense mode always yields a dense
// store.
SliceStore apply_norm(const SliceStore& store, const NormStats& stats,
                      const std::filesystem::path& out_dir);

// In-core transforms. Sparse-mode dense input treats exact zeros as "not
// stored" to match the streaming semantics.
DenseMatrix apply_norm(const DenseMatrix& x, const NormStats& stats);
SparseColMatrix apply_norm(const SparseColMatrix& x, const NormStats& stats);
Matrix apply_norm(const Matrix& x, const NormStats& stats);

// A column counts as binary when every stored value is 0 or 1 (and it has
// at least one stored value). Streaming pass.
std::vector<ColumnKind> detect_column_kinds(const SliceStore& store);
std::vector<ColumnKind> detect_column_kinds(const Matrix& x);

// JSON sidecar, conventionally norm.json next to the store it was fit on.
void save_norm(const NormStats& stats, const std::filesystem::path& path);
NormStats load_norm(const std::filesystem::path& path);

}  // namespace lsr
