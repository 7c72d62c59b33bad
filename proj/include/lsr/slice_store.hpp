#pragma once

// On-disk store of a matrix partitioned into horizontal slices. Directory
// layout: manifest.json plus slice_0000.bin, slice_0001.bin, ... in the
// format of io/slice_file.hpp. The manifest carries per-slice shapes and
// checksums; every read verifies its checksum and is counted, which is what
// lets tests assert the single-pass property of the streaming algorithms.

#include <filesystem>
#include <span>
#include <vector>

#include "lsr/matrix.hpp"

namespace lsr {

class SliceStore {
public:
    SliceStore() = default;

    // Writer flow: create -> append... -> finalize. `create` wipes any
    // previous store in the directory so reruns produce identical output.
    static SliceStore create(const std::filesystem::path& dir, Index cols,
                             StorageKind kind);
    void append(const Matrix& slice);
    void finalize();

    static SliceStore open(const std::filesystem::path& dir);

    Index n_total() const { return n_total_; }
    Index cols() const { return cols_; }
    StorageKind kind() const { return kind_; }
    Index slice_count() const { return static_cast<Index>(slice_rows_.size()); }
    const std::vector<Index>& slice_row_counts() const { return slice_rows_; }
    bool finalized() const { return finalized_; }
    const std::filesystem::path& dir() const { return dir_; }

    // Verifies the slice checksum against the manifest and bumps the
    // per-slice read counter.
    Matrix read_slice(Index s) const;

    u64 slice_bytes(Index s) const { return slice_bytes_.at(static_cast<std::size_t>(s)); }
    u64 max_slice_bytes() const;

    const std::vector<u64>& read_counts() const { return read_counts_; }
    void reset_read_counts() const;
    u64 payload_bytes_read() const { return bytes_read_; }

private:
    void check_slice_index(Index s) const;

    std::filesystem::path dir_;
    Index cols_ = 0;
    Index n_total_ = 0;
    StorageKind kind_ = StorageKind::dense;
    bool finalized_ = false;
    std::vector<Index> slice_rows_;
    std::vector<u64> slice_nnz_;
    std::vector<u32> checksums_;
    std::vector<u64> slice_bytes_;
    mutable std::vector<u64> read_counts_;
    mutable u64 bytes_read_ = 0;
};

// Ordered single-consumer pass over all slices.
class SliceStream {
public:
    explicit SliceStream(const SliceStore& store) : store_(&store) {}

    // Yields the next (slice_index, matrix) pair; false when exhausted.
    bool next(Index& index, Matrix& out) {
        if (pos_ >= store_->slice_count()) return false;
        index = pos_;
        out = store_->read_slice(pos_);
        ++pos_;
        return true;
    }

private:
    const SliceStore* store_;
    Index pos_ = 0;
};

// Splits x into ceil(rows / max_rows_per_slice) slices written under dir.
SliceStore partition(const Matrix& x, Index max_rows_per_slice,
                     const std::filesystem::path& dir);

// Reads back the full matrix by concatenating all slices. Intended for
// desk-scale data and tests; defeats the point of the store otherwise.
Matrix concat_store(const SliceStore& store);

// Extracts the given rows (strictly increasing global indices) into an
// in-core matrix of the store's storage kind, in the order given.
Matrix gather_rows(const SliceStore& store, std::span<const Index> rows);

}  // namespace lsr
