#pragma once

// Self-describing binary container for one matrix slice.
//
// Layout (little-endian, which is the only byte order this code targets):
//   bytes 0..3   magic "LSRS"
//   u32          format version (currently 1)
//   u32          storage kind (0 dense, 1 sparse)
//   u64          rows
//   u64          cols
//   u64          nnz (rows*cols for dense)
//   payload      dense:  rows*cols f32, column-major
//                sparse: (cols+1) u64 col_ptr, nnz u64 row indices, nnz f32 values
//
// The CRC-32 of the full byte stream is returned to the caller instead of
// being stored in the file; the slice-store manifest holds it so a happy
// truncation cannot also truncate the checksum.

#include <filesystem>

#include "lsr/matrix.hpp"

namespace lsr::io {

struct SliceFileInfo {
    StorageKind kind = StorageKind::dense;
    Index rows = 0;
    Index cols = 0;
    u64 nnz = 0;
    u32 checksum = 0;
    u64 file_bytes = 0;
};

SliceFileInfo write_slice_file(const std::filesystem::path& path, const Matrix& m);

// Reads and returns the slice. `info`, when given, receives the header
// fields plus the checksum of the bytes actually read; verifying it against
// a trusted manifest is the caller's job. Callers that verify a checksum
// afterwards pass validate_sparse = false so corruption surfaces as a
// checksum mismatch instead of a canonical-form failure.
Matrix read_slice_file(const std::filesystem::path& path, SliceFileInfo* info = nullptr,
                       bool validate_sparse = true);

}  // namespace lsr::io
