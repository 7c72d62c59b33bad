#include "lsr/io/slice_file.hpp"

#include <cstring>
#include <fstream>

#include "lsr/error.hpp"
#include "lsr/io/crc32.hpp"

namespace lsr::io {

namespace {

constexpr char kMagic[4] = {'L', 'S', 'R', 'S'};
constexpr u32 kVersion = 1;

struct CrcWriter {
    std::ofstream& out;
    u32 crc = 0;
    u64 bytes = 0;

    void write(const void* data, std::size_t n) {
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        crc = crc32(data, n, crc);
        bytes += n;
    }
    template <typename T>
    void write_pod(T v) {
        write(&v, sizeof(T));
    }
};

struct CrcReader {
    std::ifstream& in;
    const std::filesystem::path& path;
    u32 crc = 0;
    u64 bytes = 0;

    void read(void* data, std::size_t n) {
        in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw StorageError("slice file truncated: " + path.string());
        crc = crc32(data, n, crc);
        bytes += n;
    }
    template <typename T>
    T read_pod() {
        T v;
        read(&v, sizeof(T));
        return v;
    }
};

}  // namespace

SliceFileInfo write_slice_file(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw StorageError("cannot open slice file for writing: " + path.string());

    SliceFileInfo info;
    info.kind = matrix_kind(m);
    info.rows = matrix_rows(m);
    info.cols = matrix_cols(m);

    CrcWriter w{out};
    w.write(kMagic, sizeof(kMagic));
    w.write_pod<u32>(kVersion);
    w.write_pod<u32>(static_cast<u32>(info.kind));
    w.write_pod<u64>(static_cast<u64>(info.rows));
    w.write_pod<u64>(static_cast<u64>(info.cols));

    if (const auto* d = std::get_if<DenseMatrix>(&m)) {
        info.nnz = static_cast<u64>(d->size());
        w.write_pod<u64>(info.nnz);
        w.write(d->data(), static_cast<std::size_t>(d->size()) * sizeof(f32));
    } else {
        const auto& s = std::get<SparseColMatrix>(m);
        info.nnz = static_cast<u64>(s.nnz());
        w.write_pod<u64>(info.nnz);
        w.write(s.col_ptr().data(), s.col_ptr().size() * sizeof(u64));
        w.write(s.row_idx().data(), s.row_idx().size() * sizeof(u64));
        w.write(s.values().data(), s.values().size() * sizeof(f32));
    }

    out.flush();
    if (!out)
        throw StorageError("write failure on slice file: " + path.string());
    info.checksum = w.crc;
    info.file_bytes = w.bytes;
    return info;
}

Matrix read_slice_file(const std::filesystem::path& path, SliceFileInfo* info,
                       bool validate_sparse) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw StorageError("slice file not found: " + path.string());

    CrcReader r{in, path};
    char magic[4];
    r.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw StorageError("bad magic in slice file: " + path.string());
    const u32 version = r.read_pod<u32>();
    if (version != kVersion)
        throw StorageError("unsupported slice file version " + std::to_string(version) +
                           ": " + path.string());
    const u32 kind_raw = r.read_pod<u32>();
    if (kind_raw > 1)
        throw StorageError("unknown storage kind in slice file: " + path.string());
    const auto kind = static_cast<StorageKind>(kind_raw);
    const auto rows = static_cast<Index>(r.read_pod<u64>());
    const auto cols = static_cast<Index>(r.read_pod<u64>());
    const u64 nnz = r.read_pod<u64>();

    Matrix m;
    if (kind == StorageKind::dense) {
        if (nnz != static_cast<u64>(rows) * static_cast<u64>(cols))
            throw StorageError("dense slice header inconsistent: " + path.string());
        Buffer<f32> data(static_cast<std::size_t>(nnz));
        r.read(data.data(), data.size() * sizeof(f32));
        m = DenseMatrix::from_column_major(rows, cols, std::move(data));
    } else {
        Buffer<u64> col_ptr(static_cast<std::size_t>(cols) + 1);
        Buffer<u64> row_idx(static_cast<std::size_t>(nnz));
        Buffer<f32> values(static_cast<std::size_t>(nnz));
        r.read(col_ptr.data(), col_ptr.size() * sizeof(u64));
        r.read(row_idx.data(), row_idx.size() * sizeof(u64));
        r.read(values.data(), values.size() * sizeof(f32));
        m = SparseColMatrix::from_parts(rows, cols, std::move(col_ptr),
                                        std::move(row_idx), std::move(values),
                                        validate_sparse);
    }

    if (info) {
        info->kind = kind;
        info->rows = rows;
        info->cols = cols;
        info->nnz = nnz;
        info->checksum = r.crc;
        info->file_bytes = r.bytes;
    }
    return m;
}

}  // namespace lsr::io
