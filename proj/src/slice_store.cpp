#include "lsr/slice_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "lsr/error.hpp"
#include "lsr/io/slice_file.hpp"

namespace lsr {

namespace {

std::string slice_filename(Index s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "slice_%04lld.bin", static_cast<long long>(s));
    return buf;
}

}  // namespace

SliceStore SliceStore::create(const std::filesystem::path& dir, Index cols,
                              StorageKind kind) {
    if (cols < 0) throw ShapeError("SliceStore::create: negative column count");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw StorageError("cannot create store directory " + dir.string() + ": " +
                           ec.message());
    // Wipe any previous store so a rerun is byte-identical, never a mix.
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name == "manifest.json" || name == "norm.json" ||
            (name.starts_with("slice_") && name.ends_with(".bin")))
            std::filesystem::remove(entry.path());
    }
    SliceStore store;
    store.dir_ = dir;
    store.cols_ = cols;
    store.kind_ = kind;
    return store;
}

void SliceStore::append(const Matrix& slice) {
    if (finalized_) throw StorageError("SliceStore::append on a finalized store");
    if (matrix_cols(slice) != cols_)
        throw shape_mismatch("SliceStore::append", matrix_rows(slice), matrix_cols(slice),
                             n_total_, cols_);
    if (matrix_kind(slice) != kind_)
        throw StorageError("SliceStore::append: slice storage kind differs from the store's");

    const Index s = slice_count();
    const auto info = io::write_slice_file(dir_ / slice_filename(s), slice);
    slice_rows_.push_back(info.rows);
    slice_nnz_.push_back(info.nnz);
    checksums_.push_back(info.checksum);
    slice_bytes_.push_back(info.file_bytes);
    read_counts_.push_back(0);
    n_total_ += info.rows;
}

void SliceStore::finalize() {
    if (finalized_) return;
    nlohmann::json manifest;
    manifest["format"] = "slice-store";
    manifest["version"] = 1;
    manifest["kind"] = storage_kind_name(kind_);
    manifest["cols"] = cols_;
    manifest["n_total"] = n_total_;
    auto slices = nlohmann::json::array();
    for (Index s = 0; s < slice_count(); ++s) {
        slices.push_back({{"file", slice_filename(s)},
                          {"rows", slice_rows_[static_cast<std::size_t>(s)]},
                          {"nnz", slice_nnz_[static_cast<std::size_t>(s)]},
                          {"bytes", slice_bytes_[static_cast<std::size_t>(s)]},
                          {"checksum", checksums_[static_cast<std::size_t>(s)]}});
    }
    manifest["slices"] = std::move(slices);

    const auto path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write manifest: " + path.string());
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw StorageError("write failure on manifest: " + path.string());
    finalized_ = true;
}

SliceStore SliceStore::open(const std::filesystem::path& dir) {
    const auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw StorageError("store manifest not found: " + path.string());

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("malformed manifest " + path.string() + ": " + e.what());
    }

    SliceStore store;
    store.dir_ = dir;
    store.finalized_ = true;
    try {
        if (manifest.at("format") != "slice-store")
            throw StorageError("not a slice store: " + path.string());
        if (manifest.at("version") != 1)
            throw StorageError("unsupported store version in " + path.string());
        const std::string kind = manifest.at("kind");
        if (kind == "dense")
            store.kind_ = StorageKind::dense;
        else if (kind == "sparse")
            store.kind_ = StorageKind::sparse;
        else
            throw StorageError("unknown storage kind '" + kind + "' in " + path.string());
        store.cols_ = manifest.at("cols");
        for (const auto& slice : manifest.at("slices")) {
            store.slice_rows_.push_back(slice.at("rows"));
            store.slice_nnz_.push_back(slice.at("nnz"));
            store.slice_bytes_.push_back(slice.at("bytes"));
            store.checksums_.push_back(slice.at("checksum"));
            store.read_counts_.push_back(0);
            store.n_total_ += store.slice_rows_.back();
        }
        if (manifest.at("n_total") != store.n_total_)
            throw StorageError("manifest n_total disagrees with slice row counts: " +
                               path.string());
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("malformed manifest " + path.string() + ": " + e.what());
    }
    return store;
}

void SliceStore::check_slice_index(Index s) const {
    if (s < 0 || s >= slice_count())
        throw StorageError("slice index " + std::to_string(s) + " outside store of " +
                           std::to_string(slice_count()) + " slices");
}

Matrix SliceStore::read_slice(Index s) const {
    check_slice_index(s);
    const auto file = dir_ / slice_filename(s);
    if (!std::filesystem::exists(file))
        throw StorageError("slice file not found: " + file.string());

    io::SliceFileInfo info;
    Matrix m;
    try {
        m = io::read_slice_file(file, &info, /*validate_sparse=*/false);
    } catch (const StorageError& e) {
        throw CorruptSliceError(std::string(e.what()) + " (slice " + std::to_string(s) + ")",
                                s);
    }
    const auto idx = static_cast<std::size_t>(s);
    if (info.checksum != checksums_[idx])
        throw CorruptSliceError("checksum mismatch on slice " + std::to_string(s) + " of " +
                                    dir_.string(),
                                s);
    if (info.rows != slice_rows_[idx] || info.cols != cols_ || info.nnz != slice_nnz_[idx] ||
        info.kind != kind_)
        throw CorruptSliceError("slice " + std::to_string(s) + " header disagrees with manifest",
                                s);
    if (const auto* sp = std::get_if<SparseColMatrix>(&m)) {
        try {
            sp->validate();
        } catch (const ShapeError& e) {
            throw CorruptSliceError(std::string(e.what()) + " (slice " + std::to_string(s) + ")",
                                    s);
        }
    }
    ++read_counts_[idx];
    bytes_read_ += info.file_bytes;
    return m;
}

u64 SliceStore::max_slice_bytes() const {
    u64 best = 0;
    for (const u64 b : slice_bytes_) best = std::max(best, b);
    return best;
}

void SliceStore::reset_read_counts() const {
    std::fill(read_counts_.begin(), read_counts_.end(), u64{0});
    bytes_read_ = 0;
}

SliceStore partition(const Matrix& x, Index max_rows_per_slice,
                     const std::filesystem::path& dir) {
    if (max_rows_per_slice < 1)
        throw ShapeError("partition: max_rows_per_slice must be at least 1");
    const Index n = matrix_rows(x);
    const Index p = matrix_cols(x);
    SliceStore store = SliceStore::create(dir, p, matrix_kind(x));

    if (const auto* d = std::get_if<DenseMatrix>(&x)) {
        for (Index start = 0; start < n; start += max_rows_per_slice) {
            const Index rows = std::min(max_rows_per_slice, n - start);
            DenseMatrix block(rows, p);
            for (Index j = 0; j < p; ++j) {
                const f32* src = d->col(j) + start;
                f32* dst = block.col(j);
                std::copy(src, src + rows, dst);
            }
            store.append(block);
        }
    } else {
        const auto& sp = std::get<SparseColMatrix>(x);
        for (Index start = 0; start < n; start += max_rows_per_slice) {
            const Index rows = std::min(max_rows_per_slice, n - start);
            std::vector<Triplet> triplets;
            for (Index j = 0; j < p; ++j) {
                const auto col_rows = sp.col_rows(j);
                const auto col_vals = sp.col_vals(j);
                const auto begin = std::lower_bound(col_rows.begin(), col_rows.end(),
                                                    static_cast<u64>(start));
                const auto end = std::lower_bound(col_rows.begin(), col_rows.end(),
                                                  static_cast<u64>(start + rows));
                for (auto it = begin; it != end; ++it) {
                    const auto t = static_cast<std::size_t>(it - col_rows.begin());
                    triplets.push_back({*it - static_cast<u64>(start), static_cast<u64>(j),
                                        col_vals[t]});
                }
            }
            store.append(SparseColMatrix::from_triplets(rows, p, triplets));
        }
    }
    store.finalize();
    return store;
}

Matrix concat_store(const SliceStore& store) {
    const Index n = store.n_total();
    const Index p = store.cols();
    if (store.kind() == StorageKind::dense) {
        DenseMatrix full(n, p);
        Index offset = 0;
        SliceStream stream(store);
        Index s;
        Matrix m;
        while (stream.next(s, m)) {
            const auto& d = std::get<DenseMatrix>(m);
            for (Index j = 0; j < p; ++j) {
                const f32* src = d.col(j);
                std::copy(src, src + d.rows(), full.col(j) + offset);
            }
            offset += d.rows();
        }
        return full;
    }
    std::vector<Triplet> triplets;
    Index offset = 0;
    SliceStream stream(store);
    Index s;
    Matrix m;
    while (stream.next(s, m)) {
        const auto& sp = std::get<SparseColMatrix>(m);
        for (Index j = 0; j < p; ++j) {
            const auto rows = sp.col_rows(j);
            const auto vals = sp.col_vals(j);
            for (std::size_t t = 0; t < rows.size(); ++t)
                triplets.push_back({rows[t] + static_cast<u64>(offset), static_cast<u64>(j),
                                    vals[t]});
        }
        offset += sp.rows();
    }
    return SparseColMatrix::from_triplets(n, p, triplets);
}

Matrix gather_rows(const SliceStore& store, std::span<const Index> rows) {
    const Index n = store.n_total();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= n)
            throw ShapeError("gather_rows: row index out of range");
        if (i > 0 && rows[i] <= rows[i - 1])
            throw ShapeError("gather_rows: row indices must be strictly increasing");
    }

    const Index p = store.cols();
    const auto n_sel = static_cast<Index>(rows.size());
    std::size_t cursor = 0;
    Index offset = 0;

    if (store.kind() == StorageKind::dense) {
        DenseMatrix out(n_sel, p);
        for (Index s = 0; s < store.slice_count(); ++s) {
            const Index slice_rows = store.slice_row_counts()[static_cast<std::size_t>(s)];
            const std::size_t first = cursor;
            while (cursor < rows.size() && rows[cursor] < offset + slice_rows) ++cursor;
            if (cursor > first) {
                const Matrix m = store.read_slice(s);
                const auto& d = std::get<DenseMatrix>(m);
                for (std::size_t i = first; i < cursor; ++i) {
                    const Index local = rows[i] - offset;
                    for (Index j = 0; j < p; ++j)
                        out(static_cast<Index>(i), j) = d(local, j);
                }
            }
            offset += slice_rows;
        }
        return out;
    }

    std::vector<Triplet> triplets;
    for (Index s = 0; s < store.slice_count(); ++s) {
        const Index slice_rows = store.slice_row_counts()[static_cast<std::size_t>(s)];
        const std::size_t first = cursor;
        while (cursor < rows.size() && rows[cursor] < offset + slice_rows) ++cursor;
        if (cursor > first) {
            std::vector<Index> local_to_out(static_cast<std::size_t>(slice_rows), -1);
            for (std::size_t i = first; i < cursor; ++i)
                local_to_out[static_cast<std::size_t>(rows[i] - offset)] = static_cast<Index>(i);
            const Matrix m = store.read_slice(s);
            const auto& sp = std::get<SparseColMatrix>(m);
            for (Index j = 0; j < p; ++j) {
                const auto col_rows = sp.col_rows(j);
                const auto col_vals = sp.col_vals(j);
                for (std::size_t t = 0; t < col_rows.size(); ++t) {
                    const Index out_row = local_to_out[col_rows[t]];
                    if (out_row >= 0)
                        triplets.push_back({static_cast<u64>(out_row), static_cast<u64>(j),
                                            col_vals[t]});
                }
            }
        }
        offset += slice_rows;
    }
    return SparseColMatrix::from_triplets(n_sel, p, triplets);
}

}  // namespace lsr
