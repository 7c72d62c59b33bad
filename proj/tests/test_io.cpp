#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "lsr/io/crc32.hpp"
#include "lsr/io/csv.hpp"
#include "lsr/io/matrix_market.hpp"
#include "lsr/io/slice_file.hpp"
#include "lsr/slice_store.hpp"

using namespace lsr;
using namespace tst;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

void flip_byte(const fs::path& p, std::streamoff offset) {
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekg(offset);
    char c = 0;
    f.read(&c, 1);
    c = static_cast<char>(c ^ 0x40);
    f.seekp(offset);
    f.write(&c, 1);
}

}  // namespace

TEST_CASE("crc32 matches the published check value") {
    // The canonical "123456789" vector for CRC-32/ISO-HDLC.
    CHECK(io::crc32("123456789", 9) == 0xCBF43926u);
    // Incremental and one-shot agree.
    u32 c = io::crc32("1234", 4);
    c = io::crc32("56789", 5, c);
    CHECK(c == 0xCBF43926u);
}

TEST_CASE("slice file round-trips dense and sparse payloads") {
    const fs::path dir = fresh_dir("slicefile");
    rng::Stream s(5);

    const DenseMatrix d = random_dense(17, 6, s);
    io::SliceFileInfo winfo = io::write_slice_file(dir / "d.bin", Matrix(d));
    CHECK(winfo.kind == StorageKind::dense);
    CHECK(winfo.rows == 17);
    CHECK(winfo.cols == 6);
    CHECK(winfo.nnz == 17 * 6);

    io::SliceFileInfo rinfo;
    const Matrix back = io::read_slice_file(dir / "d.bin", &rinfo);
    CHECK(rinfo.checksum == winfo.checksum);
    CHECK(rinfo.file_bytes == winfo.file_bytes);
    CHECK(max_abs_diff(std::get<DenseMatrix>(back), d) == 0.0);

    const SparseColMatrix sp = random_sparse(23, 9, 0.25, s);
    io::SliceFileInfo sinfo = io::write_slice_file(dir / "s.bin", Matrix(sp));
    CHECK(sinfo.kind == StorageKind::sparse);
    CHECK(sinfo.nnz == static_cast<u64>(sp.nnz()));
    const Matrix sback = io::read_slice_file(dir / "s.bin");
    const SparseColMatrix& spb = std::get<SparseColMatrix>(sback);
    CHECK(spb.nnz() == sp.nnz());
    CHECK(max_abs_diff(spb.to_dense(), sp.to_dense()) == 0.0);
}

TEST_CASE("slice file rejects bad magic, truncation, and bad version") {
    const fs::path dir = fresh_dir("slicefile_bad");
    rng::Stream s(6);
    const DenseMatrix d = random_dense(4, 3, s);
    io::write_slice_file(dir / "ok.bin", Matrix(d));

    // Magic.
    fs::copy_file(dir / "ok.bin", dir / "magic.bin");
    flip_byte(dir / "magic.bin", 0);
    CHECK_THROWS_AS(io::read_slice_file(dir / "magic.bin"), StorageError);

    // Version.
    fs::copy_file(dir / "ok.bin", dir / "version.bin");
    flip_byte(dir / "version.bin", 4);
    CHECK_THROWS_AS(io::read_slice_file(dir / "version.bin"), StorageError);

    // Truncated payload.
    const u64 full = fs::file_size(dir / "ok.bin");
    fs::copy_file(dir / "ok.bin", dir / "trunc.bin");
    fs::resize_file(dir / "trunc.bin", full - 5);
    CHECK_THROWS_AS(io::read_slice_file(dir / "trunc.bin"), StorageError);

    CHECK_THROWS_AS(io::read_slice_file(dir / "missing.bin"), StorageError);
}

TEST_CASE("matrix market coordinate file loads as sparse with 1-based indices mapped") {
    const fs::path dir = fresh_dir("mm_coord");
    write_text(dir / "m.mtx",
               "%%MatrixMarket matrix coordinate real general\n"
               "% a comment line\n"
               "4 3 4\n"
               "1 1 1.5\n"
               "4 3 -2.0\n"
               "2 1 3.25\n"
               "3 2 0.5\n");
    const Matrix m = io::read_matrix_market(dir / "m.mtx");
    REQUIRE(matrix_kind(m) == StorageKind::sparse);
    const DenseMatrix d = densify(m);
    CHECK(d.rows() == 4);
    CHECK(d.cols() == 3);
    CHECK(d(0, 0) == 1.5f);
    CHECK(d(3, 2) == -2.0f);
    CHECK(d(1, 0) == 3.25f);
    CHECK(d(2, 1) == 0.5f);
    CHECK(d(0, 1) == 0.0f);
}

TEST_CASE("matrix market array file loads as dense in column-major order") {
    const fs::path dir = fresh_dir("mm_array");
    write_text(dir / "m.mtx",
               "%%MatrixMarket matrix array real general\n"
               "2 3\n"
               "1\n2\n3\n4\n5\n6\n");
    const Matrix m = io::read_matrix_market(dir / "m.mtx");
    REQUIRE(matrix_kind(m) == StorageKind::dense);
    const DenseMatrix& d = std::get<DenseMatrix>(m);
    CHECK(d(0, 0) == 1.0f);
    CHECK(d(1, 0) == 2.0f);
    CHECK(d(0, 1) == 3.0f);
    CHECK(d(1, 2) == 6.0f);
}

TEST_CASE("matrix market symmetric storage mirrors the lower triangle") {
    const fs::path dir = fresh_dir("mm_sym");
    write_text(dir / "m.mtx",
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "3 3 3\n"
               "1 1 2.0\n"
               "3 1 5.0\n"
               "3 3 1.0\n");
    const DenseMatrix d = densify(io::read_matrix_market(dir / "m.mtx"));
    CHECK(d(0, 0) == 2.0f);
    CHECK(d(2, 0) == 5.0f);
    CHECK(d(0, 2) == 5.0f);  // mirrored
    CHECK(d(2, 2) == 1.0f);
}

TEST_CASE("matrix market pattern and integer fields") {
    const fs::path dir = fresh_dir("mm_pat");
    write_text(dir / "p.mtx",
               "%%MatrixMarket matrix coordinate pattern general\n"
               "2 2 2\n"
               "1 1\n"
               "2 2\n");
    const DenseMatrix p = densify(io::read_matrix_market(dir / "p.mtx"));
    CHECK(p(0, 0) == 1.0f);
    CHECK(p(1, 1) == 1.0f);
    CHECK(p(0, 1) == 0.0f);

    write_text(dir / "i.mtx",
               "%%MatrixMarket matrix coordinate integer general\n"
               "2 2 1\n"
               "2 1 -7\n");
    const DenseMatrix i = densify(io::read_matrix_market(dir / "i.mtx"));
    CHECK(i(1, 0) == -7.0f);
}

TEST_CASE("matrix market parse failures carry the 1-based line number") {
    const fs::path dir = fresh_dir("mm_err");

    write_text(dir / "header.mtx", "%%NotMatrixMarket junk\n1 1 1\n1 1 1.0\n");
    CHECK_THROWS_AS(io::read_matrix_market(dir / "header.mtx"), ParseError);

    write_text(dir / "entry.mtx",
               "%%MatrixMarket matrix coordinate real general\n"
               "2 2 2\n"
               "1 1 1.0\n"
               "2 oops 2.0\n");
    try {
        (void)io::read_matrix_market(dir / "entry.mtx");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }

    write_text(dir / "range.mtx",
               "%%MatrixMarket matrix coordinate real general\n"
               "2 2 1\n"
               "3 1 1.0\n");
    try {
        (void)io::read_matrix_market(dir / "range.mtx");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }

    write_text(dir / "short.mtx",
               "%%MatrixMarket matrix coordinate real general\n"
               "2 2 3\n"
               "1 1 1.0\n");
    CHECK_THROWS_AS(io::read_matrix_market(dir / "short.mtx"), ParseError);
}

TEST_CASE("matrix market round-trips both storage kinds") {
    const fs::path dir = fresh_dir("mm_rt");
    rng::Stream s(7);

    const SparseColMatrix sp = random_sparse(30, 12, 0.15, s);
    io::write_matrix_market(dir / "sp.mtx", Matrix(sp));
    const DenseMatrix spback = densify(io::read_matrix_market(dir / "sp.mtx"));
    CHECK(max_abs_diff(spback, sp.to_dense()) <= 1e-6 * (1.0 + max_abs(sp.to_dense())));

    const DenseMatrix d = random_dense(9, 4, s);
    io::write_matrix_market(dir / "d.mtx", Matrix(d));
    const DenseMatrix dback = densify(io::read_matrix_market(dir / "d.mtx"));
    CHECK(max_abs_diff(dback, d) <= 1e-6 * (1.0 + max_abs(d)));
}

TEST_CASE("csv round-trip and labels") {
    const fs::path dir = fresh_dir("csv");
    rng::Stream s(8);
    const DenseMatrix d = random_dense(11, 5, s);
    io::write_dense_csv(dir / "m.csv", d);
    const DenseMatrix back = io::read_dense_csv(dir / "m.csv");
    REQUIRE(back.rows() == 11);
    REQUIRE(back.cols() == 5);
    CHECK(max_abs_diff(back, d) <= 1e-6 * (1.0 + max_abs(d)));

    write_text(dir / "labels.txt", "0\n2\n1\n1\n");
    const std::vector<Index> labels = io::read_labels(dir / "labels.txt");
    REQUIRE(labels.size() == 4);
    CHECK(labels[1] == 2);

    write_text(dir / "ragged.csv", "1,2,3\n4,5\n");
    CHECK_THROWS_AS(io::read_dense_csv(dir / "ragged.csv"), ParseError);
    write_text(dir / "junk.csv", "1,2\n3,x\n");
    try {
        (void)io::read_dense_csv(dir / "junk.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    write_text(dir / "badlabel.txt", "0\nseven\n");
    CHECK_THROWS_AS(io::read_labels(dir / "badlabel.txt"), ParseError);
}

TEST_CASE("slice store create/append/finalize/open round-trip") {
    const fs::path dir = fresh_dir("store_rt");
    rng::Stream s(9);
    const DenseMatrix a = random_dense(8, 5, s);
    const DenseMatrix b = random_dense(3, 5, s);

    SliceStore w = SliceStore::create(dir, 5, StorageKind::dense);
    w.append(Matrix(a));
    w.append(Matrix(b));
    CHECK(!w.finalized());
    w.finalize();
    CHECK(w.finalized());

    SliceStore r = SliceStore::open(dir);
    CHECK(r.n_total() == 11);
    CHECK(r.cols() == 5);
    CHECK(r.slice_count() == 2);
    CHECK(r.slice_row_counts()[0] == 8);
    CHECK(r.slice_row_counts()[1] == 3);
    CHECK(r.kind() == StorageKind::dense);

    const DenseMatrix back0 = densify(r.read_slice(0));
    const DenseMatrix back1 = densify(r.read_slice(1));
    CHECK(max_abs_diff(back0, a) == 0.0);
    CHECK(max_abs_diff(back1, b) == 0.0);

    // Width mismatch is rejected at append time.
    SliceStore w2 = SliceStore::create(fresh_dir("store_w2"), 5, StorageKind::dense);
    CHECK_THROWS_AS(w2.append(Matrix(random_dense(2, 4, s))), ShapeError);
}

TEST_CASE("slice store counts reads and reports payload bytes") {
    const fs::path dir = fresh_dir("store_counts");
    rng::Stream s(10);
    SliceStore w = SliceStore::create(dir, 4, StorageKind::dense);
    w.append(Matrix(random_dense(6, 4, s)));
    w.append(Matrix(random_dense(2, 4, s)));
    w.finalize();

    SliceStore r = SliceStore::open(dir);
    CHECK(r.read_counts() == std::vector<u64>{0, 0});
    CHECK(r.payload_bytes_read() == 0);
    (void)r.read_slice(0);
    (void)r.read_slice(0);
    (void)r.read_slice(1);
    CHECK(r.read_counts() == std::vector<u64>{2, 1});
    CHECK(r.payload_bytes_read() ==
          2 * r.slice_bytes(0) + r.slice_bytes(1));
    CHECK(r.max_slice_bytes() == r.slice_bytes(0));
    r.reset_read_counts();
    CHECK(r.read_counts() == std::vector<u64>{0, 0});

    SliceStream stream(r);
    Index idx = -1;
    Matrix m;
    int seen = 0;
    while (stream.next(idx, m)) {
        CHECK(idx == seen);
        ++seen;
    }
    CHECK(seen == 2);
    CHECK(r.read_counts() == std::vector<u64>{1, 1});
}

TEST_CASE("corrupted slice payload surfaces as CorruptSliceError with the index") {
    const fs::path dir = fresh_dir("store_corrupt");
    rng::Stream s(11);
    SliceStore w = SliceStore::create(dir, 3, StorageKind::dense);
    w.append(Matrix(random_dense(4, 3, s)));
    w.append(Matrix(random_dense(4, 3, s)));
    w.finalize();

    // Flip one payload bit in slice 1; the header stays intact.
    flip_byte(dir / "slice_0001.bin", 40);
    SliceStore r = SliceStore::open(dir);
    CHECK_NOTHROW(r.read_slice(0));
    try {
        (void)r.read_slice(1);
        FAIL("expected CorruptSliceError");
    } catch (const CorruptSliceError& e) {
        CHECK(e.slice == 1);
    }
}

TEST_CASE("slice store open rejects a tampered or missing manifest") {
    const fs::path dir = fresh_dir("store_manifest");
    rng::Stream s(12);
    SliceStore w = SliceStore::create(dir, 3, StorageKind::dense);
    w.append(Matrix(random_dense(4, 3, s)));
    w.finalize();

    write_text(dir / "manifest.json", "{ not json");
    CHECK_THROWS_AS(SliceStore::open(dir), StorageError);
    fs::remove(dir / "manifest.json");
    CHECK_THROWS_AS(SliceStore::open(dir), StorageError);
}

TEST_CASE("partition splits by row budget and concat_store restores the matrix") {
    const fs::path dir = fresh_dir("store_partition");
    rng::Stream s(13);
    const DenseMatrix x = random_dense(25, 6, s);
    SliceStore st = partition(Matrix(x), 10, dir);
    CHECK(st.slice_count() == 3);
    CHECK(st.slice_row_counts() == std::vector<Index>{10, 10, 5});
    CHECK(st.n_total() == 25);

    const DenseMatrix back = densify(concat_store(st));
    CHECK(max_abs_diff(back, x) == 0.0);

    // Sparse partition preserves kind.
    const SparseColMatrix sp = random_sparse(12, 5, 0.3, s);
    SliceStore sps = partition(Matrix(sp), 5, fresh_dir("store_partition_sp"));
    CHECK(sps.kind() == StorageKind::sparse);
    CHECK(max_abs_diff(densify(concat_store(sps)), sp.to_dense()) == 0.0);
}

TEST_CASE("gather_rows pulls global row indices across slice boundaries") {
    const fs::path dir = fresh_dir("store_gather");
    rng::Stream s(14);
    const DenseMatrix x = random_dense(20, 4, s);
    SliceStore st = partition(Matrix(x), 7, dir);

    const std::vector<Index> want_rows = {0, 6, 7, 13, 19};
    const DenseMatrix got = densify(gather_rows(st, want_rows));
    REQUIRE(got.rows() == 5);
    for (std::size_t r = 0; r < want_rows.size(); ++r)
        for (Index j = 0; j < 4; ++j)
            CHECK(got(static_cast<Index>(r), j) == x(want_rows[r], j));

    const std::vector<Index> out_of_range = {0, 20};
    CHECK_THROWS_AS(gather_rows(st, out_of_range), ShapeError);
}
