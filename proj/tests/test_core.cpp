#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "helpers.hpp"
#include "lsr/matmul.hpp"
#include "lsr/matrix.hpp"
#include "lsr/memtrack.hpp"

using namespace lsr;
using namespace tst;

TEST_CASE("dense matrix basics") {
    DenseMatrix m(3, 2);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < 3; ++i) CHECK(m(i, j) == 0.0f);

    m(2, 1) = 5.0f;
    CHECK(m.at(2, 1) == 5.0f);
    CHECK_THROWS_AS(m.at(3, 0), ShapeError);
    CHECK_THROWS_AS(m.at(0, 2), ShapeError);

    const DenseMatrix t = transpose(m);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t(1, 2) == 5.0f);

    CHECK_THROWS_AS(DenseMatrix::from_column_major(2, 2, Buffer<f32>(3, 0.0f)), ShapeError);
}

TEST_CASE("concat_rows stacks blocks and checks widths") {
    rng::Stream s(3);
    const DenseMatrix a = random_dense(3, 4, s);
    const DenseMatrix b = random_dense(2, 4, s);
    const DenseMatrix c = concat_rows(a, b);
    CHECK(c.rows() == 5);
    for (Index j = 0; j < 4; ++j) {
        for (Index i = 0; i < 3; ++i) CHECK(c(i, j) == a(i, j));
        for (Index i = 0; i < 2; ++i) CHECK(c(3 + i, j) == b(i, j));
    }
    const DenseMatrix w = random_dense(2, 3, s);
    CHECK_THROWS_AS(concat_rows(a, w), ShapeError);
}

TEST_CASE("sparse from_triplets canonicalizes: sorted, deduplicated, no stored zeros") {
    // Duplicates at (1,0) sum; the pair at (2,1) cancels to zero and is dropped.
    std::vector<Triplet> trips = {
        {2, 1, 1.5f}, {1, 0, 2.0f}, {1, 0, 3.0f}, {0, 1, 4.0f}, {2, 1, -1.5f}, {3, 0, 1.0f},
    };
    const SparseColMatrix m = SparseColMatrix::from_triplets(4, 2, trips);
    CHECK(m.nnz() == 3);
    CHECK(m.col_rows(0).size() == 2);
    CHECK(m.col_rows(0)[0] == 1);
    CHECK(m.col_vals(0)[0] == 5.0f);
    CHECK(m.col_rows(0)[1] == 3);
    CHECK(m.col_rows(1).size() == 1);
    CHECK(m.col_rows(1)[0] == 0);
    CHECK(m.col_vals(1)[0] == 4.0f);

    const DenseMatrix d = m.to_dense();
    CHECK(d(1, 0) == 5.0f);
    CHECK(d(2, 1) == 0.0f);
}

TEST_CASE("sparse from_triplets rejects out-of-range coordinates") {
    std::vector<Triplet> bad = {{4, 0, 1.0f}};
    CHECK_THROWS_AS(SparseColMatrix::from_triplets(4, 2, bad), ShapeError);
    std::vector<Triplet> bad2 = {{0, 2, 1.0f}};
    CHECK_THROWS_AS(SparseColMatrix::from_triplets(4, 2, bad2), ShapeError);
}

TEST_CASE("sparse validate accepts structure and flags broken column pointers") {
    rng::Stream s(11);
    const SparseColMatrix m = random_sparse(30, 10, 0.2, s);
    CHECK_NOTHROW(m.validate());

    // Decreasing row indices within a column must be rejected.
    Buffer<u64> cp{0, 2};
    Buffer<u64> ri{3, 1};
    Buffer<f32> v{1.0f, 2.0f};
    CHECK_THROWS_AS(SparseColMatrix::from_parts(4, 1, cp, ri, v), ShapeError);
}

TEST_CASE("matmul dense*dense matches the naive oracle") {
    rng::Stream s(21);
    for (auto [m, k, n] : {std::tuple<Index, Index, Index>{1, 1, 1},
                           {5, 3, 4},
                           {17, 9, 8},
                           {64, 32, 16}}) {
        const DenseMatrix a = random_dense(m, k, s);
        const DenseMatrix b = random_dense(k, n, s);
        const DenseMatrix got = matmul(a, b);
        const DenseMatrix want = naive_matmul(a, b);
        CHECK(max_abs_diff(got, want) <= 1e-5 * (1.0 + max_abs(want)));
    }
}

TEST_CASE("matmul sparse*dense and dense*sparse match the densified oracle") {
    rng::Stream s(22);
    const SparseColMatrix sp = random_sparse(180, 200, 0.05, s);
    const DenseMatrix b = random_dense(200, 7, s);
    const DenseMatrix want = naive_matmul(sp.to_dense(), b);
    const DenseMatrix got = matmul(sp, b);
    REQUIRE(got.rows() == 180);
    CHECK(max_abs_diff(got, want) <= 1e-5 * (1.0 + max_abs(want)));

    const DenseMatrix a = random_dense(7, 180, s);
    const SparseColMatrix sp2 = random_sparse(180, 90, 0.07, s);
    const DenseMatrix want2 = naive_matmul(a, sp2.to_dense());
    const DenseMatrix got2 = matmul(a, sp2);
    CHECK(max_abs_diff(got2, want2) <= 1e-5 * (1.0 + max_abs(want2)));
}

TEST_CASE("transpose_matmul variants match the oracle") {
    rng::Stream s(23);
    const DenseMatrix a = random_dense(40, 6, s);
    const DenseMatrix b = random_dense(40, 9, s);
    CHECK(max_abs_diff(transpose_matmul(a, b), naive_transpose_matmul(a, b)) <= 1e-5);

    const SparseColMatrix sp = random_sparse(40, 9, 0.2, s);
    const DenseMatrix want = naive_transpose_matmul(a, sp.to_dense());
    CHECK(max_abs_diff(transpose_matmul(a, sp), want) <= 1e-5);
}

TEST_CASE("transpose_matmul_acc accumulates across blocks like one big product") {
    rng::Stream s(24);
    const DenseMatrix a1 = random_dense(12, 5, s);
    const DenseMatrix a2 = random_dense(20, 5, s);
    const DenseMatrix b1 = random_dense(12, 8, s);
    const DenseMatrix b2 = random_dense(20, 8, s);

    DenseMatrix acc(5, 8);
    transpose_matmul_acc(acc, a1, b1);
    transpose_matmul_acc(acc, a2, b2);

    const DenseMatrix a = concat_rows(a1, a2);
    const DenseMatrix b = concat_rows(b1, b2);
    const DenseMatrix want = naive_transpose_matmul(a, b);
    CHECK(max_abs_diff(acc, want) <= 1e-4);
}

TEST_CASE("matmul rejects mismatched shapes with both sizes in the message") {
    rng::Stream s(25);
    const DenseMatrix a = random_dense(3, 4, s);
    const DenseMatrix b = random_dense(5, 2, s);
    try {
        (void)matmul(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3 x 4") != std::string::npos);
        CHECK(msg.find("5 x 2") != std::string::npos);
    }
}

TEST_CASE("matrix variant helpers") {
    rng::Stream s(26);
    Matrix m = Matrix(random_dense(6, 3, s));
    CHECK(matrix_rows(m) == 6);
    CHECK(matrix_cols(m) == 3);
    CHECK(matrix_kind(m) == StorageKind::dense);

    Matrix sp = Matrix(random_sparse(6, 3, 0.4, s));
    CHECK(matrix_kind(sp) == StorageKind::sparse);
    const DenseMatrix d = densify(sp);
    CHECK(d.rows() == 6);
    CHECK(max_abs_diff(d, std::get<SparseColMatrix>(sp).to_dense()) == 0.0);
}

TEST_CASE("tracked allocation: peak moves with buffer lifetime") {
    memtrack::reset_peak();
    const u64 before = memtrack::current();
    {
        DenseMatrix big(1000, 100);
        CHECK(memtrack::current() >= before + 1000 * 100 * sizeof(f32));
        CHECK(memtrack::peak() >= before + 1000 * 100 * sizeof(f32));
    }
    CHECK(memtrack::current() == before);
    const u64 high = memtrack::peak();
    memtrack::reset_peak();
    CHECK(memtrack::peak() <= std::max(memtrack::current(), high));
    CHECK(memtrack::peak() >= memtrack::current());
}
