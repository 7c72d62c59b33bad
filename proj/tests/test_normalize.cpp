#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <vector>

#include "helpers.hpp"
#include "lsr/normalize.hpp"
#include "lsr/slice_store.hpp"

using namespace lsr;
using namespace tst;
namespace fs = std::filesystem;

namespace {

// Straight-line recomputation of the dense-mode statistics.
void dense_stats_oracle(const DenseMatrix& x, std::vector<f64>& mean, std::vector<f64>& sd) {
    const Index n = x.rows(), p = x.cols();
    mean.assign(static_cast<std::size_t>(p), 0.0);
    sd.assign(static_cast<std::size_t>(p), 0.0);
    for (Index j = 0; j < p; ++j) {
        f64 s = 0.0;
        for (Index i = 0; i < n; ++i) s += x(i, j);
        const f64 m = s / static_cast<f64>(n);
        f64 var = 0.0;
        for (Index i = 0; i < n; ++i) {
            const f64 d = x(i, j) - m;
            var += d * d;
        }
        mean[static_cast<std::size_t>(j)] = m;
        sd[static_cast<std::size_t>(j)] = std::sqrt(var / static_cast<f64>(n));
    }
}

}  // namespace

TEST_CASE("mode names round-trip") {
    CHECK(norm_mode_from_name("dense") == NormMode::dense);
    CHECK(norm_mode_from_name("sparse") == NormMode::sparse);
    CHECK(norm_mode_from_name("none") == NormMode::none);
    CHECK(std::string(norm_mode_name(NormMode::sparse)) == "sparse");
    CHECK_THROWS_AS(norm_mode_from_name("fancy"), ConfigError);
}

TEST_CASE("dense-mode statistics match the oracle and the transform centers columns") {
    rng::Stream s(31);
    const DenseMatrix x = random_dense(40, 7, s);
    const NormStats stats = fit_norm(Matrix(x), NormMode::dense);

    std::vector<f64> mean, sd;
    dense_stats_oracle(x, mean, sd);
    for (Index j = 0; j < 7; ++j) {
        CHECK(stats.mean[static_cast<std::size_t>(j)] ==
              doctest::Approx(mean[static_cast<std::size_t>(j)]).epsilon(1e-10));
        CHECK(stats.sd[static_cast<std::size_t>(j)] ==
              doctest::Approx(sd[static_cast<std::size_t>(j)]).epsilon(1e-10));
    }

    const DenseMatrix y = apply_norm(x, stats);
    for (Index j = 0; j < 7; ++j) {
        f64 sum = 0.0, sumsq = 0.0;
        for (Index i = 0; i < 40; ++i) {
            sum += y(i, j);
            sumsq += static_cast<f64>(y(i, j)) * y(i, j);
        }
        const f64 m = sum / 40.0;
        const f64 v = sumsq / 40.0 - m * m;
        CHECK(std::fabs(m) <= 1e-6);
        // Divisor is twice the sd, so normalized variance is 1/4.
        CHECK(v == doctest::Approx(0.25).epsilon(1e-4));
    }

    // Transform formula spot check: (x - mean) / (2 sd).
    const f64 want = (static_cast<f64>(x(3, 2)) - mean[2]) / (2.0 * sd[2]);
    CHECK(static_cast<f64>(y(3, 2)) == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("constant columns transform to zero instead of dividing by zero") {
    DenseMatrix x(5, 2);
    for (Index i = 0; i < 5; ++i) {
        x(i, 0) = 3.0f;
        x(i, 1) = static_cast<f32>(i);
    }
    const NormStats stats = fit_norm(Matrix(x), NormMode::dense);
    CHECK(stats.constant(0));
    CHECK(!stats.constant(1));
    const DenseMatrix y = apply_norm(x, stats);
    for (Index i = 0; i < 5; ++i) CHECK(y(i, 0) == 0.0f);
}

TEST_CASE("sparse-mode statistics run over stored nonzeros only") {
    // Column 0: stored values {2, 4} among 6 rows. Sparse-mode mean/sd come
    // from those two values alone; dense-mode would see four extra zeros.
    std::vector<Triplet> trips = {{1, 0, 2.0f}, {4, 0, 4.0f}, {0, 1, 1.0f},
                                  {2, 1, 1.0f}, {5, 1, 1.0f}};
    const SparseColMatrix x = SparseColMatrix::from_triplets(6, 2, trips);

    const std::vector<ColumnKind> kinds = {ColumnKind::continuous, ColumnKind::continuous};
    const NormStats stats = fit_norm(Matrix(x), NormMode::sparse, kinds);
    CHECK(stats.mean[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(stats.sd[0] == doctest::Approx(1.0).epsilon(1e-12));
    // Column 1 is constant among stored values: sd 0, transforms to 0.
    CHECK(stats.sd[1] == 0.0);

    const SparseColMatrix y = apply_norm(x, stats);
    // Pattern preserved exactly.
    REQUIRE(y.nnz() == x.nnz());
    for (Index j = 0; j < 2; ++j) {
        REQUIRE(y.col_rows(j).size() == x.col_rows(j).size());
        for (std::size_t t = 0; t < y.col_rows(j).size(); ++t)
            CHECK(y.col_rows(j)[t] == x.col_rows(j)[t]);
    }
    CHECK(y.col_vals(0)[0] == doctest::Approx((2.0 - 3.0) / 2.0).epsilon(1e-6));
    CHECK(y.col_vals(0)[1] == doctest::Approx((4.0 - 3.0) / 2.0).epsilon(1e-6));
    CHECK(y.col_vals(1)[0] == 0.0f);
}

TEST_CASE("sparse mode leaves binary columns untouched") {
    std::vector<Triplet> trips = {{0, 0, 1.0f}, {3, 0, 1.0f}, {1, 1, 5.0f}, {2, 1, 7.0f}};
    const SparseColMatrix x = SparseColMatrix::from_triplets(4, 2, trips);
    const std::vector<ColumnKind> kinds = {ColumnKind::binary, ColumnKind::continuous};
    const NormStats stats = fit_norm(Matrix(x), NormMode::sparse, kinds);

    const SparseColMatrix y = apply_norm(x, stats);
    CHECK(y.col_vals(0)[0] == 1.0f);
    CHECK(y.col_vals(0)[1] == 1.0f);
    CHECK(y.col_vals(1)[0] == doctest::Approx((5.0 - 6.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("sparse-mode dense input treats exact zeros as not stored") {
    DenseMatrix xd(6, 1);
    xd(1, 0) = 2.0f;
    xd(4, 0) = 4.0f;
    const NormStats from_dense = fit_norm(Matrix(xd), NormMode::sparse);
    CHECK(from_dense.mean[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(from_dense.sd[0] == doctest::Approx(1.0).epsilon(1e-12));

    const DenseMatrix yd = apply_norm(xd, from_dense);
    CHECK(yd(0, 0) == 0.0f);  // unstored stays zero
    CHECK(yd(1, 0) == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("detect_column_kinds flags 0/1 columns as binary") {
    DenseMatrix x(5, 3);
    for (Index i = 0; i < 5; ++i) {
        x(i, 0) = static_cast<f32>(i % 2);     // binary
        x(i, 1) = static_cast<f32>(i) * 0.5f;  // continuous
        x(i, 2) = 0.0f;                        // all zero: no stored values
    }
    x(0, 2) = 1.0f;  // now one stored value, and it is 1: binary
    const std::vector<ColumnKind> kinds = detect_column_kinds(Matrix(x));
    CHECK(kinds[0] == ColumnKind::binary);
    CHECK(kinds[1] == ColumnKind::continuous);
    CHECK(kinds[2] == ColumnKind::binary);
}

TEST_CASE("streaming fit over a store equals the in-core fit") {
    rng::Stream s(32);
    const DenseMatrix x = random_dense(50, 5, s);
    SliceStore st = partition(Matrix(x), 12, fresh_dir("norm_stream"));

    const NormStats incore = fit_norm(Matrix(x), NormMode::dense);
    const NormStats streamed = fit_norm(st, NormMode::dense);
    for (Index j = 0; j < 5; ++j) {
        CHECK(streamed.mean[static_cast<std::size_t>(j)] ==
              doctest::Approx(incore.mean[static_cast<std::size_t>(j)]).epsilon(1e-9));
        CHECK(streamed.sd[static_cast<std::size_t>(j)] ==
              doctest::Approx(incore.sd[static_cast<std::size_t>(j)]).epsilon(1e-9));
    }

    // The fit is a single pass.
    st.reset_read_counts();
    (void)fit_norm(st, NormMode::dense);
    for (u64 c : st.read_counts()) CHECK(c == 1);
}

TEST_CASE("apply_norm over a store writes the transformed slices") {
    rng::Stream s(33);
    const DenseMatrix x = random_dense(30, 4, s);
    SliceStore st = partition(Matrix(x), 8, fresh_dir("norm_apply_in"));
    const NormStats stats = fit_norm(st, NormMode::dense);

    SliceStore out = apply_norm(st, stats, fresh_dir("norm_apply_out"));
    CHECK(out.n_total() == 30);
    CHECK(out.slice_row_counts() == st.slice_row_counts());
    const DenseMatrix got = densify(concat_store(out));
    const DenseMatrix want = apply_norm(x, stats);
    CHECK(max_abs_diff(got, want) <= 1e-7);
}

TEST_CASE("dense mode on a sparse store yields a dense store") {
    rng::Stream s(34);
    const SparseColMatrix x = random_sparse(24, 5, 0.3, s);
    SliceStore st = partition(Matrix(x), 10, fresh_dir("norm_sp2d_in"));
    const NormStats stats = fit_norm(st, NormMode::dense);
    SliceStore out = apply_norm(st, stats, fresh_dir("norm_sp2d_out"));
    CHECK(out.kind() == StorageKind::dense);

    const DenseMatrix got = densify(concat_store(out));
    const DenseMatrix want = apply_norm(x.to_dense(), stats);
    CHECK(max_abs_diff(got, want) <= 1e-7);
}

TEST_CASE("norm stats JSON sidecar round-trips") {
    rng::Stream s(35);
    const DenseMatrix x = random_dense(12, 3, s);
    NormStats stats = fit_norm(Matrix(x), NormMode::dense);
    const fs::path dir = fresh_dir("norm_json");
    save_norm(stats, dir / "norm.json");
    const NormStats back = load_norm(dir / "norm.json");
    CHECK(back.mode == stats.mode);
    REQUIRE(back.cols() == stats.cols());
    for (Index j = 0; j < stats.cols(); ++j) {
        CHECK(back.mean[static_cast<std::size_t>(j)] == stats.mean[static_cast<std::size_t>(j)]);
        CHECK(back.sd[static_cast<std::size_t>(j)] == stats.sd[static_cast<std::size_t>(j)]);
        CHECK(back.column_kind[static_cast<std::size_t>(j)] ==
              stats.column_kind[static_cast<std::size_t>(j)]);
    }

    std::ofstream bad(dir / "bad.json");
    bad << "{ nope";
    bad.close();
    CHECK_THROWS_AS(load_norm(dir / "bad.json"), StorageError);
}

TEST_CASE("apply_norm rejects a stats/width mismatch") {
    rng::Stream s(36);
    const DenseMatrix x = random_dense(10, 4, s);
    const NormStats stats = fit_norm(Matrix(x), NormMode::dense);
    const DenseMatrix narrow = random_dense(10, 3, s);
    CHECK_THROWS_AS(apply_norm(narrow, stats), ShapeError);
}

TEST_CASE("none mode means skip: fitting with it is a config error") {
    rng::Stream s(37);
    const DenseMatrix x = random_dense(9, 3, s);
    CHECK_THROWS_AS(fit_norm(Matrix(x), NormMode::none), ConfigError);
}
