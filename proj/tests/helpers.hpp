#pragma once

// Shared test utilities. The oracles here are deliberately written with
// different algorithms than the library (naive triple loops, modified
// Gram-Schmidt, power iteration) so agreement is evidence, not tautology.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsr/dense.hpp"
#include "lsr/error.hpp"
#include "lsr/qr.hpp"
#include "lsr/rng.hpp"
#include "lsr/sparse.hpp"
#include "lsr/types.hpp"

namespace tst {

using namespace lsr;

inline DenseMatrix random_dense(Index rows, Index cols, rng::Stream& stream) {
    DenseMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        f32* c = m.col(j);
        for (Index i = 0; i < rows; ++i) c[i] = static_cast<f32>(stream.next_normal());
    }
    return m;
}

inline SparseColMatrix random_sparse(Index rows, Index cols, f64 density,
                                     rng::Stream& stream) {
    std::vector<Triplet> trips;
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            if (stream.next_unit() < density)
                trips.push_back(Triplet{static_cast<u64>(i), static_cast<u64>(j),
                                        static_cast<f32>(stream.next_normal())});
    return SparseColMatrix::from_triplets(rows, cols, trips);
}

// Naive f64 triple-loop product, the matmul oracle.
inline DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            f64 acc = 0.0;
            for (Index t = 0; t < a.cols(); ++t)
                acc += static_cast<f64>(a(i, t)) * static_cast<f64>(b(t, j));
            c(i, j) = static_cast<f32>(acc);
        }
    return c;
}

inline DenseMatrix naive_transpose_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < a.cols(); ++i) {
            f64 acc = 0.0;
            for (Index t = 0; t < a.rows(); ++t)
                acc += static_cast<f64>(a(t, i)) * static_cast<f64>(b(t, j));
            c(i, j) = static_cast<f32>(acc);
        }
    return c;
}

inline f64 frob(const DenseMatrix& m) {
    f64 acc = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
        const f32* c = m.col(j);
        for (Index i = 0; i < m.rows(); ++i) acc += static_cast<f64>(c[i]) * c[i];
    }
    return std::sqrt(acc);
}

inline f64 max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    f64 worst = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            worst = std::max(worst,
                             std::fabs(static_cast<f64>(a(i, j)) - static_cast<f64>(b(i, j))));
    return worst;
}

inline f64 max_abs(const DenseMatrix& a) {
    f64 worst = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            worst = std::max(worst, std::fabs(static_cast<f64>(a(i, j))));
    return worst;
}

// Largest singular value by f64 power iteration on X^T X.
inline f64 spectral_norm(const DenseMatrix& x, Index iters = 100, u64 seed = 1) {
    const Index n = x.rows(), p = x.cols();
    rng::Stream stream(seed);
    std::vector<f64> v(static_cast<std::size_t>(p));
    for (f64& e : v) e = stream.next_normal();
    std::vector<f64> w(static_cast<std::size_t>(n));
    f64 sigma = 0.0;
    for (Index it = 0; it < iters; ++it) {
        for (Index i = 0; i < n; ++i) {
            f64 acc = 0.0;
            for (Index j = 0; j < p; ++j) acc += static_cast<f64>(x(i, j)) * v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = acc;
        }
        f64 wn = 0.0;
        for (f64 e : w) wn += e * e;
        sigma = std::sqrt(wn);
        for (Index j = 0; j < p; ++j) {
            f64 acc = 0.0;
            for (Index i = 0; i < n; ++i) acc += static_cast<f64>(x(i, j)) * w[static_cast<std::size_t>(i)];
            v[static_cast<std::size_t>(j)] = acc;
        }
        f64 vn = 0.0;
        for (f64 e : v) vn += e * e;
        vn = std::sqrt(vn);
        if (vn == 0.0) return 0.0;
        for (f64& e : v) e /= vn;
    }
    return sigma;
}

// X with prescribed singular values: Q1 diag(sigma) Q2^T with Haar-ish
// orthonormal factors from QR of Gaussian draws. sigma.size() <= min(n,p);
// missing values are zero.
inline DenseMatrix matrix_with_spectrum(Index n, Index p, std::span<const f64> sigma,
                                        u64 seed) {
    rng::Stream stream(seed);
    DenseMatrix g1 = random_dense(n, std::min(n, p), stream);
    DenseMatrix q1 = householder_qr(g1).q;
    DenseMatrix g2 = random_dense(p, p, stream);
    DenseMatrix q2 = householder_qr(g2).q;

    // rows of q2^T scaled by sigma, i.e. (diag(sigma) q2^T) is r×p.
    const Index r = std::min(n, p);
    DenseMatrix mid(r, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < r && static_cast<std::size_t>(i) < sigma.size(); ++i)
            mid(i, j) = static_cast<f32>(sigma[static_cast<std::size_t>(i)] *
                                         static_cast<f64>(q2(j, i)));
    return naive_matmul(q1, mid);
}

// Modified Gram-Schmidt with a second orthogonalization pass, in f64.
// Produces the same (Q, R) as Householder for full-rank input, up to
// rounding, under the nonnegative-diagonal convention.
inline std::pair<DenseMatrix, DenseMatrix> gram_schmidt_qr(const DenseMatrix& a) {
    const Index m = a.rows(), n = a.cols();
    std::vector<std::vector<f64>> q(static_cast<std::size_t>(n),
                                    std::vector<f64>(static_cast<std::size_t>(m), 0.0));
    DenseMatrix r(n, n);
    std::vector<std::vector<f64>> r64(static_cast<std::size_t>(n),
                                      std::vector<f64>(static_cast<std::size_t>(n), 0.0));
    for (Index j = 0; j < n; ++j) {
        std::vector<f64>& v = q[static_cast<std::size_t>(j)];
        for (Index i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = a(i, j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Index i = 0; i < j; ++i) {
                const std::vector<f64>& qi = q[static_cast<std::size_t>(i)];
                f64 proj = 0.0;
                for (Index t = 0; t < m; ++t) proj += qi[static_cast<std::size_t>(t)] * v[static_cast<std::size_t>(t)];
                r64[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += proj;
                for (Index t = 0; t < m; ++t) v[static_cast<std::size_t>(t)] -= proj * qi[static_cast<std::size_t>(t)];
            }
        }
        f64 norm = 0.0;
        for (Index t = 0; t < m; ++t) norm += v[static_cast<std::size_t>(t)] * v[static_cast<std::size_t>(t)];
        norm = std::sqrt(norm);
        r64[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = norm;
        if (norm > 0.0)
            for (Index t = 0; t < m; ++t) v[static_cast<std::size_t>(t)] /= norm;
    }
    DenseMatrix qm(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i)
            qm(i, j) = static_cast<f32>(q[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) r(i, j) = static_cast<f32>(r64[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return {std::move(qm), std::move(r)};
}

// Clean per-test scratch directory under the system temp dir.
inline std::filesystem::path fresh_dir(const std::string& tag) {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("lsrtest_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace tst
