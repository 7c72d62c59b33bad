#pragma once

// Gaussian random projection: omega is P×K with i.i.d. N(0,1) entries from
// the seeded generator, and data is reduced as (1/sqrt(K)) X omega. The
// sketch is always reproducible from (seed, p, k, generator version), so
// persisted models never store the matrix itself.

#include <cmath>
#include <filesystem>

#include "lsr/slice_store.hpp"

namespace lsr {

struct GaussianSketch {
    DenseMatrix omega;  // P×K
    u64 seed = 0;

    Index p() const { return omega.rows(); }
    Index k() const { return omega.cols(); }
    f64 scale() const { return 1.0 / std::sqrt(static_cast<f64>(omega.cols())); }
};

// Deterministic in seed; k > p is permitted (an embedding rather than a
// reduction) but logs a warning.
GaussianSketch make_gaussian(Index p, Index k, u64 seed);

// Streaming projection: each output slice is (1/sqrt(K)) X_s omega, written
// to a dense store under out_dir.
SliceStore rp_project(const SliceStore& store, const GaussianSketch& sketch,
                      const std::filesystem::path& out_dir);

DenseMatrix rp_project(const Matrix& x, const GaussianSketch& sketch);

}  // namespace lsr
