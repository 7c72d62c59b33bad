#include "lsr/sketch.hpp"

#include "lsr/error.hpp"
#include "lsr/log.hpp"
#include "lsr/matmul.hpp"
#include "lsr/rng.hpp"

namespace lsr {

GaussianSketch make_gaussian(Index p, Index k, u64 seed) {
    if (p < 1 || k < 1)
        throw ShapeError("make_gaussian: p and k must be at least 1");
    if (k > p)
        log::warn("sketch dimension k=" + std::to_string(k) + " exceeds p=" +
                  std::to_string(p) + "; this embeds rather than reduces");
    GaussianSketch sketch;
    sketch.seed = seed;
    sketch.omega = DenseMatrix(p, k);
    // Column-major fill order is part of the reproducibility contract.
    rng::fill_normal_f32(sketch.omega.data(), static_cast<std::size_t>(p * k), seed);
    return sketch;
}

DenseMatrix rp_project(const Matrix& x, const GaussianSketch& sketch) {
    if (matrix_cols(x) != sketch.p())
        throw shape_mismatch("rp_project", matrix_rows(x), matrix_cols(x), sketch.p(),
                             sketch.k());
    DenseMatrix y = matmul(x, sketch.omega);
    const auto scale = static_cast<f32>(sketch.scale());
    f32* data = y.data();
    for (Index i = 0; i < y.size(); ++i) data[i] *= scale;
    return y;
}

SliceStore rp_project(const SliceStore& store, const GaussianSketch& sketch,
                      const std::filesystem::path& out_dir) {
    if (store.cols() != sketch.p())
        throw shape_mismatch("rp_project", store.n_total(), store.cols(), sketch.p(),
                             sketch.k());
    SliceStore out = SliceStore::create(out_dir, sketch.k(), StorageKind::dense);
    SliceStream stream(store);
    Index s;
    Matrix m;
    while (stream.next(s, m)) out.append(rp_project(m, sketch));
    out.finalize();
    return out;
}

}  // namespace lsr
