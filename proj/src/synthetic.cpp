#include "lsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lsr/error.hpp"
#include "lsr/matmul.hpp"
#include "lsr/qr.hpp"
#include "lsr/rng.hpp"

namespace lsr {
namespace {

// How far apart class centers sit, in units of the per-factor scale.
constexpr f64 kCenterSpread = 1.6;

}  // namespace

LabeledDataset make_synthetic(const SyntheticConfig& cfg) {
    if (cfg.n < 1 || cfg.p < 1) throw ShapeError("make_synthetic: n and p must be positive");
    if (cfg.rank < 1 || cfg.rank > std::min(cfg.n, cfg.p)) {
        std::ostringstream os;
        os << "make_synthetic: rank " << cfg.rank << " outside [1, min(" << cfg.n << ", "
           << cfg.p << ")]";
        throw ShapeError(os.str());
    }
    if (cfg.n_classes < 2) throw ShapeError("make_synthetic: need at least 2 classes");
    if (cfg.n < cfg.n_classes)
        throw ShapeError("make_synthetic: fewer rows than classes, some class would be empty");
    if (cfg.noise_sd < 0.0) throw ShapeError("make_synthetic: noise_sd must be nonnegative");

    rng::Stream stream(cfg.seed);
    const Index r = cfg.rank;

    // Orthonormal loadings: QR of a Gaussian P×rank draw.
    DenseMatrix raw(cfg.p, r);
    for (Index j = 0; j < r; ++j)
        for (Index i = 0; i < cfg.p; ++i)
            raw(i, j) = static_cast<f32>(stream.next_normal());
    DenseMatrix loadings = householder_qr(raw).q;
    raw = DenseMatrix();

    // Factor scales fall linearly from 1.0 to 0.3 so leading directions
    // carry visibly more energy than trailing ones.
    std::vector<f64> scales(static_cast<std::size_t>(r), 1.0);
    for (Index t = 0; t < r; ++t)
        scales[static_cast<std::size_t>(t)] =
            r == 1 ? 1.0
                   : 1.0 - 0.7 * static_cast<f64>(t) / static_cast<f64>(r - 1);

    // Fixed class centers in latent space.
    std::vector<f64> centers(static_cast<std::size_t>(cfg.n_classes) * r, 0.0);
    for (Index c = 0; c < cfg.n_classes; ++c)
        for (Index t = 0; t < r; ++t)
            centers[static_cast<std::size_t>(c) * r + t] =
                kCenterSpread * scales[static_cast<std::size_t>(t)] * stream.next_normal();

    LabeledDataset out;
    out.n_classes = cfg.n_classes;
    out.labels.resize(static_cast<std::size_t>(cfg.n));

    DenseMatrix latent(cfg.n, r);
    for (Index i = 0; i < cfg.n; ++i) {
        const Index label = i % cfg.n_classes;
        out.labels[static_cast<std::size_t>(i)] = label;
        const f64* center = centers.data() + static_cast<std::size_t>(label) * r;
        for (Index t = 0; t < r; ++t)
            latent(i, t) = static_cast<f32>(
                center[t] + scales[static_cast<std::size_t>(t)] * stream.next_normal());
    }

    out.x = matmul(latent, transpose(loadings));
    latent = DenseMatrix();
    loadings = DenseMatrix();

    if (cfg.noise_sd > 0.0) {
        f32* data = out.x.data();
        const std::size_t total = static_cast<std::size_t>(out.x.size());
        for (std::size_t e = 0; e < total; ++e)
            data[e] += static_cast<f32>(cfg.noise_sd * stream.next_normal());
    }
    return out;
}

}  // namespace lsr
