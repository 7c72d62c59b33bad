#pragma once

// Synthetic low-rank classification data. Rows are drawn as
//   x_i = (center[label_i] + diag(scales) g_i) loadings^T + noise_sd h_i
// with orthonormal loadings (P×rank), factor scales falling linearly from
// 1.0 to 0.3, fixed per-class centers in the latent space, and i.i.d.
// Gaussian ambient noise. Labels cycle round-robin so every class is
// guaranteed to appear and any prefix of rows stays balanced.
//
// With noise_sd = 0 the data is exactly rank `rank` (up to f32 rounding),
// which the tests lean on. Everything is a pure function of the config,
// including the draw order, so a given config is bit-reproducible.

#include <vector>

#include "lsr/dense.hpp"
#include "lsr/types.hpp"

namespace lsr {

struct LabeledDataset {
    DenseMatrix x;
    std::vector<Index> labels;  // class ids in [0, n_classes), every class present
    Index n_classes = 0;
};

struct SyntheticConfig {
    Index n = 1000;
    Index p = 100;
    Index rank = 20;
    Index n_classes = 2;
    f64 noise_sd = 0.1;
    u64 seed = 0;
};

LabeledDataset make_synthetic(const SyntheticConfig& cfg);

}  // namespace lsr
