#pragma once

// Cyclic Jacobi eigen-decomposition for small symmetric matrices, in f64.
// Deterministic: fixed sweep order, fixed convergence threshold, stable
// descending sort of the eigenpairs. This is the engine behind every small
// SVD in the library (via the Gram matrix).

#include "lsr/memtrack.hpp"
#include "lsr/types.hpp"

namespace lsr::linalg {

struct EigenResult {
    Buffer<f64> values;   // length n, descending
    Buffer<f64> vectors;  // n×n column-major, vectors[.,i] pairs values[i]
};

// `a` is the full n×n symmetric matrix, column-major; consumed as
// workspace. Symmetry is the caller's responsibility (only the given
// values are read, both triangles).
EigenResult jacobi_eigen(Buffer<f64> a, Index n);

}  // namespace lsr::linalg
