#pragma once

// Multinomial logistic regression, the downstream consumer the projections
// are judged by. Deterministic by construction: zero initialization and a
// fixed L-BFGS/backtracking schedule, no randomness anywhere.
//
// Objective (f64 throughout):
//   J(W, b) = mean_i [-log softmax(x_i W + b)_{y_i}] + reg/(2N) * |W|_F^2
// The bias row is not penalized. Features are f32; all accumulation and
// every parameter is f64.

#include <vector>

#include "lsr/dense.hpp"
#include "lsr/memtrack.hpp"
#include "lsr/types.hpp"

namespace lsr {

struct LogRegConfig {
    f64 reg = 1.0;
    Index max_iter = 200;
    f64 tol = 1e-6;      // on the gradient norm, relative to max(1, |w|)
    Index history = 10;  // L-BFGS memory
};

struct LogRegModel {
    Index n_features = 0;
    Index n_classes = 0;
    // (n_features+1) x n_classes column-major; last row of each column is
    // the bias for that class.
    Buffer<f64> w;
    bool converged = false;
    Index iterations = 0;
    f64 final_objective = 0.0;

    f64 weight(Index feature, Index cls) const {
        return w[static_cast<std::size_t>(cls) * (n_features + 1) + feature];
    }
    f64 bias(Index cls) const {
        return w[static_cast<std::size_t>(cls) * (n_features + 1) + n_features];
    }
};

// Labels are class ids in [0, n_classes). Non-convergence inside the
// iteration budget sets model.converged = false and logs a warning; it is
// not an error.
LogRegModel train_logreg(const DenseMatrix& x, const std::vector<Index>& y,
                         Index n_classes, const LogRegConfig& cfg = {});

// The exact objective train_logreg descends, with the analytic gradient
// written into grad ((P+1)*C entries, LogRegModel::w layout). Exposed so
// the derivative can be checked against finite differences of the value.
f64 logreg_objective(const DenseMatrix& x, const std::vector<Index>& y, Index n_classes,
                     const Buffer<f64>& w, f64 reg, Buffer<f64>& grad);

// N x C, each row a probability vector summing to 1 within float rounding.
DenseMatrix predict_proba(const LogRegModel& model, const DenseMatrix& x);

// Argmax of the probabilities; ties resolve to the lowest class id.
std::vector<Index> predict(const LogRegModel& model, const DenseMatrix& x);

// Mean negative log likelihood of the true class, probabilities clipped to
// [1e-15, 1 - 1e-15]. Rows of `proba` must sum to 1 within 1e-6.
f64 multiclass_log_loss(const DenseMatrix& proba, const std::vector<Index>& y);

f64 error_rate(const std::vector<Index>& predicted, const std::vector<Index>& y);

}  // namespace lsr
