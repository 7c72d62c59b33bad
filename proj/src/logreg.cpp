#include "lsr/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "lsr/error.hpp"
#include "lsr/log.hpp"

namespace lsr {
namespace {

f64 dot64(const Buffer<f64>& a, const Buffer<f64>& b) {
    f64 acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

f64 norm2(const Buffer<f64>& a) { return std::sqrt(dot64(a, a)); }

// Objective and gradient at w, sharing one N×C workspace that ends up
// holding the residual (probabilities minus one-hot labels).
struct Objective {
    const DenseMatrix& x;
    const std::vector<Index>& y;
    Index n_classes;
    f64 reg;

    Index n() const { return x.rows(); }
    Index p() const { return x.cols(); }
    std::size_t dim() const {
        return static_cast<std::size_t>(p() + 1) * static_cast<std::size_t>(n_classes);
    }

    f64 eval(const Buffer<f64>& w, Buffer<f64>& grad, Buffer<f64>& z) const {
        const Index n_ = n();
        const Index p_ = p();
        const Index c_ = n_classes;
        const std::size_t stride = static_cast<std::size_t>(p_ + 1);

        // Scores Z = X W + b, one class column at a time.
        for (Index c = 0; c < c_; ++c) {
            f64* zc = z.data() + static_cast<std::size_t>(c) * n_;
            const f64* wc = w.data() + static_cast<std::size_t>(c) * stride;
            std::fill(zc, zc + n_, wc[p_]);
            for (Index j = 0; j < p_; ++j) {
                const f64 wjc = wc[j];
                if (wjc == 0.0) continue;
                const f32* xj = x.col(j);
                for (Index i = 0; i < n_; ++i) zc[i] += static_cast<f64>(xj[i]) * wjc;
            }
        }

        // Row softmax; z becomes the probability table, nll accumulates.
        f64 nll = 0.0;
        for (Index i = 0; i < n_; ++i) {
            f64 zmax = z[static_cast<std::size_t>(i)];
            for (Index c = 1; c < c_; ++c)
                zmax = std::max(zmax, z[static_cast<std::size_t>(c) * n_ + i]);
            f64 sum = 0.0;
            for (Index c = 0; c < c_; ++c) {
                f64& e = z[static_cast<std::size_t>(c) * n_ + i];
                e = std::exp(e - zmax);
                sum += e;
            }
            const f64 py = z[static_cast<std::size_t>(y[static_cast<std::size_t>(i)]) * n_ + i] / sum;
            nll -= std::log(py);
            for (Index c = 0; c < c_; ++c) z[static_cast<std::size_t>(c) * n_ + i] /= sum;
        }

        // Residual in place.
        for (Index i = 0; i < n_; ++i)
            z[static_cast<std::size_t>(y[static_cast<std::size_t>(i)]) * n_ + i] -= 1.0;

        const f64 inv_n = 1.0 / static_cast<f64>(n_);
        f64 penalty = 0.0;
        for (Index c = 0; c < c_; ++c) {
            const f64* zc = z.data() + static_cast<std::size_t>(c) * n_;
            const f64* wc = w.data() + static_cast<std::size_t>(c) * stride;
            f64* gc = grad.data() + static_cast<std::size_t>(c) * stride;
            for (Index j = 0; j < p_; ++j) {
                const f32* xj = x.col(j);
                f64 acc = 0.0;
                for (Index i = 0; i < n_; ++i) acc += static_cast<f64>(xj[i]) * zc[i];
                gc[j] = acc * inv_n + reg * inv_n * wc[j];
                penalty += wc[j] * wc[j];
            }
            f64 acc = 0.0;
            for (Index i = 0; i < n_; ++i) acc += zc[i];
            gc[p_] = acc * inv_n;  // bias: no penalty term
        }

        return nll * inv_n + 0.5 * reg * inv_n * penalty;
    }
};

}  // namespace

f64 logreg_objective(const DenseMatrix& x, const std::vector<Index>& y, Index n_classes,
                     const Buffer<f64>& w, f64 reg, Buffer<f64>& grad) {
    const Objective problem{x, y, n_classes, reg};
    if (w.size() != problem.dim()) {
        std::ostringstream os;
        os << "logreg_objective: parameter vector has " << w.size() << " entries, expected "
           << problem.dim();
        throw ShapeError(os.str());
    }
    grad.assign(problem.dim(), 0.0);
    Buffer<f64> z(static_cast<std::size_t>(x.rows()) * n_classes, 0.0);
    return problem.eval(w, grad, z);
}

LogRegModel train_logreg(const DenseMatrix& x, const std::vector<Index>& y,
                         Index n_classes, const LogRegConfig& cfg) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        std::ostringstream os;
        os << "train_logreg: " << x.rows() << " rows but " << y.size() << " labels";
        throw ShapeError(os.str());
    }
    if (x.rows() < 1) throw ShapeError("train_logreg: no samples");
    if (n_classes < 2) throw ShapeError("train_logreg: need at least 2 classes");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] < 0 || y[i] >= n_classes) {
            std::ostringstream os;
            os << "train_logreg: label " << y[i] << " at row " << i << " outside [0, "
               << n_classes << ")";
            throw ShapeError(os.str());
        }

    const Objective problem{x, y, n_classes, cfg.reg};
    const std::size_t dim = problem.dim();

    LogRegModel model;
    model.n_features = x.cols();
    model.n_classes = n_classes;
    model.w.assign(dim, 0.0);

    Buffer<f64> grad(dim, 0.0), z(static_cast<std::size_t>(x.rows()) * n_classes, 0.0);
    f64 obj = problem.eval(model.w, grad, z);

    // L-BFGS history, newest entries at the back.
    std::deque<Buffer<f64>> hist_s, hist_y;
    std::deque<f64> hist_rho;

    Buffer<f64> dir(dim, 0.0), w_next(dim, 0.0), grad_next(dim, 0.0);
    std::vector<f64> alpha;

    Index iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
        if (norm2(grad) <= cfg.tol * std::max(1.0, norm2(model.w))) {
            model.converged = true;
            break;
        }

        // Two-loop recursion; dir ends up as the descent direction.
        for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
        alpha.assign(hist_s.size(), 0.0);
        for (std::size_t h = hist_s.size(); h-- > 0;) {
            alpha[h] = hist_rho[h] * dot64(hist_s[h], dir);
            for (std::size_t i = 0; i < dim; ++i) dir[i] -= alpha[h] * hist_y[h][i];
        }
        if (!hist_s.empty()) {
            const f64 yy = dot64(hist_y.back(), hist_y.back());
            const f64 gamma = yy > 0.0 ? 1.0 / (hist_rho.back() * yy) : 1.0;
            for (std::size_t i = 0; i < dim; ++i) dir[i] *= gamma;
        }
        for (std::size_t h = 0; h < hist_s.size(); ++h) {
            const f64 beta = hist_rho[h] * dot64(hist_y[h], dir);
            for (std::size_t i = 0; i < dim; ++i)
                dir[i] += (alpha[h] - beta) * hist_s[h][i];
        }

        f64 slope = dot64(grad, dir);
        if (!(slope < 0.0)) {
            // Curvature went bad; fall back to steepest descent.
            for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
            slope = -dot64(grad, grad);
            hist_s.clear();
            hist_y.clear();
            hist_rho.clear();
        }

        // Armijo backtracking.
        f64 step = 1.0;
        f64 obj_next = obj;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            for (std::size_t i = 0; i < dim; ++i) w_next[i] = model.w[i] + step * dir[i];
            obj_next = problem.eval(w_next, grad_next, z);
            if (std::isfinite(obj_next) && obj_next <= obj + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no further progress possible at f64 resolution

        Buffer<f64> s(dim, 0.0), yv(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            s[i] = w_next[i] - model.w[i];
            yv[i] = grad_next[i] - grad[i];
        }
        const f64 sy = dot64(s, yv);
        if (sy > 1e-12 * norm2(s) * norm2(yv)) {
            hist_s.push_back(std::move(s));
            hist_y.push_back(std::move(yv));
            hist_rho.push_back(1.0 / sy);
            if (static_cast<Index>(hist_s.size()) > cfg.history) {
                hist_s.pop_front();
                hist_y.pop_front();
                hist_rho.pop_front();
            }
        }

        model.w.swap(w_next);
        grad.swap(grad_next);
        obj = obj_next;
    }

    if (!model.converged && norm2(grad) <= cfg.tol * std::max(1.0, norm2(model.w)))
        model.converged = true;
    model.iterations = iter;
    model.final_objective = obj;
    if (!model.converged) {
        std::ostringstream os;
        os << "logistic regression stopped after " << iter
           << " iterations without meeting the gradient tolerance";
        log::warn(os.str());
    }
    return model;
}

DenseMatrix predict_proba(const LogRegModel& model, const DenseMatrix& x) {
    if (x.cols() != model.n_features) {
        std::ostringstream os;
        os << "predict_proba: input has " << x.cols() << " features, model expects "
           << model.n_features;
        throw ShapeError(os.str());
    }
    const Index n = x.rows();
    const Index c_ = model.n_classes;
    const Index p_ = model.n_features;
    const std::size_t stride = static_cast<std::size_t>(p_ + 1);

    Buffer<f64> z(static_cast<std::size_t>(n) * c_, 0.0);
    for (Index c = 0; c < c_; ++c) {
        f64* zc = z.data() + static_cast<std::size_t>(c) * n;
        const f64* wc = model.w.data() + static_cast<std::size_t>(c) * stride;
        std::fill(zc, zc + n, wc[p_]);
        for (Index j = 0; j < p_; ++j) {
            const f64 wjc = wc[j];
            if (wjc == 0.0) continue;
            const f32* xj = x.col(j);
            for (Index i = 0; i < n; ++i) zc[i] += static_cast<f64>(xj[i]) * wjc;
        }
    }

    DenseMatrix proba(n, c_);
    for (Index i = 0; i < n; ++i) {
        f64 zmax = z[static_cast<std::size_t>(i)];
        for (Index c = 1; c < c_; ++c)
            zmax = std::max(zmax, z[static_cast<std::size_t>(c) * n + i]);
        f64 sum = 0.0;
        for (Index c = 0; c < c_; ++c) {
            f64& e = z[static_cast<std::size_t>(c) * n + i];
            e = std::exp(e - zmax);
            sum += e;
        }
        for (Index c = 0; c < c_; ++c)
            proba(i, c) = static_cast<f32>(z[static_cast<std::size_t>(c) * n + i] / sum);
        // Renormalize the narrowed row so downstream row-sum checks hold tight.
        f64 row = 0.0;
        for (Index c = 0; c < c_; ++c) row += static_cast<f64>(proba(i, c));
        for (Index c = 0; c < c_; ++c)
            proba(i, c) = static_cast<f32>(static_cast<f64>(proba(i, c)) / row);
    }
    return proba;
}

std::vector<Index> predict(const LogRegModel& model, const DenseMatrix& x) {
    const DenseMatrix proba = predict_proba(model, x);
    std::vector<Index> out(static_cast<std::size_t>(x.rows()), 0);
    for (Index i = 0; i < x.rows(); ++i) {
        Index best = 0;
        f32 best_p = proba(i, 0);
        for (Index c = 1; c < model.n_classes; ++c)
            if (proba(i, c) > best_p) {
                best_p = proba(i, c);
                best = c;
            }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

f64 multiclass_log_loss(const DenseMatrix& proba, const std::vector<Index>& y) {
    if (static_cast<std::size_t>(proba.rows()) != y.size()) {
        std::ostringstream os;
        os << "multiclass_log_loss: " << proba.rows() << " rows but " << y.size() << " labels";
        throw ShapeError(os.str());
    }
    if (proba.rows() < 1) throw ShapeError("multiclass_log_loss: no rows");
    const Index c_ = proba.cols();
    f64 loss = 0.0;
    for (Index i = 0; i < proba.rows(); ++i) {
        f64 row = 0.0;
        for (Index c = 0; c < c_; ++c) row += static_cast<f64>(proba(i, c));
        if (std::fabs(row - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "multiclass_log_loss: row " << i << " sums to " << row
               << ", not a probability vector";
            throw ShapeError(os.str());
        }
        const Index label = y[static_cast<std::size_t>(i)];
        if (label < 0 || label >= c_) {
            std::ostringstream os;
            os << "multiclass_log_loss: label " << label << " at row " << i << " outside [0, "
               << c_ << ")";
            throw ShapeError(os.str());
        }
        const f64 p = std::clamp(static_cast<f64>(proba(i, label)), 1e-15, 1.0 - 1e-15);
        loss -= std::log(p);
    }
    return loss / static_cast<f64>(proba.rows());
}

f64 error_rate(const std::vector<Index>& predicted, const std::vector<Index>& y) {
    if (predicted.size() != y.size())
        throw ShapeError("error_rate: prediction and label counts differ");
    if (predicted.empty()) throw ShapeError("error_rate: no predictions");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] != y[i]) ++wrong;
    return static_cast<f64>(wrong) / static_cast<f64>(predicted.size());
}

}  // namespace lsr
