#include "lsr/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lsr/error.hpp"
#include "lsr/log.hpp"

namespace lsr::linalg {

namespace {

f64 off_diagonal_norm(const Buffer<f64>& a, Index n) {
    f64 s = 0.0;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < j; ++i) {
            const f64 v = a[static_cast<std::size_t>(j * n + i)];
            s += 2.0 * v * v;
        }
    return std::sqrt(s);
}

}  // namespace

EigenResult jacobi_eigen(Buffer<f64> a, Index n) {
    if (n < 0 || static_cast<Index>(a.size()) != n * n)
        throw ShapeError("jacobi_eigen: matrix buffer does not match n*n");

    Buffer<f64> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i * n + i)] = 1.0;

    auto at = [&](Index i, Index j) -> f64& {
        return a[static_cast<std::size_t>(j * n + i)];
    };
    auto vat = [&](Index i, Index j) -> f64& {
        return v[static_cast<std::size_t>(j * n + i)];
    };

    f64 norm = 0.0;
    for (const f64 x : a) norm += x * x;
    norm = std::sqrt(norm);
    const f64 tol = 1e-14 * std::max(norm, 1e-300);

    constexpr int kMaxSweeps = 60;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a, n) <= tol) break;
        for (Index p = 0; p + 1 < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const f64 apq = at(p, q);
                if (apq == 0.0) continue;
                const f64 app = at(p, p);
                const f64 aqq = at(q, q);
                const f64 tau = (aqq - app) / (2.0 * apq);
                const f64 t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                         : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const f64 c = 1.0 / std::sqrt(1.0 + t * t);
                const f64 s = t * c;

                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (Index k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const f64 akp = at(k, p);
                    const f64 akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(p, k) = at(k, p);
                    at(k, q) = s * akp + c * akq;
                    at(q, k) = at(k, q);
                }
                for (Index k = 0; k < n; ++k) {
                    const f64 vkp = vat(k, p);
                    const f64 vkq = vat(k, q);
                    vat(k, p) = c * vkp - s * vkq;
                    vat(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps)
        log::warn("jacobi_eigen: convergence threshold not reached after " +
                  std::to_string(kMaxSweeps) + " sweeps");

    // Stable descending sort keeps tie order deterministic.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
        return at(x, x) > at(y, y);
    });

    EigenResult result;
    result.values.resize(static_cast<std::size_t>(n));
    result.vectors.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        result.values[static_cast<std::size_t>(i)] = at(order[static_cast<std::size_t>(i)],
                                                        order[static_cast<std::size_t>(i)]);
        const f64* src = v.data() + static_cast<std::size_t>(order[static_cast<std::size_t>(i)] * n);
        f64* dst = result.vectors.data() + static_cast<std::size_t>(i * n);
        std::copy(src, src + n, dst);
    }
    return result;
}

}  // namespace lsr::linalg
