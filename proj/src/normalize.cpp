#include "lsr/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "lsr/error.hpp"

namespace lsr {

const char* norm_mode_name(NormMode mode) {
    switch (mode) {
        case NormMode::none: return "none";
        case NormMode::dense: return "dense";
        case NormMode::sparse: return "sparse";
    }
    return "none";
}

NormMode norm_mode_from_name(const std::string& name) {
    if (name == "none") return NormMode::none;
    if (name == "dense") return NormMode::dense;
    if (name == "sparse") return NormMode::sparse;
    throw ConfigError("unknown normalization mode '" + name + "' (none|dense|sparse)");
}

namespace {

struct ColAcc {
    f64 sum = 0.0;
    f64 sumsq = 0.0;
    u64 count = 0;
};

// dense mode counts every entry (zeros of sparse slices contribute only to
// the count); sparse mode counts stored values only.
void accumulate(std::vector<ColAcc>& acc, const Matrix& m, NormMode mode) {
    const Index p = matrix_cols(m);
    if (const auto* d = std::get_if<DenseMatrix>(&m)) {
        for (Index j = 0; j < p; ++j) {
            auto& a = acc[static_cast<std::size_t>(j)];
            const f32* col = d->col(j);
            if (mode == NormMode::dense) {
                for (Index i = 0; i < d->rows(); ++i) {
                    const f64 v = col[i];
                    a.sum += v;
                    a.sumsq += v * v;
                }
                a.count += static_cast<u64>(d->rows());
            } else {
                for (Index i = 0; i < d->rows(); ++i) {
                    if (col[i] == 0.0f) continue;
                    const f64 v = col[i];
                    a.sum += v;
                    a.sumsq += v * v;
                    ++a.count;
                }
            }
        }
        return;
    }
    const auto& sp = std::get<SparseColMatrix>(m);
    for (Index j = 0; j < p; ++j) {
        auto& a = acc[static_cast<std::size_t>(j)];
        const auto vals = sp.col_vals(j);
        for (const f32 v : vals) {
            a.sum += v;
            a.sumsq += static_cast<f64>(v) * static_cast<f64>(v);
        }
        a.count += mode == NormMode::dense ? static_cast<u64>(sp.rows()) : vals.size();
    }
}

NormStats finalize_stats(const std::vector<ColAcc>& acc, NormMode mode,
                         std::span<const ColumnKind> kinds) {
    NormStats stats;
    stats.mode = mode;
    stats.mean.resize(acc.size());
    stats.sd.resize(acc.size());
    stats.column_kind.assign(kinds.begin(), kinds.end());
    for (std::size_t j = 0; j < acc.size(); ++j) {
        const auto& a = acc[j];
        if (a.count == 0) {
            stats.mean[j] = 0.0;
            stats.sd[j] = 0.0;
            continue;
        }
        const f64 mean = a.sum / static_cast<f64>(a.count);
        const f64 var = std::max(0.0, a.sumsq / static_cast<f64>(a.count) - mean * mean);
        stats.mean[j] = mean;
        stats.sd[j] = std::sqrt(var);
    }
    return stats;
}

void check_fit_args(Index p, NormMode mode, std::span<const ColumnKind> kinds) {
    if (mode != NormMode::dense && mode != NormMode::sparse)
        throw ConfigError("fit_norm requires mode dense or sparse");
    if (static_cast<Index>(kinds.size()) != p)
        throw ShapeError("fit_norm: column_kinds length does not match column count");
}

void check_apply_args(Index p, const NormStats& stats) {
    if (stats.cols() != p)
        throw shape_mismatch("apply_norm", 0, p, 0, stats.cols());
    if (stats.sd.size() != stats.mean.size() ||
        stats.column_kind.size() != stats.mean.size())
        throw ShapeError("apply_norm: inconsistent stats arrays");
}

// (v - mean) / (2 sd), evaluated in f64; constant columns collapse to 0.
inline f32 standardize(f32 v, f64 mean, f64 sd) {
    if (sd == 0.0) return 0.0f;
    return static_cast<f32>((static_cast<f64>(v) - mean) / (2.0 * sd));
}

}  // namespace

NormStats fit_norm(const SliceStore& store, NormMode mode,
                   std::span<const ColumnKind> column_kinds) {
    check_fit_args(store.cols(), mode, column_kinds);
    std::vector<ColAcc> acc(static_cast<std::size_t>(store.cols()));
    SliceStream stream(store);
    Index s;
    Matrix m;
    while (stream.next(s, m)) accumulate(acc, m, mode);
    return finalize_stats(acc, mode, column_kinds);
}

NormStats fit_norm(const Matrix& x, NormMode mode,
                   std::span<const ColumnKind> column_kinds) {
    check_fit_args(matrix_cols(x), mode, column_kinds);
    std::vector<ColAcc> acc(static_cast<std::size_t>(matrix_cols(x)));
    accumulate(acc, x, mode);
    return finalize_stats(acc, mode, column_kinds);
}

NormStats fit_norm(const SliceStore& store, NormMode mode) {
    const std::vector<ColumnKind> kinds(static_cast<std::size_t>(store.cols()),
                                        ColumnKind::continuous);
    return fit_norm(store, mode, kinds);
}

NormStats fit_norm(const Matrix& x, NormMode mode) {
    const std::vector<ColumnKind> kinds(static_cast<std::size_t>(matrix_cols(x)),
                                        ColumnKind::continuous);
    return fit_norm(x, mode, kinds);
}

DenseMatrix apply_norm(const DenseMatrix& x, const NormStats& stats) {
    check_apply_args(x.cols(), stats);
    DenseMatrix out = x;
    if (stats.mode == NormMode::none) return out;
    for (Index j = 0; j < x.cols(); ++j) {
        const auto idx = static_cast<std::size_t>(j);
        if (stats.mode == NormMode::sparse) {
            if (stats.column_kind[idx] == ColumnKind::binary) continue;
            f32* col = out.col(j);
            for (Index i = 0; i < out.rows(); ++i) {
                if (col[i] == 0.0f) continue;  // unstored in spirit: zeros stay zero
                col[i] = standardize(col[i], stats.mean[idx], stats.sd[idx]);
            }
        } else {
            f32* col = out.col(j);
            for (Index i = 0; i < out.rows(); ++i)
                col[i] = standardize(col[i], stats.mean[idx], stats.sd[idx]);
        }
    }
    return out;
}

SparseColMatrix apply_norm(const SparseColMatrix& x, const NormStats& stats) {
    check_apply_args(x.cols(), stats);
    if (stats.mode == NormMode::dense)
        throw ConfigError("dense-mode normalization of a sparse matrix densifies; "
                          "use the Matrix overload");
    SparseColMatrix out = x;
    if (stats.mode == NormMode::none) return out;
    for (Index j = 0; j < x.cols(); ++j) {
        const auto idx = static_cast<std::size_t>(j);
        if (stats.column_kind[idx] == ColumnKind::binary) continue;
        for (f32& v : out.col_vals_mut(j))
            v = standardize(v, stats.mean[idx], stats.sd[idx]);
    }
    return out;
}

Matrix apply_norm(const Matrix& x, const NormStats& stats) {
    if (stats.mode == NormMode::dense) return apply_norm(densify(x), stats);
    if (const auto* d = std::get_if<DenseMatrix>(&x)) return apply_norm(*d, stats);
    return apply_norm(std::get<SparseColMatrix>(x), stats);
}

SliceStore apply_norm(const SliceStore& store, const NormStats& stats,
                      const std::filesystem::path& out_dir) {
    check_apply_args(store.cols(), stats);
    const StorageKind out_kind =
        stats.mode == NormMode::dense ? StorageKind::dense : store.kind();
    SliceStore out = SliceStore::create(out_dir, store.cols(), out_kind);
    SliceStream stream(store);
    Index s;
    Matrix m;
    while (stream.next(s, m)) out.append(apply_norm(m, stats));
    out.finalize();
    return out;
}

namespace {

void detect_in(std::vector<u8>& non_binary, std::vector<u8>& has_value, const Matrix& m) {
    const Index p = matrix_cols(m);
    for (Index j = 0; j < p; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        auto scan = [&](const f32 v) {
            has_value[idx] = 1;
            if (v != 0.0f && v != 1.0f) non_binary[idx] = 1;
        };
        if (const auto* d = std::get_if<DenseMatrix>(&m)) {
            const f32* col = d->col(j);
            for (Index i = 0; i < d->rows(); ++i) scan(col[i]);
        } else {
            for (const f32 v : std::get<SparseColMatrix>(m).col_vals(j)) scan(v);
        }
    }
}

std::vector<ColumnKind> detect_finish(const std::vector<u8>& non_binary,
                                      const std::vector<u8>& has_value) {
    std::vector<ColumnKind> kinds(non_binary.size(), ColumnKind::continuous);
    for (std::size_t j = 0; j < kinds.size(); ++j)
        if (has_value[j] && !non_binary[j]) kinds[j] = ColumnKind::binary;
    return kinds;
}

}  // namespace

std::vector<ColumnKind> detect_column_kinds(const SliceStore& store) {
    std::vector<u8> non_binary(static_cast<std::size_t>(store.cols()), 0);
    std::vector<u8> has_value(static_cast<std::size_t>(store.cols()), 0);
    SliceStream stream(store);
    Index s;
    Matrix m;
    while (stream.next(s, m)) detect_in(non_binary, has_value, m);
    return detect_finish(non_binary, has_value);
}

std::vector<ColumnKind> detect_column_kinds(const Matrix& x) {
    std::vector<u8> non_binary(static_cast<std::size_t>(matrix_cols(x)), 0);
    std::vector<u8> has_value(static_cast<std::size_t>(matrix_cols(x)), 0);
    detect_in(non_binary, has_value, x);
    return detect_finish(non_binary, has_value);
}

void save_norm(const NormStats& stats, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "norm-stats";
    j["version"] = 1;
    j["mode"] = norm_mode_name(stats.mode);
    j["mean"] = stats.mean;
    j["sd"] = stats.sd;
    auto kinds = nlohmann::json::array();
    for (const ColumnKind k : stats.column_kind)
        kinds.push_back(k == ColumnKind::binary ? "binary" : "continuous");
    j["column_kind"] = std::move(kinds);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write norm stats: " + path.string());
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw StorageError("write failure on norm stats: " + path.string());
}

NormStats load_norm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("norm stats not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("malformed norm stats " + path.string() + ": " + e.what());
    }
    NormStats stats;
    try {
        if (j.at("format") != "norm-stats" || j.at("version") != 1)
            throw StorageError("not a norm-stats file: " + path.string());
        stats.mode = norm_mode_from_name(j.at("mode"));
        stats.mean = j.at("mean").get<std::vector<f64>>();
        stats.sd = j.at("sd").get<std::vector<f64>>();
        for (const auto& k : j.at("column_kind")) {
            const std::string name = k;
            if (name == "binary")
                stats.column_kind.push_back(ColumnKind::binary);
            else if (name == "continuous")
                stats.column_kind.push_back(ColumnKind::continuous);
            else
                throw StorageError("unknown column kind '" + name + "' in " + path.string());
        }
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("malformed norm stats " + path.string() + ": " + e.what());
    }
    if (stats.sd.size() != stats.mean.size() ||
        stats.column_kind.size() != stats.mean.size())
        throw StorageError("inconsistent norm stats arrays in " + path.string());
    return stats;
}

}  // namespace lsr
