#include "lsr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "lsr/error.hpp"
#include "lsr/matmul.hpp"
#include "lsr/rng.hpp"
#include "lsr/slice_store.hpp"

namespace lsr {
namespace {

std::vector<Index> shuffled_indices(Index n, u64 seed) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    rng::Stream stream(seed);
    for (Index i = n - 1; i > 0; --i) {
        const Index j = static_cast<Index>(stream.next_below(static_cast<u64>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

DenseMatrix take_rows(const DenseMatrix& x, const std::vector<Index>& rows) {
    DenseMatrix out(static_cast<Index>(rows.size()), x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const f32* src = x.col(j);
        f32* dst = out.col(j);
        for (std::size_t t = 0; t < rows.size(); ++t)
            dst[t] = src[rows[t]];
    }
    return out;
}

std::vector<Index> take_labels(const std::vector<Index>& labels,
                               const std::vector<Index>& rows) {
    std::vector<Index> out(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        out[t] = labels[static_cast<std::size_t>(rows[t])];
    return out;
}

// The train/test hygiene assertion: disjoint, jointly exhaustive, sorted.
void check_split(const SplitIndices& split, Index n) {
    if (split.train.empty() || split.test.empty())
        throw Error("internal: degenerate train/test split");
    if (split.train.size() + split.test.size() != static_cast<std::size_t>(n))
        throw Error("internal: split does not cover the data");
    std::size_t a = 0, b = 0;
    while (a < split.train.size() && b < split.test.size()) {
        if (split.train[a] == split.test[b])
            throw Error("internal: row in both train and test");
        if (split.train[a] < split.test[b])
            ++a;
        else
            ++b;
    }
}

std::string num(f64 v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

f64 seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<f64>(std::chrono::steady_clock::now() - t0).count();
}

struct MeanSd {
    f64 mean = 0.0;
    f64 sd = 0.0;
};

MeanSd mean_sd(const std::vector<f64>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    for (f64 x : xs) out.mean += x;
    out.mean /= static_cast<f64>(xs.size());
    f64 ss = 0.0;
    for (f64 x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<f64>(xs.size()));
    return out;
}

}  // namespace

SplitIndices holdout_split(Index n, f64 test_fraction, u64 seed) {
    if (n < 2) throw ShapeError("holdout_split: need at least 2 rows");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("holdout_split: test_fraction must lie strictly between 0 and 1");
    const std::vector<Index> perm = shuffled_indices(n, seed);
    Index n_test = static_cast<Index>(std::ceil(test_fraction * static_cast<f64>(n)));
    n_test = std::clamp<Index>(n_test, 1, n - 1);

    SplitIndices split;
    split.test.assign(perm.begin(), perm.begin() + n_test);
    split.train.assign(perm.begin() + n_test, perm.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

std::vector<SplitIndices> kfold_splits(Index n, Index folds, u64 seed) {
    if (folds < 2) throw ConfigError("kfold_splits: need at least 2 folds");
    if (folds > n) throw ShapeError("kfold_splits: more folds than rows");
    const std::vector<Index> perm = shuffled_indices(n, seed);
    std::vector<SplitIndices> out(static_cast<std::size_t>(folds));
    for (Index pos = 0; pos < n; ++pos)
        out[static_cast<std::size_t>(pos % folds)].test.push_back(
            perm[static_cast<std::size_t>(pos)]);
    for (Index f = 0; f < folds; ++f) {
        SplitIndices& s = out[static_cast<std::size_t>(f)];
        std::sort(s.test.begin(), s.test.end());
        std::size_t cursor = 0;
        for (Index i = 0; i < n; ++i) {
            if (cursor < s.test.size() && s.test[cursor] == i) {
                ++cursor;
                continue;
            }
            s.train.push_back(i);
        }
    }
    return out;
}

EvalReport run_comparison(const LabeledDataset& data, const EvalConfig& cfg,
                          const std::filesystem::path& scratch) {
    const Index n = data.x.rows();
    if (static_cast<std::size_t>(n) != data.labels.size())
        throw ShapeError("run_comparison: row and label counts differ");
    if (data.n_classes < 2) throw ShapeError("run_comparison: need at least 2 classes");
    {
        std::vector<Index> counts(static_cast<std::size_t>(data.n_classes), 0);
        for (Index label : data.labels) {
            if (label < 0 || label >= data.n_classes)
                throw ShapeError("run_comparison: label outside [0, n_classes)");
            ++counts[static_cast<std::size_t>(label)];
        }
        for (Index c = 0; c < data.n_classes; ++c)
            if (counts[static_cast<std::size_t>(c)] == 0) {
                std::ostringstream os;
                os << "run_comparison: class " << c << " has no samples";
                throw ShapeError(os.str());
            }
    }
    if (cfg.k_values.empty()) throw ConfigError("run_comparison: no k values to sweep");
    if (cfg.seeds.empty()) throw ConfigError("run_comparison: no seeds to sweep");
    for (Index k : cfg.k_values)
        if (k < 1) throw ConfigError("run_comparison: k values must be positive");
    if (cfg.folds < 1) throw ConfigError("run_comparison: folds must be at least 1");
    if (cfg.max_rows_per_slice < 1)
        throw ConfigError("run_comparison: max_rows_per_slice must be at least 1");

    std::vector<SplitIndices> splits;
    if (cfg.folds == 1)
        splits.push_back(holdout_split(n, cfg.test_fraction, cfg.split_seed));
    else
        splits = kfold_splits(n, cfg.folds, cfg.split_seed);

    EvalReport report;
    report.n_rows = n;
    report.p = data.x.cols();
    report.n_classes = data.n_classes;
    report.folds = static_cast<Index>(splits.size());

    const Method methods[2] = {Method::rp, Method::ls_rpca};

    for (std::size_t f = 0; f < splits.size(); ++f) {
        const SplitIndices& split = splits[f];
        check_split(split, n);

        // Normalization statistics come from training rows only; the test
        // block is transformed with those statistics, never refit.
        DenseMatrix train = take_rows(data.x, split.train);
        DenseMatrix test = take_rows(data.x, split.test);
        const std::vector<Index> y_train = take_labels(data.labels, split.train);
        const std::vector<Index> y_test = take_labels(data.labels, split.test);

        if (cfg.norm_mode != NormMode::none) {
            const NormStats stats = fit_norm(Matrix(train), cfg.norm_mode);
            train = apply_norm(train, stats);
            test = apply_norm(test, stats);
        }

        // The streaming path reads the normalized training rows from a
        // slice store, the same bytes the in-core rp path sees.
        const SliceStore store =
            partition(Matrix(train), cfg.max_rows_per_slice,
                      scratch / ("fold_" + std::to_string(f)));

        for (Index k : cfg.k_values) {
            for (u64 seed : cfg.seeds) {
                for (Method method : methods) {
                    EvalCell cell;
                    cell.k = k;
                    cell.seed = seed;
                    cell.fold = static_cast<Index>(f);
                    cell.method = method;
                    try {
                        const auto t_fit = std::chrono::steady_clock::now();
                        ProjectionModel model;
                        if (method == Method::rp) {
                            model = make_rp_model(report.p, k, seed);
                        } else {
                            model = ls_rpca(store, k, cfg.oversampling.kbar_for(k), seed);
                            model.oversampling = cfg.oversampling;
                        }
                        cell.fit_seconds = seconds_since(t_fit);

                        DenseMatrix train_z = matmul(train, model.v);
                        DenseMatrix test_z = matmul(test, model.v);

                        // Projected coordinates get their own dense-mode
                        // standardization, again fit on train only.
                        const NormStats zstats = fit_norm(Matrix(train_z), NormMode::dense);
                        train_z = apply_norm(train_z, zstats);
                        test_z = apply_norm(test_z, zstats);

                        const auto t_train = std::chrono::steady_clock::now();
                        const LogRegModel lr =
                            train_logreg(train_z, y_train, data.n_classes, cfg.logreg);
                        cell.train_seconds = seconds_since(t_train);
                        cell.logreg_converged = lr.converged;

                        const DenseMatrix proba = predict_proba(lr, test_z);
                        std::vector<Index> pred(static_cast<std::size_t>(test_z.rows()), 0);
                        for (Index i = 0; i < test_z.rows(); ++i) {
                            Index best = 0;
                            for (Index c = 1; c < data.n_classes; ++c)
                                if (proba(i, c) > proba(i, best)) best = c;
                            pred[static_cast<std::size_t>(i)] = best;
                        }
                        cell.error = error_rate(pred, y_test);
                        cell.log_loss = multiclass_log_loss(proba, y_test);
                        cell.ok = true;
                    } catch (const std::exception& e) {
                        cell.ok = false;
                        cell.note = e.what();
                    }
                    report.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

std::vector<EvalAggregate> EvalReport::aggregates() const {
    std::vector<Index> ks;
    for (const EvalCell& cell : cells)
        if (std::find(ks.begin(), ks.end(), cell.k) == ks.end()) ks.push_back(cell.k);

    std::vector<EvalAggregate> out;
    for (Index k : ks) {
        EvalAggregate agg;
        agg.k = k;

        // One pair per (seed, fold) where both methods finished.
        std::vector<std::pair<u64, Index>> keys;
        for (const EvalCell& cell : cells) {
            if (cell.k != k) continue;
            const std::pair<u64, Index> key{cell.seed, cell.fold};
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }

        std::vector<f64> err_rp, err_ls, ll_rp, ll_ls;
        for (const auto& key : keys) {
            const EvalCell* rp = nullptr;
            const EvalCell* ls = nullptr;
            for (const EvalCell& cell : cells) {
                if (cell.k != k || cell.seed != key.first || cell.fold != key.second ||
                    !cell.ok)
                    continue;
                if (cell.method == Method::rp) rp = &cell;
                if (cell.method == Method::ls_rpca) ls = &cell;
            }
            if (!rp || !ls) continue;
            err_rp.push_back(rp->error);
            err_ls.push_back(ls->error);
            ll_rp.push_back(rp->log_loss);
            ll_ls.push_back(ls->log_loss);
        }

        agg.pairs = static_cast<Index>(err_rp.size());
        const MeanSd e_rp = mean_sd(err_rp), e_ls = mean_sd(err_ls);
        const MeanSd l_rp = mean_sd(ll_rp), l_ls = mean_sd(ll_ls);
        agg.error_rp = e_rp.mean;
        agg.sd_error_rp = e_rp.sd;
        agg.error_lsrpca = e_ls.mean;
        agg.sd_error_lsrpca = e_ls.sd;
        agg.log_loss_rp = l_rp.mean;
        agg.sd_log_loss_rp = l_rp.sd;
        agg.log_loss_lsrpca = l_ls.mean;
        agg.sd_log_loss_lsrpca = l_ls.sd;
        if (agg.pairs > 0 && agg.error_rp > 0.0)
            agg.error_reduction = (agg.error_rp - agg.error_lsrpca) / agg.error_rp;
        out.push_back(agg);
    }
    return out;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write report: " + path.string());
    out << "k,seed,fold,method,status,error_rate,log_loss,logreg_converged,note\n";
    for (const EvalCell& cell : report.cells) {
        out << cell.k << ',' << cell.seed << ',' << cell.fold << ','
            << method_name(cell.method) << ',' << (cell.ok ? "ok" : "failed") << ','
            << num(cell.error) << ',' << num(cell.log_loss) << ','
            << (cell.logreg_converged ? 1 : 0) << ',' << csv_quote(cell.note) << '\n';
    }
    if (!out) throw StorageError("short write to report: " + path.string());
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["format"] = "comparison-report";
    doc["version"] = 1;
    doc["n_rows"] = report.n_rows;
    doc["p"] = report.p;
    doc["n_classes"] = report.n_classes;
    doc["folds"] = report.folds;

    nlohmann::json cells = nlohmann::json::array();
    for (const EvalCell& cell : report.cells) {
        nlohmann::json c;
        c["k"] = cell.k;
        c["seed"] = cell.seed;
        c["fold"] = cell.fold;
        c["method"] = method_name(cell.method);
        c["ok"] = cell.ok;
        c["error_rate"] = cell.error;
        c["log_loss"] = cell.log_loss;
        c["logreg_converged"] = cell.logreg_converged;
        if (!cell.note.empty()) c["note"] = cell.note;
        cells.push_back(std::move(c));
    }
    doc["cells"] = std::move(cells);

    nlohmann::json aggs = nlohmann::json::array();
    for (const EvalAggregate& agg : report.aggregates()) {
        nlohmann::json a;
        a["k"] = agg.k;
        a["pairs"] = agg.pairs;
        a["error_rp"] = agg.error_rp;
        a["error_lsrpca"] = agg.error_lsrpca;
        a["sd_error_rp"] = agg.sd_error_rp;
        a["sd_error_lsrpca"] = agg.sd_error_lsrpca;
        a["log_loss_rp"] = agg.log_loss_rp;
        a["log_loss_lsrpca"] = agg.log_loss_lsrpca;
        a["sd_log_loss_rp"] = agg.sd_log_loss_rp;
        a["sd_log_loss_lsrpca"] = agg.sd_log_loss_lsrpca;
        a["error_reduction"] = agg.error_reduction;
        aggs.push_back(std::move(a));
    }
    doc["aggregates"] = std::move(aggs);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write report: " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw StorageError("short write to report: " + path.string());
}

EvalReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open report: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("bad report JSON in " + path.string() + ": " + e.what());
    }

    EvalReport report;
    try {
        if (doc.at("format") != "comparison-report" || doc.at("version") != 1)
            throw StorageError("unsupported report format in " + path.string());
        report.n_rows = doc.at("n_rows").get<Index>();
        report.p = doc.at("p").get<Index>();
        report.n_classes = doc.at("n_classes").get<Index>();
        report.folds = doc.at("folds").get<Index>();
        for (const nlohmann::json& c : doc.at("cells")) {
            EvalCell cell;
            cell.k = c.at("k").get<Index>();
            cell.seed = c.at("seed").get<u64>();
            cell.fold = c.at("fold").get<Index>();
            cell.method = method_from_name(c.at("method").get<std::string>());
            cell.ok = c.at("ok").get<bool>();
            cell.error = c.at("error_rate").get<f64>();
            cell.log_loss = c.at("log_loss").get<f64>();
            cell.logreg_converged = c.at("logreg_converged").get<bool>();
            cell.note = c.value("note", std::string());
            report.cells.push_back(std::move(cell));
        }
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("bad report JSON in " + path.string() + ": " + e.what());
    }
    return report;
}

std::string plotdata_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "k,method,pairs,mean_error,sd_error,mean_log_loss,sd_log_loss,"
           "error_reduction_pct\n";
    for (const EvalAggregate& agg : report.aggregates()) {
        const f64 pct = 100.0 * agg.error_reduction;
        out << agg.k << ",rp," << agg.pairs << ',' << num(agg.error_rp) << ','
            << num(agg.sd_error_rp) << ',' << num(agg.log_loss_rp) << ','
            << num(agg.sd_log_loss_rp) << ',' << num(pct) << '\n';
        out << agg.k << ",lsrpca," << agg.pairs << ',' << num(agg.error_lsrpca) << ','
            << num(agg.sd_error_lsrpca) << ',' << num(agg.log_loss_lsrpca) << ','
            << num(agg.sd_log_loss_lsrpca) << ',' << num(pct) << '\n';
    }
    return std::move(out).str();
}

}  // namespace lsr
