#pragma once

// The head-to-head harness: random projection versus single-pass
// randomized PCA as preprocessing for logistic regression, swept over
// target dimensions and sketch seeds.
//
// Per cell (one K, one seed, one method):
//   normalize on train stats -> fit projection on train -> project train
//   and test -> renormalize on projected-train stats -> train classifier
//   -> score on test. Test rows never influence any fitted statistic.
//
// A cell that throws is recorded as failed with the error text and the
// sweep moves on; a half-finished sweep is still a report.

#include <filesystem>
#include <string>
#include <vector>

#include "lsr/logreg.hpp"
#include "lsr/normalize.hpp"
#include "lsr/rpca.hpp"
#include "lsr/synthetic.hpp"

namespace lsr {

struct SplitIndices {
    std::vector<Index> train;  // ascending row ids
    std::vector<Index> test;
};

// Seeded shuffle, then the first ceil(test_fraction*n) rows become the
// test set. Indices come back sorted.
SplitIndices holdout_split(Index n, f64 test_fraction, u64 seed);

// Seeded shuffle dealt round-robin into `folds` test sets.
std::vector<SplitIndices> kfold_splits(Index n, Index folds, u64 seed);

struct EvalConfig {
    std::vector<Index> k_values;
    std::vector<u64> seeds;  // sketch seeds; both methods share each seed
    NormMode norm_mode = NormMode::dense;
    OversampleMode oversampling;  // sketch width policy for the lsrpca cells
    Index folds = 1;         // 1 = single holdout split; >= 2 = k-fold CV
    f64 test_fraction = 0.2; // holdout size when folds == 1
    u64 split_seed = 0;
    Index max_rows_per_slice = 1024;  // slice granularity of the streaming path
    LogRegConfig logreg;
};

// Timing fields are observability only; report serialization leaves them
// out so reruns with one seed are byte-identical.
struct EvalCell {
    Index k = 0;
    u64 seed = 0;
    Index fold = 0;
    Method method = Method::rp;
    bool ok = false;
    f64 error = 0.0;
    f64 log_loss = 0.0;
    bool logreg_converged = false;
    f64 fit_seconds = 0.0;
    f64 train_seconds = 0.0;
    std::string note;  // error text for failed cells
};

// Means and population sds over the (seed, fold) pairs where both methods
// succeeded.
struct EvalAggregate {
    Index k = 0;
    Index pairs = 0;
    f64 error_rp = 0.0;
    f64 error_lsrpca = 0.0;
    f64 sd_error_rp = 0.0;
    f64 sd_error_lsrpca = 0.0;
    f64 log_loss_rp = 0.0;
    f64 log_loss_lsrpca = 0.0;
    f64 sd_log_loss_rp = 0.0;
    f64 sd_log_loss_lsrpca = 0.0;
    f64 error_reduction = 0.0;  // (error_rp - error_lsrpca) / error_rp on the means
};

struct EvalReport {
    Index n_rows = 0;
    Index p = 0;
    Index n_classes = 0;
    Index folds = 1;
    std::vector<EvalCell> cells;

    std::vector<EvalAggregate> aggregates() const;
};

EvalReport run_comparison(const LabeledDataset& data, const EvalConfig& cfg,
                          const std::filesystem::path& scratch);

// One row per cell, numbers in %.10g, byte-stable across reruns.
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
// Dimensions, cells, and aggregates in one JSON document.
void write_report_json(const EvalReport& report, const std::filesystem::path& path);
// Rebuild a report (cells; aggregates recompute on demand) from its JSON.
EvalReport read_report_json(const std::filesystem::path& path);
// Curve table: one row per (k, method) with mean, sd, and the error
// reduction in percent. Ready for plotting.
std::string plotdata_csv(const EvalReport& report);

}  // namespace lsr
