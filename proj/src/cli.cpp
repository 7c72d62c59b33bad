#include "lsr/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "lsr/config.hpp"
#include "lsr/error.hpp"
#include "lsr/eval.hpp"
#include "lsr/io/csv.hpp"
#include "lsr/io/matrix_market.hpp"
#include "lsr/log.hpp"
#include "lsr/normalize.hpp"
#include "lsr/rng.hpp"
#include "lsr/rpca.hpp"
#include "lsr/slice_store.hpp"
#include "lsr/synthetic.hpp"

namespace lsr {

namespace fs = std::filesystem;

namespace {

fs::path scratch_root(const std::string& override_path) {
    if (!override_path.empty()) return fs::path(override_path);
    if (const char* env = std::getenv("LSRPCA_SCRATCH"); env && *env) return fs::path(env);
    return fs::temp_directory_path() / "lsrpca-scratch";
}

// Wall time plus bytes read per phase, so a log alone shows whether a
// phase touched the data and how often.
class PhaseLog {
public:
    explicit PhaseLog(const char* name, const SliceStore* store = nullptr)
        : name_(name), store_(store),
          bytes0_(store ? store->payload_bytes_read() : 0),
          t0_(std::chrono::steady_clock::now()) {}

    void done() const {
        const f64 secs =
            std::chrono::duration<f64>(std::chrono::steady_clock::now() - t0_).count();
        char buf[160];
        if (store_)
            std::snprintf(buf, sizeof(buf), "%s: %.3f s, %llu bytes read", name_, secs,
                          static_cast<unsigned long long>(store_->payload_bytes_read() -
                                                          bytes0_));
        else
            std::snprintf(buf, sizeof(buf), "%s: %.3f s", name_, secs);
        log::info(buf);
    }

private:
    const char* name_;
    const SliceStore* store_;
    u64 bytes0_;
    std::chrono::steady_clock::time_point t0_;
};

void write_labels_file(const fs::path& path, const std::vector<Index>& labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write labels file: " + path.string());
    for (Index label : labels) out << label << '\n';
    if (!out) throw StorageError("short write to labels file: " + path.string());
}

DenseMatrix densify_store(const SliceStore& store) {
    DenseMatrix x(store.n_total(), store.cols());
    SliceStream stream(store);
    Matrix slice;
    Index index = 0;
    Index row = 0;
    while (stream.next(index, slice)) {
        const DenseMatrix d = densify(slice);
        for (Index j = 0; j < d.cols(); ++j)
            std::memcpy(x.col(j) + row, d.col(j),
                        static_cast<std::size_t>(d.rows()) * sizeof(f32));
        row += d.rows();
        slice = Matrix{};
    }
    return x;
}

bool ends_with(const std::string& s, const char* suffix) {
    const std::size_t n = std::strlen(suffix);
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

int usage_error(const std::string& msg) {
    std::cerr << "usage error: " << msg << '\n';
    return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"streaming dimensionality reduction: random projections and "
                 "single-pass randomized PCA over slice stores"};
    app.name("lsrpca");
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "suppress info logging (warnings still print)");

    // ingest
    std::string in_input, in_format = "auto", in_output, in_labels_out;
    bool in_synthetic = false;
    Index in_n = 1000, in_p = 100, in_rank = 20, in_classes = 2, in_slice_rows = 1024;
    f64 in_noise = 0.1;
    u64 in_seed = 0;
    CLI::App* ingest =
        app.add_subcommand("ingest", "convert a matrix file, or synthesize data, into a slice store");
    ingest->add_option("--input", in_input, "Matrix Market (.mtx) or CSV input file");
    ingest->add_option("--format", in_format, "input format when not inferable from the extension")
        ->check(CLI::IsMember({"auto", "mtx", "csv"}));
    ingest->add_flag("--synthetic", in_synthetic, "generate a labeled synthetic dataset instead");
    ingest->add_option("--n", in_n, "synthetic: rows");
    ingest->add_option("--p", in_p, "synthetic: columns");
    ingest->add_option("--rank", in_rank, "synthetic: latent rank");
    ingest->add_option("--classes", in_classes, "synthetic: class count");
    ingest->add_option("--noise-sd", in_noise, "synthetic: ambient noise level");
    ingest->add_option("--labels-out", in_labels_out,
                       "synthetic: label file path (default <output>/labels.txt)");
    ingest->add_option("--slice-rows", in_slice_rows, "max rows per slice");
    ingest->add_option("--seed", in_seed, "root seed (synthesis derives a sub-seed)");
    ingest->add_option("--output", in_output, "store directory")->required();

    // normalize
    std::string no_input, no_output, no_mode = "dense", no_stats;
    CLI::App* normalize =
        app.add_subcommand("normalize", "standardize a store column-wise onto a new store");
    normalize->add_option("--input", no_input, "store directory")->required();
    normalize->add_option("--output", no_output, "output store directory")->required();
    normalize->add_option("--mode", no_mode, "dense or sparse normalization semantics")
        ->check(CLI::IsMember({"dense", "sparse"}));
    normalize->add_option("--stats-out", no_stats,
                          "statistics file path (default <output>/norm.json)");

    // fit
    std::string f_input, f_output, f_method = "lsrpca", f_oversample = "minimal";
    Index f_k = 0;
    u64 f_seed = 0;
    CLI::App* fit = app.add_subcommand("fit", "fit a projection model on a store");
    fit->add_option("--input", f_input, "store directory")->required();
    fit->add_option("--output", f_output, "model file path")->required();
    fit->add_option("--method", f_method, "rp or lsrpca")
        ->check(CLI::IsMember({"rp", "lsrpca"}));
    fit->add_option("--k", f_k, "target dimensionality")->required();
    fit->add_option("--oversample", f_oversample, "minimal, double, or fixed:N");
    fit->add_option("--seed", f_seed, "sketch seed");

    // project
    std::string pr_model, pr_input, pr_output;
    CLI::App* project_cmd =
        app.add_subcommand("project", "apply a fitted model to a store, slice by slice");
    project_cmd->add_option("--model", pr_model, "model file")->required();
    project_cmd->add_option("--input", pr_input, "store directory")->required();
    project_cmd->add_option("--output", pr_output, "output store directory")->required();

    // compare
    std::string c_config, c_scratch;
    u64 c_seed = 0;
    CLI::App* compare =
        app.add_subcommand("compare", "run the rp-vs-lsrpca sweep described by a config file");
    compare->add_option("--config", c_config, "sweep config file")->required();
    compare->add_option("--seed", c_seed, "root seed for the whole experiment");
    compare->add_option("--scratch", c_scratch,
                        "scratch directory (default $LSRPCA_SCRATCH or the system temp dir)");

    // plotdata
    std::string pd_report, pd_output = "-";
    CLI::App* plotdata =
        app.add_subcommand("plotdata", "emit the aggregate curve table from a JSON report");
    plotdata->add_option("--report", pd_report, "report JSON written by compare")->required();
    plotdata->add_option("--output", pd_output, "output CSV path, or - for stdout");

    // oracle
    Index o_trials = 12;
    u64 o_seed = 0;
    std::string o_scratch;
    CLI::App* oracle =
        app.add_subcommand("oracle", "streaming-vs-in-core equivalence suite at small scale");
    oracle->add_option("--trials", o_trials, "number of random instances");
    oracle->add_option("--seed", o_seed, "root seed");
    oracle->add_option("--scratch", o_scratch, "scratch directory");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("lsrpca");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    log::quiet() = quiet;

    try {
        if (ingest->parsed()) {
            if (in_synthetic == !in_input.empty())
                return usage_error("ingest needs exactly one of --input or --synthetic");
            if (in_slice_rows < 1) return usage_error("--slice-rows must be at least 1");

            PhaseLog phase("ingest");
            Matrix m;
            std::vector<Index> labels;
            if (in_synthetic) {
                SyntheticConfig sc;
                sc.n = in_n;
                sc.p = in_p;
                sc.rank = in_rank;
                sc.n_classes = in_classes;
                sc.noise_sd = in_noise;
                sc.seed = rng::derive(in_seed, "synthesis");
                LabeledDataset ds = make_synthetic(sc);
                labels = std::move(ds.labels);
                m = Matrix(std::move(ds.x));
            } else {
                std::string fmt = in_format;
                if (fmt == "auto") {
                    if (ends_with(in_input, ".mtx"))
                        fmt = "mtx";
                    else if (ends_with(in_input, ".csv"))
                        fmt = "csv";
                    else
                        return usage_error("cannot infer format of '" + in_input +
                                           "'; pass --format mtx or --format csv");
                }
                m = fmt == "mtx" ? io::read_matrix_market(in_input)
                                 : Matrix(io::read_dense_csv(in_input));
            }
            const SliceStore store = partition(m, in_slice_rows, in_output);
            if (in_synthetic) {
                const fs::path lp = in_labels_out.empty()
                                        ? fs::path(in_output) / "labels.txt"
                                        : fs::path(in_labels_out);
                write_labels_file(lp, labels);
            }
            phase.done();
            {
                char buf[120];
                std::snprintf(buf, sizeof(buf), "store: %lld rows, %lld columns, %lld slices",
                              static_cast<long long>(store.n_total()),
                              static_cast<long long>(store.cols()),
                              static_cast<long long>(store.slice_count()));
                log::info(buf);
            }
            return 0;
        }

        if (normalize->parsed()) {
            const SliceStore source = SliceStore::open(no_input);
            const NormMode mode = norm_mode_from_name(no_mode);
            PhaseLog fit_phase("normalize/fit", &source);
            const NormStats stats = fit_norm(source, mode);
            fit_phase.done();
            PhaseLog apply_phase("normalize/apply", &source);
            apply_norm(source, stats, no_output);
            apply_phase.done();
            const fs::path stats_path =
                no_stats.empty() ? fs::path(no_output) / "norm.json" : fs::path(no_stats);
            save_norm(stats, stats_path);
            return 0;
        }

        if (fit->parsed()) {
            const SliceStore store = SliceStore::open(f_input);
            const OversampleMode mode = OversampleMode::parse(f_oversample);
            PhaseLog phase("fit", &store);
            ProjectionModel model;
            if (f_method == "rp")
                model = make_rp_model(store.cols(), f_k, f_seed);
            else
                model = ls_rpca(store, f_k, mode.kbar_for(f_k), f_seed);
            model.oversampling = mode;
            const fs::path stats_path = fs::path(f_input) / "norm.json";
            if (fs::exists(stats_path)) model.norm_ref = stats_path.string();
            phase.done();
            save_model(model, f_output);
            return 0;
        }

        if (project_cmd->parsed()) {
            const ProjectionModel model = load_model(pr_model);
            const SliceStore store = SliceStore::open(pr_input);
            PhaseLog phase("project", &store);
            project(store, model, pr_output);
            phase.done();
            return 0;
        }

        if (compare->parsed()) {
            const CompareConfig cc = parse_compare_config(c_config);
            const fs::path scratch = scratch_root(c_scratch) / "compare";

            LabeledDataset data;
            if (cc.synthetic) {
                PhaseLog phase("compare/synthesize");
                SyntheticConfig sc = cc.synth;
                sc.seed = rng::derive(c_seed, "synthesis");
                data = make_synthetic(sc);
                phase.done();
            } else {
                const SliceStore store = SliceStore::open(cc.store);
                PhaseLog phase("compare/load", &store);
                data.x = densify_store(store);
                data.labels = io::read_labels(cc.labels);
                phase.done();
                if (data.labels.size() != static_cast<std::size_t>(data.x.rows()))
                    throw ShapeError("compare: store rows and label count differ");
                Index max_label = 0;
                for (Index label : data.labels) max_label = std::max(max_label, label);
                data.n_classes = max_label + 1;
            }

            EvalConfig ec;
            ec.k_values = cc.ks;
            if (cc.seeds.empty()) {
                const u64 base = rng::derive(c_seed, "sketch");
                for (Index i = 0; i < cc.n_seeds; ++i)
                    ec.seeds.push_back(base + static_cast<u64>(i));
            } else {
                ec.seeds = cc.seeds;
            }
            ec.norm_mode = cc.norm_mode;
            ec.oversampling = cc.oversample;
            ec.folds = cc.folds;
            ec.test_fraction = cc.test_fraction;
            ec.split_seed = rng::derive(c_seed, "folds");
            ec.max_rows_per_slice = cc.max_rows_per_slice;
            ec.logreg = cc.logreg;

            PhaseLog phase("compare/sweep");
            const EvalReport report = run_comparison(data, ec, scratch);
            phase.done();

            write_report_csv(report, cc.csv_path);
            write_report_json(report, cc.json_path);

            Index failed = 0;
            for (const EvalCell& cell : report.cells)
                if (!cell.ok) ++failed;
            {
                char buf[160];
                std::snprintf(buf, sizeof(buf), "report: %zu cells (%lld failed) -> %s, %s",
                              report.cells.size(), static_cast<long long>(failed),
                              cc.csv_path.c_str(), cc.json_path.c_str());
                log::info(buf);
            }
            if (failed > 0) log::warn("some sweep cells failed; see the report's note column");
            return 0;
        }

        if (plotdata->parsed()) {
            const EvalReport report = read_report_json(pd_report);
            const std::string table = plotdata_csv(report);
            if (pd_output == "-") {
                std::cout << table;
            } else {
                std::ofstream out(pd_output, std::ios::binary | std::ios::trunc);
                if (!out) throw StorageError("cannot write plot table: " + pd_output);
                out << table;
                if (!out) throw StorageError("short write to plot table: " + pd_output);
            }
            return 0;
        }

        if (oracle->parsed()) {
            if (o_trials < 1) return usage_error("--trials must be at least 1");
            const fs::path scratch = scratch_root(o_scratch) / "oracle";
            const std::vector<OracleTrial> trials = run_oracle_suite(o_trials, o_seed, scratch);
            Index passed = 0;
            for (std::size_t t = 0; t < trials.size(); ++t) {
                const OracleTrial& trial = trials[t];
                std::printf("trial %2zu  seed=%llu  slices=%lld  v_diff=%.3e  "
                            "sigma_rel=%.3e  %s\n",
                            t, static_cast<unsigned long long>(trial.seed),
                            static_cast<long long>(trial.slices), trial.v_diff,
                            trial.sigma_rel, trial.pass ? "PASS" : "FAIL");
                if (trial.pass) ++passed;
            }
            std::printf("oracle equivalence: %lld/%zu passed\n",
                        static_cast<long long>(passed), trials.size());
            return passed == static_cast<Index>(trials.size()) ? 0 : 1;
        }

        return usage_error("no subcommand given");
    } catch (const RankError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 6;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 7;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const CorruptSliceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const StorageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace lsr
