#pragma once

// Randomized PCA in two shapes plus the exact oracle.
//
//   baseline_rpca: in-core. Sketch Y = X*omega, orthonormalize, project
//                  B = Qt*X, small SVD, truncate to K right vectors.
//   ls_rpca:       the streaming equivalent. One pass over the slices,
//                  holding only omega, the K̄×P accumulator A = sum Ys_t*Xs,
//                  and the running QR triangle; finalized by solving
//                  Rt*B = A and taking the small SVD of B. Q is never
//                  materialized anywhere in this path.
//
// With a shared seed (hence shared omega), both produce the same model up
// to floating-point noise; tests and the `oracle` CLI command exercise
// exactly that equivalence. Power iterations are deliberately not offered:
// this family trades a little accuracy for the strict single-pass property,
// and a power-iteration option would silently break that contract.
//
// Reported singular values are those of the small matrix B; they
// approximate the data's singular values and are carried for diagnostics,
// not as guarantees.

#include <filesystem>
#include <string>
#include <vector>

#include "lsr/slice_store.hpp"

namespace lsr {

enum class Method : u32 { rp = 0, rpca_baseline = 1, ls_rpca = 2, exact_pca = 3 };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Sketch width policy: minimal (K̄=K), double (K̄=2K), fixed:N (K̄=N).
struct OversampleMode {
    enum class Kind : u32 { minimal = 0, dbl = 1, fixed = 2 };
    Kind kind = Kind::minimal;
    Index fixed = 0;

    Index kbar_for(Index k) const;
    std::string str() const;
    static OversampleMode parse(const std::string& text);
};

struct ProjectionModel {
    DenseMatrix v;  // P×K; orthonormal columns except for method rp, which
                    // stores omega/sqrt(K) and claims no orthonormality
    std::vector<f64> singular_values;  // length K, nonincreasing (zeros for rp)
    Method method = Method::ls_rpca;
    Index k = 0;
    Index kbar = 0;
    u64 seed = 0;
    OversampleMode oversampling;
    std::string norm_ref;  // optional pointer to the stats the data was normalized with
};

struct SvdResult {
    DenseMatrix u;            // N×K
    std::vector<f64> sigma;   // length K
    DenseMatrix v;            // P×K
};

// In-core oracle via Gram-matrix eigen-decomposition on the smaller side.
// Intended for modest sizes; cost grows with min(N,P)^3.
SvdResult exact_truncated_svd(const DenseMatrix& x, Index k);

ProjectionModel baseline_rpca(const DenseMatrix& x, Index k, Index kbar, u64 seed);

// Single pass over the store; first slice must have at least kbar rows.
ProjectionModel ls_rpca(const SliceStore& store, Index k, Index kbar, u64 seed);

ProjectionModel exact_pca_model(const DenseMatrix& x, Index k, u64 seed);

// Random-projection model: v = omega/sqrt(K), regenerable from the seed.
ProjectionModel make_rp_model(Index p, Index k, u64 seed);

// Streaming X^proj = X V, a second pass downstream of fitting.
SliceStore project(const SliceStore& store, const ProjectionModel& model,
                   const std::filesystem::path& out_dir);
DenseMatrix project(const Matrix& x, const ProjectionModel& model);

// One file: magic, u64 header length, JSON header, then the V blob for
// methods that need one. rp models persist only (seed, p, k, generator
// version) and are regenerated on load.
void save_model(const ProjectionModel& model, const std::filesystem::path& path);
ProjectionModel load_model(const std::filesystem::path& path);

// Fraction of the squared Frobenius mass of x that survives projection:
// |x V|_F^2 / |x|_F^2 (0 when x is all zero).
f64 captured_energy(const DenseMatrix& x, const ProjectionModel& model);

// max over columns of min(max-abs(a_j - b_j), max-abs(a_j + b_j)); the
// natural distance between singular-vector sets, which are only defined
// up to column sign.
f64 column_diff_up_to_sign(const DenseMatrix& a, const DenseMatrix& b);

// One streaming-vs-in-core equivalence trial: a random well-conditioned
// matrix, a random partition, shared seed, and the two fitted models
// compared column by column.
struct OracleTrial {
    u64 seed = 0;
    Index slices = 0;
    f64 v_diff = 0.0;      // column_diff_up_to_sign of the two V matrices
    f64 sigma_rel = 0.0;   // worst relative singular value difference
    bool pass = false;
};

// Deterministic in root_seed. Writes per-trial stores under scratch.
std::vector<OracleTrial> run_oracle_suite(Index trials, u64 root_seed,
                                          const std::filesystem::path& scratch);

}  // namespace lsr
