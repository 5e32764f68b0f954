#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "svp/dataset.hpp"
#include "svp/equivalence.hpp"
#include "svp/spectrum.hpp"
#include "svp/svm.hpp"

namespace svp {

enum class EnsembleKind { Independent, Haar, Trig };

std::string to_string(EnsembleKind kind);

// Declarative spectrum description, resolved against the cell's n.
struct SpectrumSpec {
    enum class Kind { Isotropic, Bilevel, Trig, Explicit };
    Kind kind = Kind::Isotropic;
    int d = 0;                       // Isotropic
    double p = 2.0, q = 0.5, r = 0.5;  // Bilevel
    int k = 1;
    double decay = 1.0;  // Trig
    Eigen::VectorXd lambda;  // Explicit

    Spectrum resolve(int n) const;
    int dimension(int n) const;
};

// Declarative label description. GLM weights may be explicit or drawn per
// trial from the trial's "label_params" stream.
struct LabelSpec {
    enum class Kind {
        RandomSigns,
        FixedOnes,
        FixedAlternating,
        FixedValues,
        Logistic,
        Probit,
        OneBit,
        MultiIndex,
    };
    Kind kind = Kind::RandomSigns;
    Eigen::VectorXd values;  // FixedValues
    bool w_explicit = false;
    Eigen::VectorXd w;       // GLM kinds when explicit
    Eigen::MatrixXd W;       // MultiIndex when explicit
    int multi_k = 2;
    MultiIndexLink link = MultiIndexLink::Intersection;

    LabelModel resolve(int n, int d, const SeedRecord& seed) const;
};

struct CellSpec {
    int n = 0;
    EnsembleKind ensemble = EnsembleKind::Independent;
    EntryLaw law = EntryLaw::Gaussian;
    SpectrumSpec spectrum;
    LabelSpec labels;

    int dimension() const { return spectrum.dimension(n); }
    Dataset generate(const SeedRecord& seed) const;
};

enum class EquivalenceMode { Condition2, Condition3, FullSolver };

std::string to_string(EquivalenceMode mode);

struct SweepConfig {
    std::vector<CellSpec> cells;
    long trials = 100;
    std::uint64_t master_seed = 42;
    int workers = 1;
    EquivalenceMode mode = EquivalenceMode::Condition2;
    SolverOptions solver;
    double tol_amb = 1e-9;
};

struct CellResult {
    int n = 0;
    int d = 0;
    std::string ensemble;
    std::string law;
    long trials = 0;
    long proliferation_count = 0;
    long singular_count = 0;
    long ambiguous_count = 0;
    double p_hat = 0.0;
    double ci_halfwidth = 0.0;
    // Full-solver mode: mean |sv_set|/n. Condition modes: mean fraction of
    // indices satisfying the per-index condition (equals the SV fraction
    // exactly on proliferated instances).
    double sv_fraction_mean = 0.0;
    double mean_min_ybeta = 0.0;
    double mean_max_h = 0.0;
    double runtime_s = 0.0;
};

struct SweepResult {
    std::vector<CellResult> cells;
};

// Monte-Carlo estimate of the proliferation probability per grid cell.
// Singular and ambiguous trials are excluded from both sides of p_hat and
// reported separately. Per-trial numerical failures never abort the sweep;
// a Lemma-consistency failure in full-solver mode does.
SweepResult proliferation_sweep(const SweepConfig& cfg);

// 95% Wilson interval half-width for successes/trials.
double wilson_halfwidth(long successes, long trials);

// ---------------------------------------------------------------------------

struct ConverseCell {
    int n = 0;
    int d = 0;
    long trials = 0;
    long nonsv_count = 0;  // trials with at least one non-support-vector
    long singular_count = 0;
    long ambiguous_count = 0;
    double q_hat = 0.0;
    double ci_halfwidth = 0.0;
    double bound = 0.0;  // the isotropic converse lower bound
    bool consistent = false;  // q_hat + ci_halfwidth >= bound
};

struct ConverseConfig {
    std::vector<std::pair<int, int>> cells;  // (n, d)
    long trials = 1000;
    std::uint64_t master_seed = 42;
    int workers = 1;
    bool alternating_labels = false;  // default all-ones fixed labels
    double tol_amb = 1e-9;
};

// Gaussian isotropic features, fixed labels; estimates the probability that
// at least one example is not a support vector and checks it against the
// converse bound.
std::vector<ConverseCell> converse_probe(const ConverseConfig& cfg);

std::vector<std::pair<int, int>> make_converse_cells(const std::vector<int>& n_list,
                                                     const std::vector<double>& d_over_n_list);

// ---------------------------------------------------------------------------

struct ConcentrationResult {
    int n = 0;
    int d = 0;
    long trials = 0;
    double freq_eigmin_event = 0.0;  // eigmin(K) >= ||lambda||_1 / 2
    double freq_opnorm_event = 0.0;  // ||K||_op <= 2 ||lambda||_1
    double d2 = 0.0;
    double d_inf = 0.0;
};

ConcentrationResult concentration_probe(int n, const Spectrum& spectrum, EntryLaw law,
                                        long trials, std::uint64_t master_seed, int workers = 1);

// ---------------------------------------------------------------------------

struct BuhotRow {
    double delta = 0.0;
    int n = 0;
    int d = 0;
    long trials = 0;
    long resamples = 0;  // non-separable draws replaced
    double mean_sv_fraction = 0.0;
    double predicted = 0.0;  // asymptotic fraction at this delta
    double abs_gap = 0.0;
};

struct BuhotConfig {
    std::vector<double> delta_list;
    int n = 50;
    long trials = 200;
    std::uint64_t master_seed = 42;
    int workers = 1;
    SolverOptions solver;
};

// Mean support-vector fraction under isotropic Gaussian features versus the
// asymptotic prediction at each delta = n/d.
std::vector<BuhotRow> buhot_compare(const BuhotConfig& cfg);

// ---------------------------------------------------------------------------

struct Figure1Options {
    int n = 32;
    int k = 16384;
    std::vector<double> decays = {1.0, 3.0};
    int num_seeds = 50;
    std::uint64_t master_seed = 42;
    int workers = 1;
    LabelSpec labels;  // default random signs
    SolverOptions solver;
    int curve_samples = 512;
    double weight_match_tol = 1e-6;
};

struct Figure1Instance {
    double decay = 0.0;
    int seed_index = 0;
    int sv_count = 0;
    bool all_sv = false;
    bool weights_match = false;   // SVM weights equal interpolator weights
    double rel_weight_diff = 0.0;
    double margin = 0.0;
    EffectiveDims lambda_dims;
    EffectiveDims gram_dims;
};

// Decision-function samples over t in [0, 2pi) for one seed of one decay.
struct Figure1Curve {
    double decay = 0.0;
    int seed_index = 0;
    Eigen::VectorXd t_grid;
    Eigen::VectorXd f_svm;
    Eigen::VectorXd f_interp;
    Eigen::VectorXd train_t;
    Eigen::VectorXd train_y;
};

struct Figure1Result {
    std::vector<Figure1Instance> instances;
    std::vector<Figure1Curve> curves;  // first seed of each decay
};

Figure1Result figure1_repro(const Figure1Options& opts);

}  // namespace svp
