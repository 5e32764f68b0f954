#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "svp/dataset.hpp"
#include "svp/gram.hpp"
#include "svp/svm.hpp"

namespace svp {

// Least-norm interpolator: beta = K^{-1} y, w = X^T beta.
struct RidgelessSolution {
    Eigen::VectorXd beta;
    Eigen::VectorXd w;
};

RidgelessSolution ridgeless(const Dataset& ds, const GramFactor& gf);

// Leave-one-out statistics h_i = y_i y_{\i}^T K_{\i}^{-1} Z_{\i} L z_i and
// the Schur complements s_i = K_ii - (row i)^T K_{\i}^{-1} (row i) =
// 1/(K^{-1})_ii, computed in O(n^3) total through the identity
//   y_i beta_i = (1 - h_i) / s_i,   i.e.   h_i = 1 - y_i beta_i * s_i.
struct LooStats {
    Eigen::VectorXd h;  // h_i
    Eigen::VectorXd s;  // s_i > 0 when K is non-singular
};

LooStats loo_statistics(const Dataset& ds, const GramFactor& gf);

struct EquivalenceOptions {
    // Relative ambiguity tolerance on the sign/threshold decisions.
    double tol_amb = 1e-9;
    bool run_solver = false;
    SolverOptions solver;
    // When the solver runs, a positive y_i beta_i below this relative level
    // is also ambiguous: the support-vector threshold (tol_sv) cannot
    // distinguish it from zero. Defaults to 10 * tol_sv.
    double solver_decision_band = 1e-5;
};

struct EquivalenceReport {
    Eigen::VectorXd beta;            // K^{-1} y
    Eigen::VectorXd signed_margins;  // y_i beta_i
    Eigen::VectorXd loo_stats;       // h_i
    Eigen::VectorXd schur;           // s_i
    bool cond2_all_positive = false;
    bool cond3_all_below_one = false;
    std::optional<bool> cond1_all_sv;  // present when the solver ran
    std::vector<int> ambiguous;        // indices near a decision boundary
    bool solver_boundary_ambiguous = false;
    std::optional<SvmSolution> solution;

    bool is_ambiguous() const { return !ambiguous.empty() || solver_boundary_ambiguous; }
};

// Evaluates Lemma-style conditions 2 and 3 (and 1 when run_solver), marks
// borderline indices as ambiguous, and raises InconsistencyError if the
// verdicts disagree on a non-ambiguous instance.
EquivalenceReport check_equivalence(const Dataset& ds, const GramFactor& gf,
                                    const EquivalenceOptions& opts = {});

// Consistency gate used by check_equivalence; exposed so tests can feed it
// doctored reports.
void verify_report_consistency(const EquivalenceReport& report);

}  // namespace svp
