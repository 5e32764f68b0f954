#pragma once

#include <Eigen/Dense>
#include <vector>

#include "svp/dataset.hpp"
#include "svp/gram.hpp"

namespace svp {

struct SolverOptions {
    // Relative KKT tolerance; the absolute tolerance is this times
    // ||y||_inf * max_i sum_j |K_ij|.
    double tol_kkt = 1e-10;
    // Relative support-vector threshold on |beta_i| / max_j |beta_j|.
    double tol_sv = 1e-6;
    // Primal feasibility tolerance used by the solution invariant checks.
    double tol_feas = 1e-8;
    long max_sweeps = 100000;
    bool record_objective_trace = false;
};

struct SolverDiagnostics {
    long sweeps = 0;
    double max_kkt_violation = 0.0;
    bool converged = false;
    bool separable = false;
    // Final solution came from an exact active-set solve.
    bool polished = false;
    std::vector<double> objective_trace;  // per sweep, when recorded
};

// Hard-margin SVM solution in the signed-dual parameterization
// beta_i = y_i alpha_i.
struct SvmSolution {
    Eigen::VectorXd beta_star;  // n
    Eigen::VectorXd w_star;     // d, equals X^T beta_star
    double gamma_star = 0.0;    // margin, 1/||w_star||
    std::vector<int> sv_set;
    int sv_boundary_count = 0;  // indices inside the threshold ambiguity band
    SolverDiagnostics diagnostics;
};

// Maximizes y^T beta - 0.5 beta^T K beta over {beta : y_i beta_i >= 0} by
// cyclic exact coordinate ascent, with periodic active-set polishing. The
// dual is unbounded iff the data are not separable; divergence raises
// NotSeparable. If the Gram matrix is singular the optimal dual is not
// unique, and the minimum-norm optimum is returned when the face permits.
SvmSolution solve_dual(const Dataset& ds, const GramFactor& gf, const SolverOptions& opts = {});

// Exact small-n oracle: enumerates all candidate active sets, solves the
// equality-constrained system on each, and returns the KKT point. n <= 12.
SvmSolution solve_exact_smalln(const Dataset& ds, const GramFactor& gf,
                               const SolverOptions& opts = {});

// {i : |beta_i| > tol_sv * max_j |beta_j|}; boundary_count (optional) counts
// indices within [0.1 tol_sv, 10 tol_sv] of the same scale.
std::vector<int> support_vectors(const Eigen::VectorXd& beta, double tol_sv,
                                 int* boundary_count = nullptr);

// Margin-bound audit for solutions where every example is a support vector:
// ||w*||^2 = y^T K^{-1} y >= n/||K||_op >= n/(2||lambda||_1), the last step
// only on the event ||K||_op <= 2||lambda||_1.
struct MarginAudit {
    double wnorm_sq = 0.0;
    double y_K_inv_y = 0.0;
    double lower_bound_n_over_opnorm = 0.0;
    double bound_value = 0.0;  // (||w*||^2 / n) * ||lambda||_1
    double op_norm = 0.0;
    double lambda_l1 = 0.0;
    bool chain_ok = false;        // equality + Rayleigh step, at 1e-8 relative
    bool opnorm_event = false;    // ||K||_op <= 2 ||lambda||_1
    bool product_implication_ok = false;  // opnorm_event => bound_value >= 1/2
};

MarginAudit margin_audit(const SvmSolution& sol, const GramFactor& gf, const Spectrum& spectrum,
                         const Eigen::VectorXd& y);

}  // namespace svp
