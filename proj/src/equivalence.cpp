#include "svp/equivalence.hpp"

#include <cmath>
#include <string>

#include "svp/errors.hpp"

namespace svp {

RidgelessSolution ridgeless(const Dataset& ds, const GramFactor& gf) {
    if (!ds.has_labels()) throw std::invalid_argument("ridgeless: dataset has no labels");
    RidgelessSolution sol;
    sol.beta = gf.solve(ds.y);
    sol.w = ds.weights_from_dual(sol.beta);
    return sol;
}

LooStats loo_statistics(const Dataset& ds, const GramFactor& gf) {
    if (!ds.has_labels()) throw std::invalid_argument("loo_statistics: dataset has no labels");

    Eigen::VectorXd beta = gf.solve(ds.y);
    Eigen::VectorXd inv_diag;
    try {
        inv_diag = gf.inverse_diagonal();
    } catch (const SingularGram& e) {
        // A non-positive (K^{-1})_ii means some leave-one-out Schur
        // complement is numerically lost, which is the K_{\i} side of the
        // lemma's hypothesis.
        throw SingularLeaveOneOut(std::string("loo_statistics: ") + e.what());
    }

    const int n = gf.n();
    LooStats stats;
    stats.h.resize(n);
    stats.s.resize(n);
    for (int i = 0; i < n; ++i) {
        stats.s[i] = 1.0 / inv_diag[i];
        // n = 1 has an empty leave-one-out set and h_1 = 0; the identity
        // below reproduces that convention exactly since beta_1 = y_1/K_11.
        stats.h[i] = 1.0 - ds.y[i] * beta[i] * stats.s[i];
    }
    return stats;
}

void verify_report_consistency(const EquivalenceReport& report) {
    if (report.is_ambiguous()) return;
    bool reference = report.cond2_all_positive;
    if (report.cond3_all_below_one != reference) {
        throw InconsistencyError(
            "equivalence verdicts disagree on a non-ambiguous instance: "
            "condition 2 = " + std::to_string(reference) +
            ", condition 3 = " + std::to_string(report.cond3_all_below_one));
    }
    if (report.cond1_all_sv.has_value() && *report.cond1_all_sv != reference) {
        throw InconsistencyError(
            "equivalence verdicts disagree on a non-ambiguous instance: "
            "condition 2 = " + std::to_string(reference) +
            ", solver condition 1 = " + std::to_string(*report.cond1_all_sv));
    }
}

EquivalenceReport check_equivalence(const Dataset& ds, const GramFactor& gf,
                                    const EquivalenceOptions& opts) {
    const int n = gf.n();
    EquivalenceReport report;
    report.beta = gf.solve(ds.y);
    report.signed_margins = (ds.y.array() * report.beta.array()).matrix();

    LooStats stats = loo_statistics(ds, gf);
    report.loo_stats = stats.h;
    report.schur = stats.s;

    const double beta_inf = report.beta.cwiseAbs().maxCoeff();
    report.cond2_all_positive = (report.signed_margins.array() > 0.0).all();
    report.cond3_all_below_one = (report.loo_stats.array() < 1.0).all();

    for (int i = 0; i < n; ++i) {
        bool near_sign_boundary = std::abs(report.signed_margins[i]) <= opts.tol_amb * beta_inf;
        bool near_loo_boundary = std::abs(report.loo_stats[i] - 1.0) <= opts.tol_amb;
        bool in_solver_band = opts.run_solver && report.signed_margins[i] > 0.0 &&
                              report.signed_margins[i] <= opts.solver_decision_band * beta_inf;
        if (near_sign_boundary || near_loo_boundary || in_solver_band) {
            report.ambiguous.push_back(i);
        }
    }

    if (opts.run_solver) {
        SvmSolution sol = solve_dual(ds, gf, opts.solver);
        report.cond1_all_sv = sol.diagnostics.converged &&
                              static_cast<int>(sol.sv_set.size()) == n;
        report.solver_boundary_ambiguous =
            sol.sv_boundary_count > 0 || !sol.diagnostics.converged;
        report.solution = std::move(sol);
    }

    verify_report_consistency(report);
    return report;
}

}  // namespace svp
