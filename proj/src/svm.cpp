#include "svp/svm.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "svp/errors.hpp"

namespace svp {

namespace {

double kkt_violation(const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                     const Eigen::VectorXd& K_beta) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double g = y[i] - K_beta[i];
        double v = (beta[i] != 0.0) ? std::abs(g) : std::max(0.0, y[i] * g);
        worst = std::max(worst, v);
    }
    return worst;
}

double dual_objective(const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& K_beta) {
    return y.dot(beta) - 0.5 * beta.dot(K_beta);
}

// Solve K_AA b_A = y_A for a candidate active set and validate the full KKT
// system at tolerance tol_abs. Returns the candidate only if it is a genuine
// KKT point (dual-feasible, stationary on A, primal-feasible off A).
std::optional<Eigen::VectorXd> try_active_set(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                              const std::vector<int>& active, double tol_abs) {
    const auto n = static_cast<int>(y.size());
    const auto m = static_cast<int>(active.size());
    if (m == 0) return std::nullopt;

    Eigen::MatrixXd K_sub(m, m);
    Eigen::VectorXd y_sub(m);
    for (int a = 0; a < m; ++a) {
        y_sub[a] = y[active[a]];
        for (int b = 0; b < m; ++b) K_sub(a, b) = K(active[a], active[b]);
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(K_sub);
    const Eigen::VectorXd& pivots = ldlt.vectorD();
    const double eps = std::numeric_limits<double>::epsilon();
    if (pivots.minCoeff() <= m * eps * std::max(pivots.maxCoeff(), 0.0)) return std::nullopt;

    Eigen::VectorXd b_sub = ldlt.solve(y_sub);
    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < m; ++a) candidate[active[a]] = b_sub[a];

    for (int a = 0; a < m; ++a) {
        if (y_sub[a] * b_sub[a] < 0.0) return std::nullopt;  // dual-infeasible set
    }
    Eigen::VectorXd K_candidate = K * candidate;
    if (kkt_violation(y, candidate, K_candidate) > tol_abs) return std::nullopt;
    return candidate;
}

// Minimum-norm optimal dual for singular Gram matrices: project beta onto
// range(K). The projection fixes w and, when it keeps the objective and the
// sign constraints, replaces the order-dependent coordinate-ascent output by
// the canonical representative of the optimal face.
Eigen::VectorXd canonicalize_singular_dual(const GramFactor& gf, const Eigen::VectorXd& y,
                                           Eigen::VectorXd beta, double tol_abs) {
    const int n = gf.n();
    if (n > 2000) return beta;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gf.K());
    if (eig.info() != Eigen::Success) return beta;
    const Eigen::VectorXd& mu = eig.eigenvalues();
    const Eigen::MatrixXd& V = eig.eigenvectors();
    const double eps = std::numeric_limits<double>::epsilon();
    const double cutoff = n * eps * std::max(mu.maxCoeff(), 0.0);

    Eigen::VectorXd projected = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        if (mu[j] > cutoff) projected += V.col(j) * (V.col(j).dot(beta));
    }

    for (int i = 0; i < n; ++i) {
        double margin = y[i] * projected[i];
        if (margin < -tol_abs) return beta;  // left the dual cone
        if (margin < 0.0) projected[i] = 0.0;
    }
    Eigen::VectorXd K_projected = gf.K() * projected;
    if (std::abs(dual_objective(y, projected, K_projected) -
                 dual_objective(y, beta, gf.K() * beta)) > std::max(tol_abs, 1e-10)) {
        return beta;
    }
    if (kkt_violation(y, projected, K_projected) > tol_abs) return beta;
    return projected;
}

SvmSolution finalize(const Dataset& ds, const GramFactor& gf, Eigen::VectorXd beta,
                     const SolverOptions& opts, SolverDiagnostics diagnostics) {
    if (gf.singular() && diagnostics.converged) {
        double y_inf = ds.y.cwiseAbs().maxCoeff();
        double scale = gf.K().cwiseAbs().rowwise().sum().maxCoeff();
        beta = canonicalize_singular_dual(gf, ds.y, std::move(beta),
                                          opts.tol_kkt * y_inf * scale * 1e2);
    }

    SvmSolution sol;
    sol.beta_star = std::move(beta);
    sol.w_star = ds.weights_from_dual(sol.beta_star);
    double wnorm = sol.w_star.norm();
    sol.gamma_star = wnorm > 0.0 ? 1.0 / wnorm : 0.0;
    sol.sv_set = support_vectors(sol.beta_star, opts.tol_sv, &sol.sv_boundary_count);
    sol.diagnostics = std::move(diagnostics);
    return sol;
}

}  // namespace

SvmSolution solve_dual(const Dataset& ds, const GramFactor& gf, const SolverOptions& opts) {
    if (!ds.has_labels()) throw std::invalid_argument("solve_dual: dataset has no labels");
    const int n = gf.n();
    const Eigen::MatrixXd& K = gf.K();
    const Eigen::VectorXd& y = ds.y;

    for (int i = 0; i < n; ++i) {
        if (K(i, i) == 0.0) throw SingularCoordinate("solve_dual: K_ii = 0 at index " + std::to_string(i));
    }

    const double y_inf = y.cwiseAbs().maxCoeff();
    const double row_scale = K.cwiseAbs().rowwise().sum().maxCoeff();
    const double tol_abs = opts.tol_kkt * y_inf * row_scale;
    const double objective_guard = 1.0 / tol_abs;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd K_beta = Eigen::VectorXd::Zero(n);

    SolverDiagnostics diag;
    diag.separable = true;

    double previous_objective = 0.0;
    double last_increase = 0.0;

    for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) {
            double off_diag = K_beta[i] - K(i, i) * beta[i];
            double candidate = (y[i] - off_diag) / K(i, i);
            double updated = y[i] > 0.0 ? std::max(candidate, 0.0) : std::min(candidate, 0.0);
            double delta = updated - beta[i];
            if (delta != 0.0) {
                K_beta += K.col(i) * delta;
                beta[i] = updated;
            }
        }
        diag.sweeps = sweep;

        // Incremental K*beta drifts over long runs; refresh periodically and
        // before every convergence decision is made on it below.
        if (sweep % 256 == 0) K_beta = K * beta;

        double violation = kkt_violation(y, beta, K_beta);
        double objective = dual_objective(y, beta, K_beta);
        if (opts.record_objective_trace) diag.objective_trace.push_back(objective);
        last_increase = objective - previous_objective;
        previous_objective = objective;

        if (objective > objective_guard) {
            throw NotSeparable("solve_dual: dual objective diverged; data are not separable");
        }

        if (violation <= tol_abs) {
            K_beta = K * beta;
            diag.max_kkt_violation = kkt_violation(y, beta, K_beta);
            if (diag.max_kkt_violation <= tol_abs) {
                diag.converged = true;
                return finalize(ds, gf, std::move(beta), opts, std::move(diag));
            }
        }

        // Active-set polish: an exact solve on the current support pattern
        // converges in one shot once the pattern has settled.
        bool scheduled = sweep == 2 || sweep == 4 || sweep == 8 || sweep == 16 || sweep == 32 ||
                         sweep % 64 == 0 || violation <= 1e2 * tol_abs;
        if (scheduled) {
            std::vector<int> active;
            for (int i = 0; i < n; ++i) {
                if (beta[i] != 0.0) active.push_back(i);
            }
            if (auto polished = try_active_set(K, y, active, tol_abs)) {
                beta = std::move(*polished);
                K_beta = K * beta;
                diag.max_kkt_violation = kkt_violation(y, beta, K_beta);
                diag.converged = true;
                diag.polished = true;
                return finalize(ds, gf, std::move(beta), opts, std::move(diag));
            }
        }
    }

    if (last_increase > tol_abs) {
        throw NotSeparable("solve_dual: iteration cap hit with unbounded objective trend");
    }
    K_beta = K * beta;
    diag.max_kkt_violation = kkt_violation(y, beta, K_beta);
    diag.converged = false;
    return finalize(ds, gf, std::move(beta), opts, std::move(diag));
}

SvmSolution solve_exact_smalln(const Dataset& ds, const GramFactor& gf, const SolverOptions& opts) {
    if (!ds.has_labels()) throw std::invalid_argument("solve_exact_smalln: dataset has no labels");
    const int n = gf.n();
    if (n > 12) throw std::invalid_argument("solve_exact_smalln: n must be <= 12");

    const Eigen::MatrixXd& K = gf.K();
    const Eigen::VectorXd& y = ds.y;
    const double y_inf = y.cwiseAbs().maxCoeff();
    const double row_scale = K.cwiseAbs().rowwise().sum().maxCoeff();
    const double tol_abs = std::max(opts.tol_kkt, 1e-10) * y_inf * row_scale;

    std::optional<Eigen::VectorXd> best;
    double best_objective = -std::numeric_limits<double>::infinity();

    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> active;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) active.push_back(i);
        }
        auto candidate = try_active_set(K, y, active, tol_abs);
        if (!candidate) continue;
        double objective = dual_objective(y, *candidate, K * (*candidate));
        if (objective > best_objective + 1e-12 * (1.0 + std::abs(objective))) {
            best_objective = objective;
            best = std::move(candidate);
        }
    }

    if (!best) throw NotSeparable("solve_exact_smalln: no active set yields a KKT point");

    SolverDiagnostics diag;
    diag.converged = true;
    diag.separable = true;
    diag.polished = true;
    diag.max_kkt_violation = kkt_violation(y, *best, K * (*best));
    return finalize(ds, gf, std::move(*best), opts, std::move(diag));
}

std::vector<int> support_vectors(const Eigen::VectorXd& beta, double tol_sv, int* boundary_count) {
    std::vector<int> sv;
    if (boundary_count != nullptr) *boundary_count = 0;
    double max_abs = beta.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) return sv;

    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        double rel = std::abs(beta[i]) / max_abs;
        if (rel > tol_sv) sv.push_back(static_cast<int>(i));
        if (boundary_count != nullptr && rel >= 0.1 * tol_sv && rel <= 10.0 * tol_sv) {
            ++(*boundary_count);
        }
    }
    return sv;
}

MarginAudit margin_audit(const SvmSolution& sol, const GramFactor& gf, const Spectrum& spectrum,
                         const Eigen::VectorXd& y) {
    const int n = gf.n();
    if (static_cast<int>(sol.sv_set.size()) != n) {
        throw PreconditionViolated("margin_audit: every example must be a support vector");
    }

    MarginAudit audit;
    audit.wnorm_sq = sol.w_star.squaredNorm();
    audit.y_K_inv_y = y.dot(gf.solve(y));
    audit.op_norm = gf.op_norm();
    audit.lower_bound_n_over_opnorm = static_cast<double>(n) / audit.op_norm;
    audit.lambda_l1 = spectrum.l1();
    audit.bound_value = (audit.wnorm_sq / static_cast<double>(n)) * audit.lambda_l1;

    double scale = std::max(audit.wnorm_sq, audit.y_K_inv_y);
    bool equality = std::abs(audit.wnorm_sq - audit.y_K_inv_y) <= 1e-8 * scale;
    bool rayleigh = audit.y_K_inv_y >= audit.lower_bound_n_over_opnorm * (1.0 - 1e-8);
    audit.chain_ok = equality && rayleigh;
    audit.opnorm_event = audit.op_norm <= 2.0 * audit.lambda_l1;
    audit.product_implication_ok = !audit.opnorm_event || audit.bound_value >= 0.5 * (1.0 - 1e-8);
    return audit;
}

}  // namespace svp
