#include <doctest.h>

#include <cmath>
#include <random>

#include "svp/errors.hpp"
#include "svp/svm.hpp"

using namespace svp;

namespace {

Dataset hand_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Dataset ds{X, Spectrum::isotropic(static_cast<int>(X.cols())), y, SeedRecord{}};
    return ds;
}

Dataset random_instance(int n, int d, std::uint64_t seed) {
    Dataset ds = sample_independent(n, Spectrum::isotropic(d), EntryLaw::Gaussian,
                                    SeedRecord{seed, 0});
    apply_labels(ds, LabelModel::random_signs());
    return ds;
}

double dual_objective(const GramFactor& gf, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
    return y.dot(beta) - 0.5 * beta.dot(gf.K() * beta);
}

}  // namespace

TEST_SUITE_BEGIN("svm");

TEST_CASE("single point KKT by hand") {
    Eigen::MatrixXd X(1, 2);
    X << 2.0, 0.0;
    Dataset ds = hand_dataset(X, Eigen::VectorXd::Ones(1));
    GramFactor gf(ds);
    SvmSolution sol = solve_dual(ds, gf);

    CHECK(sol.diagnostics.converged);
    CHECK(sol.beta_star[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(sol.w_star[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.w_star[1] == doctest::Approx(0.0));
    CHECK(sol.gamma_star == doctest::Approx(2.0).epsilon(1e-12));
    // Margin constraint is active.
    CHECK(ds.y[0] * ds.x_row(0).dot(sol.w_star) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.sv_set == std::vector<int>{0});
}

TEST_CASE("symmetric pair resolves to the minimum-norm dual") {
    Eigen::MatrixXd X(2, 2);
    X << 1.0, 0.0, -1.0, 0.0;
    Eigen::VectorXd y(2);
    y << 1.0, -1.0;
    Dataset ds = hand_dataset(X, y);
    GramFactor gf(ds);

    SvmSolution sol = solve_dual(ds, gf);
    CHECK(sol.w_star[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.w_star[1] == doctest::Approx(0.0));
    CHECK(sol.beta_star[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sol.beta_star[1] == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(sol.sv_set == std::vector<int>{0, 1});

    SvmSolution exact = solve_exact_smalln(ds, gf);
    CHECK((exact.beta_star - sol.beta_star).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("coordinate ascent matches the enumeration oracle objective, n=8 d=16") {
    Dataset ds = random_instance(8, 16, 314);
    GramFactor gf(ds);
    SvmSolution iterative = solve_dual(ds, gf);
    SvmSolution exact = solve_exact_smalln(ds, gf);
    double obj_a = dual_objective(gf, ds.y, iterative.beta_star);
    double obj_b = dual_objective(gf, ds.y, exact.beta_star);
    CHECK(obj_a == doctest::Approx(obj_b).epsilon(1e-8));
}

TEST_CASE("oracle equivalence on random separable instances, n <= 10") {
    std::mt19937_64 rng(2718);
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 200; ++seed) {
        int n = 1 + static_cast<int>(rng() % 10);
        int d = n + static_cast<int>(rng() % (2 * n));
        Dataset ds = random_instance(n, d, 10000 + seed);
        GramFactor gf(ds);
        SvmSolution iterative = solve_dual(ds, gf);
        SvmSolution exact = solve_exact_smalln(ds, gf);
        double scale = std::max(1.0, exact.beta_star.cwiseAbs().maxCoeff());
        CHECK((iterative.beta_star - exact.beta_star).cwiseAbs().maxCoeff() <= 1e-7 * scale);
        ++checked;
    }
}

TEST_CASE("coincident points with opposite labels are not separable") {
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 1.0;
    Eigen::VectorXd y(2);
    y << 1.0, -1.0;
    Dataset ds = hand_dataset(X, y);
    GramFactor gf(ds);
    CHECK_THROWS_AS(solve_dual(ds, gf), NotSeparable);
    CHECK_THROWS_AS(solve_exact_smalln(ds, gf), NotSeparable);
}

TEST_CASE("support vector threshold semantics") {
    Eigen::VectorXd beta(3);
    beta << 1.0, 0.0, 1e-20;
    int boundary = -1;
    auto sv = support_vectors(beta, 1e-6, &boundary);
    CHECK(sv == std::vector<int>{0});
    CHECK(boundary == 0);

    Eigen::VectorXd with_band(3);
    with_band << 1.0, 5e-6, 1e-12;
    sv = support_vectors(with_band, 1e-6, &boundary);
    CHECK(sv == std::vector<int>{0, 1});
    CHECK(boundary == 1);
}

TEST_CASE("margin audit under Haar isotropic features") {
    Dataset ds = sample_haar(8, Spectrum::isotropic(32), SeedRecord{55, 0});
    apply_labels(ds, LabelModel::random_signs());
    GramFactor gf(ds);
    SvmSolution sol = solve_dual(ds, gf);
    REQUIRE(static_cast<int>(sol.sv_set.size()) == 8);

    MarginAudit audit = margin_audit(sol, gf, ds.spectrum, ds.y);
    CHECK(audit.wnorm_sq == doctest::Approx(8.0 / 32.0).epsilon(1e-8));
    CHECK(audit.y_K_inv_y == doctest::Approx(8.0 / 32.0).epsilon(1e-8));
    CHECK(audit.chain_ok);
    CHECK(audit.opnorm_event);
    // K = d I makes the margin-bound product exactly 1.
    CHECK(audit.bound_value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(audit.product_implication_ok);
}

TEST_CASE("margin audit requires full support") {
    Eigen::MatrixXd X(2, 2);
    X << 1.0, 0.0, 3.0, 0.1;
    Dataset ds = hand_dataset(X, Eigen::VectorXd::Ones(2));
    GramFactor gf(ds);
    SvmSolution sol = solve_dual(ds, gf);
    REQUIRE(sol.sv_set.size() == 1);
    CHECK_THROWS_AS(margin_audit(sol, gf, ds.spectrum, ds.y), PreconditionViolated);
}

TEST_CASE("KKT invariants hold on random converged solves") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        int n = 2 + static_cast<int>(seed % 14);
        Dataset ds = random_instance(n, 2 * n, 500 + seed);
        GramFactor gf(ds);
        SolverOptions opts;
        opts.tol_feas = 1e-8;
        SvmSolution sol = solve_dual(ds, gf, opts);
        REQUIRE(sol.diagnostics.converged);

        // Dual feasibility.
        for (int i = 0; i < n; ++i) CHECK(ds.y[i] * sol.beta_star[i] >= 0.0);

        // Primal feasibility and margin consistency.
        Eigen::VectorXd raw_margins(n);
        for (int i = 0; i < n; ++i) raw_margins[i] = ds.y[i] * ds.x_row(i).dot(sol.w_star);
        CHECK(raw_margins.minCoeff() >= 1.0 - opts.tol_feas);
        CHECK(raw_margins.minCoeff() == doctest::Approx(1.0).epsilon(1e-8));

        // Representation: w equals X^T beta by a direct rebuild.
        Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(ds.d());
        for (int i = 0; i < n; ++i) rebuilt += sol.beta_star[i] * ds.x_row(i);
        CHECK((rebuilt - sol.w_star).norm() <= 1e-8 * std::max(1.0, sol.w_star.norm()));

        // Complementary slackness: support vectors sit on the margin.
        for (int i : sol.sv_set) {
            CHECK(raw_margins[i] == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("dual objective is non-decreasing across sweeps") {
    for (std::uint64_t seed : {1ULL, 7ULL, 19ULL}) {
        Dataset ds = random_instance(16, 20, 900 + seed);
        GramFactor gf(ds);
        SolverOptions opts;
        opts.record_objective_trace = true;
        SvmSolution sol = solve_dual(ds, gf, opts);
        const auto& trace = sol.diagnostics.objective_trace;
        REQUIRE(trace.size() >= 1);
        for (std::size_t s = 1; s < trace.size(); ++s) {
            CHECK(trace[s] >= trace[s - 1] - 1e-10 * (1.0 + std::abs(trace[s])));
        }
    }
}

TEST_CASE("flipping all labels negates the solution exactly") {
    for (std::uint64_t seed : {3ULL, 12ULL, 77ULL}) {
        Dataset ds = random_instance(10, 20, 7000 + seed);
        GramFactor gf(ds);
        SvmSolution plus = solve_dual(ds, gf);

        Dataset flipped = ds;
        flipped.y = -ds.y;
        SvmSolution minus = solve_dual(flipped, gf);

        CHECK(plus.beta_star == -minus.beta_star);
        CHECK(plus.w_star == -minus.w_star);
    }
}

TEST_CASE("small-n oracle rejects n > 12") {
    Dataset ds = random_instance(13, 26, 1);
    GramFactor gf(ds);
    CHECK_THROWS_AS(solve_exact_smalln(ds, gf), std::invalid_argument);
}

TEST_SUITE_END();
