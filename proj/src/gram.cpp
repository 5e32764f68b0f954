#include "svp/gram.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "svp/errors.hpp"

namespace svp {

namespace {
constexpr int kMaxDenseEigenN = 2000;
constexpr double kSolveResidualTol = 1e-8;
constexpr int kMaxRefinementSteps = 4;
}  // namespace

GramFactor::GramFactor(const Dataset& ds) {
    Eigen::MatrixXd scaled = ds.scaled_features();
    K_ = scaled * scaled.transpose();
    K_ = 0.5 * (K_ + K_.transpose()).eval();
    factorize();
}

GramFactor::GramFactor(Eigen::MatrixXd matrix) : K_(std::move(matrix)) {
    if (K_.rows() != K_.cols() || K_.rows() < 1) {
        throw std::invalid_argument("GramFactor: matrix must be square and non-empty");
    }
    double scale = K_.cwiseAbs().maxCoeff();
    if ((K_ - K_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
        throw std::invalid_argument("GramFactor: matrix must be symmetric");
    }
    K_ = 0.5 * (K_ + K_.transpose()).eval();
    factorize();
}

void GramFactor::factorize() {
    ldlt_.compute(K_);
    const Eigen::VectorXd& pivots = ldlt_.vectorD();
    double min_pivot = pivots.minCoeff();
    double max_pivot = pivots.maxCoeff();

    const double eps = std::numeric_limits<double>::epsilon();
    singular_ = min_pivot <= static_cast<double>(n()) * eps * std::max(max_pivot, 0.0);
    condition_estimate_ = singular_ ? std::numeric_limits<double>::infinity()
                                    : max_pivot / min_pivot;
}

Eigen::VectorXd GramFactor::solve(const Eigen::VectorXd& rhs) const {
    if (singular_) throw SingularGram("solve: Gram matrix flagged singular");
    if (rhs.size() != n()) throw std::invalid_argument("solve: rhs has wrong length");

    double rhs_norm = rhs.norm();
    Eigen::VectorXd beta = ldlt_.solve(rhs);
    if (rhs_norm == 0.0) return beta;

    for (int step = 0; step < kMaxRefinementSteps; ++step) {
        Eigen::VectorXd residual = rhs - K_ * beta;
        if (residual.norm() <= kSolveResidualTol * rhs_norm) return beta;
        beta += ldlt_.solve(residual);
    }
    if ((rhs - K_ * beta).norm() <= kSolveResidualTol * rhs_norm) return beta;
    throw SingularGram("solve: iterative refinement could not reach residual tolerance");
}

Eigen::VectorXd GramFactor::inverse_diagonal() const {
    if (singular_) throw SingularGram("inverse_diagonal: Gram matrix flagged singular");

    Eigen::MatrixXd inv = ldlt_.solve(Eigen::MatrixXd::Identity(n(), n()));
    Eigen::VectorXd diag = inv.diagonal();
    for (int i = 0; i < n(); ++i) {
        if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) {
            throw SingularGram("inverse_diagonal: non-positive diagonal entry of K^{-1}");
        }
    }
    return diag;
}

void GramFactor::ensure_eigen() const {
    if (eigen_done_) return;
    if (n() > kMaxDenseEigenN) {
        throw std::invalid_argument("GramFactor: dense eigendecomposition limited to n <= 2000");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("GramFactor: eigendecomposition failed");
    }
    eigenvalues_ = solver.eigenvalues();
    eigen_done_ = true;
}

double GramFactor::eigmin() const {
    ensure_eigen();
    return eigenvalues_.minCoeff();
}

double GramFactor::op_norm() const {
    ensure_eigen();
    return eigenvalues_.maxCoeff();
}

const Eigen::VectorXd& GramFactor::eigenvalues() const {
    ensure_eigen();
    return eigenvalues_;
}

EffectiveDims GramFactor::effective_dims() const {
    ensure_eigen();
    Eigen::VectorXd clamped = eigenvalues_.cwiseMax(0.0);
    return effective_dims_of_weights(clamped);
}

}  // namespace svp
