#pragma once

#include <Eigen/Dense>

#include "svp/dataset.hpp"
#include "svp/spectrum.hpp"

namespace svp {

// Gram matrix K_ij = x_i^T x_j together with its factorization and
// singularity diagnostics. Immutable after construction; concurrent solves
// against one factor are fine.
class GramFactor {
public:
    // K = (Z L^{1/2})(Z L^{1/2})^T, symmetrized by averaging with the
    // transpose, then LDL^T-factorized.
    explicit GramFactor(const Dataset& ds);

    // For hand-built kernels in tests and tools. `matrix` must be symmetric.
    explicit GramFactor(Eigen::MatrixXd matrix);

    int n() const { return static_cast<int>(K_.rows()); }
    const Eigen::MatrixXd& K() const { return K_; }

    // Smallest pivot <= n * eps * largest pivot.
    bool singular() const { return singular_; }
    double condition_estimate() const { return condition_estimate_; }

    // Solves K beta = rhs with iterative refinement until the residual is
    // below 1e-8 * ||rhs||. Throws SingularGram if flagged or unreachable.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    // (K^{-1})_ii for all i, column by column from the factorization.
    // Entries are strictly positive for a non-singular PSD kernel; a
    // non-positive entry is reported as SingularGram.
    Eigen::VectorXd inverse_diagonal() const;

    // Dense symmetric eigendecomposition; n <= 2000 only.
    double eigmin() const;
    double op_norm() const;
    const Eigen::VectorXd& eigenvalues() const;

    // Effective dimensions of the Gram eigenvalue sequence (the Gram-based
    // analogues of d2 and d_inf). Tiny negative eigenvalues are clamped to 0.
    EffectiveDims effective_dims() const;

private:
    void factorize();
    void ensure_eigen() const;

    Eigen::MatrixXd K_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    double condition_estimate_ = 0.0;
    bool singular_ = false;

    mutable bool eigen_done_ = false;
    mutable Eigen::VectorXd eigenvalues_;
};

inline GramFactor gram(const Dataset& ds) { return GramFactor(ds); }

}  // namespace svp
