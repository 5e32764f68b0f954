#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "svp/rng.hpp"
#include "svp/spectrum.hpp"

namespace svp {

enum class EntryLaw {
    Gaussian,      // N(0,1)
    Rademacher,    // uniform on {-1,+1}
    UniformSqrt3,  // uniform on [-sqrt(3), sqrt(3)], unit variance
};

std::string to_string(EntryLaw law);

// Raw feature matrix Z plus the spectrum that defines the scaled features
// x_i = diag(lambda)^{1/2} z_i. The scaled features are computed on demand,
// never stored.
struct Dataset {
    Eigen::MatrixXd Z;  // n x d
    Spectrum spectrum;
    Eigen::VectorXd y;  // entries in {-1,+1}; empty until labels are applied
    SeedRecord seed_record;

    int n() const { return static_cast<int>(Z.rows()); }
    int d() const { return static_cast<int>(Z.cols()); }
    bool has_labels() const { return y.size() == Z.rows(); }

    Eigen::VectorXd x_row(int i) const {
        return spectrum.lambda().array().sqrt() * Z.row(i).transpose().array();
    }
    // Z * diag(lambda)^{1/2}, materialized temporarily for Gram products.
    Eigen::MatrixXd scaled_features() const {
        return Z * spectrum.lambda().array().sqrt().matrix().asDiagonal();
    }
    // X^T beta without forming X: diag(lambda)^{1/2} (Z^T beta).
    Eigen::VectorXd weights_from_dual(const Eigen::VectorXd& beta) const {
        return (spectrum.lambda().array().sqrt() * (Z.transpose() * beta).array()).matrix();
    }
};

enum class MultiIndexLink {
    Intersection,  // y = +1 iff every coordinate of Wx is >= 0
    LogisticSum,   // Pr(y=1) = sigmoid(sum_j (Wx)_j)
};

struct LabelModel {
    enum class Kind { Fixed, Logistic, Probit, OneBit, MultiIndex, RandomSigns };

    Kind kind = Kind::RandomSigns;
    Eigen::VectorXd fixed_values;  // Fixed
    Eigen::VectorXd w;             // Logistic / Probit / OneBit
    Eigen::MatrixXd W;             // MultiIndex, k x d
    MultiIndexLink link = MultiIndexLink::Intersection;

    static LabelModel fixed(Eigen::VectorXd values);
    static LabelModel logistic(Eigen::VectorXd w);
    static LabelModel probit(Eigen::VectorXd w);
    static LabelModel one_bit(Eigen::VectorXd w);
    static LabelModel multi_index(Eigen::MatrixXd W, MultiIndexLink link);
    static LabelModel random_signs();
};

// Independent sub-Gaussian entries, mean zero and unit variance.
// Precondition d >= n is enforced for all generated datasets.
Dataset sample_independent(int n, const Spectrum& spectrum, EntryLaw law, const SeedRecord& seed);

// sqrt(d) times the first n rows of a Haar-distributed d x d orthogonal
// matrix: Z Z^T = d I_n to machine precision.
Dataset sample_haar(int n, const Spectrum& spectrum, const SeedRecord& seed);

// Draws y_i independently given x_i according to the label model.
// sign(0) resolves to +1 wherever a sign is taken.
void apply_labels(Dataset& ds, const LabelModel& lm);

// Inputs t_i ~ U[0, 2pi); row i of Z is (1, cos t_i, sin t_i, ..., cos k t_i,
// sin k t_i) and the spectrum is trig(k, decay), so the scaled features carry
// the sqrt(eta_i) weighting. Returns the drawn inputs through `inputs`.
Dataset trig_dataset(int n, int k, double decay, const LabelModel& lm, const SeedRecord& seed,
                     Eigen::VectorXd* inputs = nullptr);

// Row of the unweighted trig feature map at input t (dimension 2k+1).
Eigen::VectorXd trig_feature_row(double t, int k);

}  // namespace svp
