#include "svp/dataset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace svp {

std::string to_string(EntryLaw law) {
    switch (law) {
        case EntryLaw::Gaussian: return "gaussian";
        case EntryLaw::Rademacher: return "rademacher";
        case EntryLaw::UniformSqrt3: return "uniform_sqrt3";
    }
    return "unknown";
}

LabelModel LabelModel::fixed(Eigen::VectorXd values) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] != 1.0 && values[i] != -1.0) {
            throw std::invalid_argument("LabelModel::fixed: values must be +1 or -1");
        }
    }
    LabelModel lm;
    lm.kind = Kind::Fixed;
    lm.fixed_values = std::move(values);
    return lm;
}

LabelModel LabelModel::logistic(Eigen::VectorXd w) {
    LabelModel lm;
    lm.kind = Kind::Logistic;
    lm.w = std::move(w);
    return lm;
}

LabelModel LabelModel::probit(Eigen::VectorXd w) {
    LabelModel lm;
    lm.kind = Kind::Probit;
    lm.w = std::move(w);
    return lm;
}

LabelModel LabelModel::one_bit(Eigen::VectorXd w) {
    LabelModel lm;
    lm.kind = Kind::OneBit;
    lm.w = std::move(w);
    return lm;
}

LabelModel LabelModel::multi_index(Eigen::MatrixXd W, MultiIndexLink link) {
    LabelModel lm;
    lm.kind = Kind::MultiIndex;
    lm.W = std::move(W);
    lm.link = link;
    return lm;
}

LabelModel LabelModel::random_signs() {
    LabelModel lm;
    lm.kind = Kind::RandomSigns;
    return lm;
}

namespace {

void require_high_dimensional(int n, int d) {
    if (n < 1) throw std::invalid_argument("sampler: n must be >= 1");
    if (d < n) throw std::invalid_argument("sampler: require d >= n");
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

}  // namespace

Dataset sample_independent(int n, const Spectrum& spectrum, EntryLaw law, const SeedRecord& seed) {
    const int d = spectrum.d();
    require_high_dimensional(n, d);

    auto rng = make_stream(seed, "sample_independent");
    Eigen::MatrixXd Z(n, d);
    switch (law) {
        case EntryLaw::Gaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) Z(i, j) = normal(rng);
            break;
        }
        case EntryLaw::Rademacher: {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) Z(i, j) = (rng() & 1ULL) ? 1.0 : -1.0;
            break;
        }
        case EntryLaw::UniformSqrt3: {
            const double half_width = std::sqrt(3.0);
            std::uniform_real_distribution<double> uniform(-half_width, half_width);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) Z(i, j) = uniform(rng);
            break;
        }
    }
    return Dataset{std::move(Z), spectrum, Eigen::VectorXd(), seed};
}

Dataset sample_haar(int n, const Spectrum& spectrum, const SeedRecord& seed) {
    const int d = spectrum.d();
    require_high_dimensional(n, d);

    auto rng = make_stream(seed, "sample_haar");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd G(d, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) G(i, j) = normal(rng);

    // Thin QR of a d x n Gaussian matrix; forcing the triangular factor to
    // have a positive diagonal makes Q exactly Haar on the Stiefel manifold.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, n);
    Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    }

    Eigen::MatrixXd Z = std::sqrt(static_cast<double>(d)) * Q.transpose();
    return Dataset{std::move(Z), spectrum, Eigen::VectorXd(), seed};
}

void apply_labels(Dataset& ds, const LabelModel& lm) {
    const int n = ds.n();
    const int d = ds.d();
    Eigen::VectorXd y(n);

    auto rng = make_stream(ds.seed_record, "apply_labels");
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto draw_sign = [&](double prob_plus) { return unit(rng) < prob_plus ? 1.0 : -1.0; };

    switch (lm.kind) {
        case LabelModel::Kind::Fixed: {
            if (lm.fixed_values.size() != n) {
                throw std::invalid_argument("apply_labels: fixed label vector has wrong length");
            }
            y = lm.fixed_values;
            break;
        }
        case LabelModel::Kind::RandomSigns: {
            for (int i = 0; i < n; ++i) y[i] = (rng() & 1ULL) ? 1.0 : -1.0;
            break;
        }
        case LabelModel::Kind::Logistic:
        case LabelModel::Kind::Probit:
        case LabelModel::Kind::OneBit: {
            if (lm.w.size() != d) {
                throw std::invalid_argument("apply_labels: GLM weight vector has wrong length");
            }
            // x_i^T w = z_i^T (diag(lambda)^{1/2} w), without forming X.
            Eigen::VectorXd scaled_w = (ds.spectrum.lambda().array().sqrt() * lm.w.array()).matrix();
            Eigen::VectorXd margins = ds.Z * scaled_w;
            for (int i = 0; i < n; ++i) {
                if (lm.kind == LabelModel::Kind::OneBit) {
                    y[i] = margins[i] >= 0.0 ? 1.0 : -1.0;
                } else if (lm.kind == LabelModel::Kind::Logistic) {
                    y[i] = draw_sign(sigmoid(margins[i]));
                } else {
                    y[i] = draw_sign(std_normal_cdf(margins[i]));
                }
            }
            break;
        }
        case LabelModel::Kind::MultiIndex: {
            if (lm.W.cols() != d || lm.W.rows() < 1) {
                throw std::invalid_argument("apply_labels: multi-index matrix has wrong shape");
            }
            Eigen::MatrixXd scaled_W = lm.W * ds.spectrum.lambda().array().sqrt().matrix().asDiagonal();
            Eigen::MatrixXd U = ds.Z * scaled_W.transpose();  // n x k, row i = W x_i
            for (int i = 0; i < n; ++i) {
                switch (lm.link) {
                    case MultiIndexLink::Intersection:
                        y[i] = (U.row(i).minCoeff() >= 0.0) ? 1.0 : -1.0;
                        break;
                    case MultiIndexLink::LogisticSum:
                        y[i] = draw_sign(sigmoid(U.row(i).sum()));
                        break;
                }
            }
            break;
        }
    }
    ds.y = std::move(y);
}

Eigen::VectorXd trig_feature_row(double t, int k) {
    Eigen::VectorXd row(2 * k + 1);
    row[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
        row[2 * j - 1] = std::cos(j * t);
        row[2 * j] = std::sin(j * t);
    }
    return row;
}

Dataset trig_dataset(int n, int k, double decay, const LabelModel& lm, const SeedRecord& seed,
                     Eigen::VectorXd* inputs) {
    if (2 * k + 1 < n) throw std::invalid_argument("trig_dataset: require 2k+1 >= n");

    auto rng = make_stream(seed, "trig_dataset_inputs");
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = angle(rng);
    if (inputs != nullptr) *inputs = t;

    Eigen::MatrixXd Z(n, 2 * k + 1);
    for (int i = 0; i < n; ++i) Z.row(i) = trig_feature_row(t[i], k).transpose();

    Dataset ds{std::move(Z), Spectrum::trig(k, decay), Eigen::VectorXd(), seed};
    apply_labels(ds, lm);
    return ds;
}

}  // namespace svp
