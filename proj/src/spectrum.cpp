#include "svp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace svp {

namespace {

// Neumaier compensated sum over values sorted in descending magnitude.
double compensated_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

}  // namespace

Spectrum::Spectrum(Eigen::VectorXd lambda) : lambda_(std::move(lambda)) {
    if (lambda_.size() < 1) {
        throw std::invalid_argument("Spectrum: dimension must be >= 1");
    }
    for (Eigen::Index j = 0; j < lambda_.size(); ++j) {
        if (!(lambda_[j] > 0.0) || !std::isfinite(lambda_[j])) {
            throw std::invalid_argument("Spectrum: all weights must be strictly positive and finite");
        }
    }
}

Spectrum Spectrum::isotropic(int d) {
    if (d < 1) throw std::invalid_argument("isotropic: d must be >= 1");
    return Spectrum(Eigen::VectorXd::Ones(d));
}

Spectrum Spectrum::trig(int k, double decay) {
    if (k < 1) throw std::invalid_argument("trig: k must be >= 1");
    Eigen::VectorXd lambda(2 * k + 1);
    lambda[0] = 1.0;
    for (int i = 1; i <= k; ++i) {
        double eta = std::pow(static_cast<double>(i), -decay);
        lambda[2 * i - 1] = eta;
        lambda[2 * i] = eta;
    }
    return Spectrum(std::move(lambda));
}

double Spectrum::l1() const {
    std::vector<double> v(lambda_.data(), lambda_.data() + lambda_.size());
    return compensated_sum(std::move(v));
}

double Spectrum::l2_squared() const {
    std::vector<double> v(lambda_.size());
    for (Eigen::Index j = 0; j < lambda_.size(); ++j) v[j] = lambda_[j] * lambda_[j];
    return compensated_sum(std::move(v));
}

EffectiveDims effective_dims_of_weights(const Eigen::VectorXd& weights) {
    if (weights.size() < 1) throw std::invalid_argument("effective_dims: empty weights");
    double maxw = weights.maxCoeff();
    if (!(maxw > 0.0)) throw std::invalid_argument("effective_dims: max weight must be positive");

    // Normalize by the max entry first: the ratios are scale invariant and
    // normalization avoids overflow when weights span many decades.
    std::vector<double> s1(weights.size()), s2(weights.size());
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        double w = weights[j] / maxw;
        s1[j] = w;
        s2[j] = w * w;
    }
    double sum1 = compensated_sum(std::move(s1));
    double sum2 = compensated_sum(std::move(s2));

    EffectiveDims dims;
    dims.d = static_cast<int>(weights.size());
    dims.d2 = sum1 * sum1 / sum2;
    dims.d_inf = sum1;
    return dims;
}

EffectiveDims effective_dims(const Spectrum& s) {
    return effective_dims_of_weights(s.lambda());
}

RateRegionPoint::RateRegionPoint(double p_, double q_, double r_) : p(p_), q(q_), r(r_) {
    if (!(p > 1.0)) throw std::invalid_argument("RateRegionPoint: require p > 1");
    if (!(q >= 0.0)) throw std::invalid_argument("RateRegionPoint: require q >= 0");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("RateRegionPoint: require 0 < r < 1");
}

Spectrum bilevel_spectrum(const RateRegionPoint& pt, int n) {
    if (n < 2) throw std::invalid_argument("bilevel_spectrum: require n >= 2");
    auto d_ll = static_cast<long long>(std::floor(std::pow(static_cast<double>(n), pt.p)));
    auto k_ll = static_cast<long long>(std::floor(std::pow(static_cast<double>(n), pt.r)));
    if (k_ll < 1) throw std::invalid_argument("bilevel_spectrum: floor(n^r) must be >= 1");
    if (d_ll <= k_ll) throw std::invalid_argument("bilevel_spectrum: floor(n^p) must exceed floor(n^r)");
    if (d_ll > (1LL << 26)) throw std::invalid_argument("bilevel_spectrum: dimension too large for desk scale");
    if (pt.q == 0.0) {
        throw std::invalid_argument("bilevel_spectrum: q = 0 gives a = 1 and non-positive small entries");
    }

    const auto d = static_cast<int>(d_ll);
    const auto k = static_cast<int>(k_ll);
    const double a = std::pow(static_cast<double>(n), -pt.q);
    const double large = a * static_cast<double>(d) / static_cast<double>(k);
    const double small = (1.0 - a) * static_cast<double>(d) / static_cast<double>(d - k);

    Eigen::VectorXd lambda(d);
    lambda.head(k).setConstant(large);
    lambda.tail(d - k).setConstant(small);
    return Spectrum(std::move(lambda));
}

RateRegionLabel rate_region_classify(const RateRegionPoint& pt) {
    constexpr double kBoundaryTol = 1e-9;

    const double margin_edge = 1.0 - pt.r;                       // q below: margin bounds suffice
    const double region_edge = 1.0 - pt.r + (pt.p - 1.0) / 2.0;  // q above: outside the rate region
    const double gap_edge = 1.5 - pt.r;                          // prior work resumes above this

    RateRegionLabel label{};
    label.boundary = std::abs(pt.q - margin_edge) <= kBoundaryTol ||
                     std::abs(pt.q - region_edge) <= kBoundaryTol ||
                     std::abs(pt.q - gap_edge) <= kBoundaryTol;

    if (pt.q < margin_edge) {
        label.region = RateRegion::BenignMargin;
    } else if (pt.q >= region_edge) {
        label.region = RateRegion::Outside;
    } else if (pt.q <= gap_edge) {
        // Inside the rate region but not in the prior-work region
        // {q < 1-r} u {3/2-r < q < 1-r+(p-1)/2}.
        label.region = RateRegion::PriorWorkGap;
    } else {
        label.region = RateRegion::BenignProliferation;
    }
    return label;
}

std::string to_string(RateRegion region) {
    switch (region) {
        case RateRegion::BenignMargin: return "benign-margin";
        case RateRegion::BenignProliferation: return "benign-proliferation";
        case RateRegion::PriorWorkGap: return "prior-work-gap";
        case RateRegion::Outside: return "outside";
    }
    return "unknown";
}

}  // namespace svp
