#pragma once

#include <Eigen/Dense>
#include <string>

namespace svp {

// Positive weight vector lambda parameterizing the feature covariance.
// Scaled features are x_i = diag(lambda)^{1/2} z_i; everything downstream
// (Gram matrix, effective dimensions) is a function of lambda.
class Spectrum {
public:
    explicit Spectrum(Eigen::VectorXd lambda);

    static Spectrum isotropic(int d);

    // Trigonometric/Fourier spectrum (1, eta_1, eta_1, ..., eta_k, eta_k)
    // with eta_i = 1/i^decay; the ambient dimension is 2k+1.
    static Spectrum trig(int k, double decay);

    const Eigen::VectorXd& lambda() const { return lambda_; }
    int d() const { return static_cast<int>(lambda_.size()); }

    // Compensated sums, accumulated in descending magnitude; bi-level
    // spectra span many orders of magnitude.
    double l1() const;
    double l2_squared() const;
    double max() const { return lambda_.maxCoeff(); }

private:
    Eigen::VectorXd lambda_;
};

struct EffectiveDims {
    double d2 = 1.0;     // ||lambda||_1^2 / ||lambda||_2^2
    double d_inf = 1.0;  // ||lambda||_1 / ||lambda||_inf
    int d = 1;
};

EffectiveDims effective_dims(const Spectrum& s);

// Effective dimensions of an arbitrary nonnegative weight sequence
// (used for Gram-eigenvalue analogues as well as for lambda itself).
EffectiveDims effective_dims_of_weights(const Eigen::VectorXd& weights);

// Exponent triple (p, q, r) for the spiked/bi-level ensemble: d = floor(n^p),
// k = floor(n^r) spikes carrying total mass n^{-q} * d.
//
// The classifier below is meaningful for any q >= 0 even though the ensemble
// construction itself lives in 0 < q < 1.
struct RateRegionPoint {
    double p;
    double q;
    double r;

    RateRegionPoint(double p_, double q_, double r_);
};

// Bi-level spiked spectrum: k = floor(n^r) entries equal to a*d/k and d-k
// entries equal to (1-a)*d/(d-k), with d = floor(n^p) and a = n^{-q}.
// The total mass is d exactly (up to rounding).
Spectrum bilevel_spectrum(const RateRegionPoint& pt, int n);

enum class RateRegion {
    BenignMargin,         // q < 1-r: classical margin bounds already work
    BenignProliferation,  // 1-r < q < 1-r+(p-1)/2, covered by prior work too
    PriorWorkGap,         // inside the rate region but outside prior work's
    Outside,              // q >= 1-r+(p-1)/2
};

struct RateRegionLabel {
    RateRegion region;
    bool boundary;  // within 1e-9 of a defining boundary
};

RateRegionLabel rate_region_classify(const RateRegionPoint& pt);

std::string to_string(RateRegion region);

}  // namespace svp
