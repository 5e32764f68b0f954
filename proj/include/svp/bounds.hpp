#pragma once

#include <string>

#include "svp/spectrum.hpp"

namespace svp {

// Standard normal CDF through the complementary error function; keeps
// relative accuracy deep in the tail.
double std_normal_cdf(double t);

// Closed-form probability bound evaluation. Probability-type bounds are
// clipped to [0,1]; `raw` keeps the pre-clip value and `clipped` flags it.
struct BoundValue {
    std::string name;
    double value = 0.0;
    double raw = 0.0;
    bool clipped = false;
    // Maximizing parameters of the anisotropic-converse search.
    int k = -1;
    double b = 0.0;
};

// Independent sub-Gaussian features: success probability at least
// 1 - exp(-c min(d2/v^2, d_inf/v) + C n) - exp(-c d_inf/(v n) + C log n).
// C and c are user-supplied; the stated constants are unspecified universal
// ones, so overlays must say which values were used.
BoundValue thm1_bound(int n, double d2, double d_inf, double v, double C, double c);

// Haar features: 1 - exp(-c d_inf + C n)
//                  - exp(-c ((d-n+1)/d) (d_inf/n) + C log n).
BoundValue thm2_bound(int n, int d, double d_inf, double C, double c);

// Isotropic Gaussian converse: probability that at least one example is not
// a support vector is at least
// Phi(-sqrt((d-n+4+2 sqrt(d-n+2))/(n-1))) (1 - 1/e).
BoundValue thm3_bound(int n, int d);

// Anisotropic converse: maximizes
// c' Phi(-sqrt(2 c b^2 (n-1)/(k+1))) (1 - 10 e^{-(n-1)/c}) over admissible
// k < (n-1)/c with b = max(1+eps, sum_{j>k} lambda_j / (lambda_{k+1}(n-1))).
BoundValue thm4_bound(int n, const Spectrum& spectrum, double c, double c_prime);

// Asymptotic support-vector fraction at aspect ratio delta = n/d.
struct BuhotFraction {
    double value = 0.0;               // the branch selected by delta
    double large_delta_branch = 0.0;  // 0.952/delta
    double small_delta_branch = 0.0;  // 1 - sqrt(2 delta/pi) exp(-1/(2 delta))
};

BuhotFraction buhot_fraction(double delta);

}  // namespace svp
