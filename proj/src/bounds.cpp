#include "svp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "svp/errors.hpp"

namespace svp {

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

namespace {

BoundValue clip_probability(std::string name, double raw) {
    BoundValue bv;
    bv.name = std::move(name);
    bv.raw = raw;
    bv.value = std::clamp(raw, 0.0, 1.0);
    bv.clipped = bv.value != raw;
    return bv;
}

}  // namespace

BoundValue thm1_bound(int n, double d2, double d_inf, double v, double C, double c) {
    if (n < 1 || !(d2 > 0.0) || !(d_inf > 0.0) || !(v > 0.0) || !(C > 0.0) || !(c > 0.0)) {
        throw std::invalid_argument("thm1_bound: all inputs must be positive");
    }
    double term1 = std::exp(-c * std::min(d2 / (v * v), d_inf / v) + C * n);
    double term2 = std::exp(-c * d_inf / (v * n) + C * std::log(static_cast<double>(n)));
    return clip_probability("thm1", 1.0 - term1 - term2);
}

BoundValue thm2_bound(int n, int d, double d_inf, double C, double c) {
    if (n < 1 || d < n || !(d_inf > 0.0) || !(C > 0.0) || !(c > 0.0)) {
        throw std::invalid_argument("thm2_bound: require d >= n >= 1 and positive constants");
    }
    double term1 = std::exp(-c * d_inf + C * n);
    double shrink = static_cast<double>(d - n + 1) / static_cast<double>(d);
    double term2 = std::exp(-c * shrink * d_inf / n + C * std::log(static_cast<double>(n)));
    return clip_probability("thm2", 1.0 - term1 - term2);
}

BoundValue thm3_bound(int n, int d) {
    if (n < 2 || d < n) throw std::invalid_argument("thm3_bound: require d >= n >= 2");
    double dn = static_cast<double>(d - n);
    double arg = std::sqrt((dn + 4.0 + 2.0 * std::sqrt(dn + 2.0)) / static_cast<double>(n - 1));
    return clip_probability("thm3", std_normal_cdf(-arg) * (1.0 - std::exp(-1.0)));
}

BoundValue thm4_bound(int n, const Spectrum& spectrum, double c, double c_prime) {
    const int d = spectrum.d();
    if (d <= n) throw std::invalid_argument("thm4_bound: require d > n");
    if (!(c > 0.0) || !(c_prime > 0.0)) throw std::invalid_argument("thm4_bound: constants must be positive");
    double k_limit = static_cast<double>(n - 1) / c;
    if (k_limit <= 1.0) {
        throw NoAdmissibleK("thm4_bound: (n-1)/c <= 1 leaves no admissible k");
    }

    std::vector<double> sorted(spectrum.lambda().data(), spectrum.lambda().data() + d);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> tail(d + 1, 0.0);
    for (int j = d - 1; j >= 0; --j) tail[j] = tail[j + 1] + sorted[j];

    const double certain = 1.0 - 10.0 * std::exp(-static_cast<double>(n - 1) / c);
    double best_raw = -std::numeric_limits<double>::infinity();
    int best_k = -1;
    double best_b = 0.0;

    for (int k = 0; k < d && static_cast<double>(k) < k_limit; ++k) {
        double b = std::max(1.0 + 1e-12, tail[k] / (sorted[k] * static_cast<double>(n - 1)));
        double arg = std::sqrt(2.0 * c * b * b * static_cast<double>(n - 1) / static_cast<double>(k + 1));
        double raw = c_prime * std_normal_cdf(-arg) * certain;
        if (raw > best_raw) {
            best_raw = raw;
            best_k = k;
            best_b = b;
        }
    }

    BoundValue bv = clip_probability("thm4", best_raw);
    bv.k = best_k;
    bv.b = best_b;
    return bv;
}

BuhotFraction buhot_fraction(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("buhot_fraction: delta must be positive");
    BuhotFraction f;
    f.large_delta_branch = 0.952 / delta;
    f.small_delta_branch =
        1.0 - std::sqrt(2.0 * delta / std::numbers::pi) * std::exp(-1.0 / (2.0 * delta));
    f.value = delta >= 1.0 ? f.large_delta_branch : f.small_delta_branch;
    return f;
}

}  // namespace svp
