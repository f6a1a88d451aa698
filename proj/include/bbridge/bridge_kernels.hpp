#pragma once

// Closed-form quantities of the delta-dimensional Bessel bridge from 0 to 0
// on [0, 1]: densities, the conditional kernel Sigma_r(X_s | b) as a Gaussian
// times an even power series in b, the two-point function E[X_s X_r] with its
// r-derivatives, and the one-sided derivative limits on the diagonal.

#include <vector>

#include "bbridge/mu_pairing.hpp"

namespace bbridge::kernels {

class Dimension {
public:
    /// Throws DomainError unless delta is finite and > 0.
    explicit Dimension(double delta);

    double delta() const { return delta_; }
    /// |delta - 2| < 1e-6: the drift term must go through the delta = 2 limit.
    bool near_two() const;

private:
    double delta_;
};

/// Two times in (0, 1) together with their difference. Near the diagonal the
/// gap is carried separately so that r - s keeps full relative precision.
struct TimePair {
    double s = 0.0;
    double r = 0.0;
    double gap = 0.0;  ///< r - s

    static TimePair of(double s, double r) { return {s, r, r - s}; }
    /// r = s + gap, with gap kept exactly.
    static TimePair offset(double s, double gap) { return {s, s + gap, gap}; }
};

/// 2 Gamma((delta+1)/2)^2 / Gamma(delta/2)^2.
double kernel_constant(const Dimension& d);

/// Density of X_r at b >= 0 under the bridge law.
double marginal_density(const Dimension& d, double r, double b);

/// Bessel transition density p_t(x, y); x = 0 uses the closed form, x > 0 the
/// modified-Bessel series summed in log space outward from its largest term,
/// or its large-argument expansion once x y / t > 100.
double transition_density(const Dimension& d, double t, double x, double y);

/// p_{1-r}(b, 0) / p_1(0, 0) = (1-r)^(-delta/2) exp(-b^2 / (2(1-r))).
double end_ratio(const Dimension& d, double r, double b);

/// Joint density of (X_s, X_r) at (a, b) for 0 < s < r < 1.
double joint_density(const Dimension& d, double s, double r, double a, double b);

enum class SigmaMode {
    series_only,  ///< pure power series; b is limited to b_max
    hybrid,       ///< series while kappa b^2 <= 10, closed Kummer form beyond
};

struct SigmaOptions {
    /// Largest b the series must cover; <= 0 selects 10 sqrt(r(1-r)).
    double b_max = 0.0;
    SigmaMode mode = SigmaMode::hybrid;
};

/// b -> Sigma_r(X_s | b) = prefactor exp(-gauss_rate b^2) sum_k coeffs[k] (kappa b^2)^k.
/// Coefficients are kept in the scaled variable so they stay bounded as r -> s.
/// The same function equals prefactor coeffs[0] exp(-omega b^2) M(-1/2; delta/2; -kappa b^2).
struct SigmaSeries {
    double delta = 0.0;
    double s = 0.0;
    double r = 0.0;
    double gap = 0.0;
    double prefactor = 0.0;   ///< 1 / (2^(delta/2-1) (r(1-r))^(delta/2))
    double gauss_rate = 0.0;  ///< D(s, r) / 2
    std::vector<double> coeffs;
    double b_max = 0.0;
    SigmaMode mode = SigmaMode::hybrid;
    double series_limit = 0.0;  ///< the series is used for b <= series_limit
    double kappa = 0.0;         ///< coeffs[k+1] / coeffs[k] = (k + (delta+1)/2) / ((k + delta/2)(k+1))
    double omega = 0.0;         ///< 1 / (2 r (1-r))
};

/// Throws DomainError for s, r outside (0, 1) or s == r, ConvergenceError when
/// the series needs more than 500 terms to reach b_max (series_only mode).
SigmaSeries sigma_series(const Dimension& d, const TimePair& t, const SigmaOptions& opt = {});

inline SigmaSeries sigma_series(const Dimension& d, double s, double r, const SigmaOptions& opt = {}) {
    return sigma_series(d, TimePair::of(s, r), opt);
}

double sigma_eval(const SigmaSeries& sigma, double b);

/// Analytic b-derivative of order 1, 2 or 3. Odd orders are exactly 0 at b = 0.
double sigma_deriv(const SigmaSeries& sigma, double b, int order);

/// Sigma as a test function for mu_alpha: exact Taylor data, third derivative,
/// Gaussian decay certificate and Maclaurin remainder near 0.
mu::SmoothTestFunction sigma_test_function(const SigmaSeries& sigma);

/// E[X_s X_r]; symmetric, delta s (1-s) on the diagonal.
double two_point(const Dimension& d, const TimePair& t);
/// d/dr E[X_s X_r], s != r.
double two_point_dr(const Dimension& d, const TimePair& t);
/// d^2/dr^2 E[X_s X_r], s != r.
double two_point_d2r(const Dimension& d, const TimePair& t);

inline double two_point(const Dimension& d, double s, double r) { return two_point(d, TimePair::of(s, r)); }
inline double two_point_dr(const Dimension& d, double s, double r) {
    return two_point_dr(d, TimePair::of(s, r));
}
inline double two_point_d2r(const Dimension& d, double s, double r) {
    return two_point_d2r(d, TimePair::of(s, r));
}

struct DerivativeLimits {
    double d_plus = 0.0;   ///< r -> s+
    double d_minus = 0.0;  ///< r -> s-
};

DerivativeLimits derivative_limits(const Dimension& d, double s);

}  // namespace bbridge::kernels
