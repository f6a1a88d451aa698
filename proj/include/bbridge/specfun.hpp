#pragma once

// Gamma-family functions and the Gauss hypergeometric function 2F1 on (-1, 1),
// including the two-term connection formula around z = 1, the
// contiguous relation check, and the confluent function 1F1 used by the
// closed-form bridge kernel.

namespace bbridge::specfun {

/// log|Gamma(x)| together with the sign of Gamma(x).
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;
};

SignedLog log_gamma(double x);

/// Gamma(x) evaluated directly (Lanczos + reflection). Overflows to inf past ~171.6.
double gamma(double x);

/// 1/Gamma(x); exactly 0 at the poles 0, -1, -2, ...
double rgamma(double x);

/// Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1.
double pochhammer(double a, int k);

struct HypParams {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
    double z = 0.0;
};

struct SeriesOptions {
    /// A term is negligible once |term| <= rel_tol * |partial sum|. A rel_tol
    /// below double rounding makes the series stall and throw ConvergenceError.
    double rel_tol = 1e-14;
    int max_terms = 10000;
    /// Above this argument hyp2f1 switches to the connection formula.
    double z_switch = 0.7;
};

/// Direct power series, valid for |z| < 1. Stops after three consecutive
/// negligible terms.
double hyp2f1_series(const HypParams& p, const SeriesOptions& opt = {});

/// 2F1(a, b; c; z) for z in (-1, 1). Routes z > z_switch through the
/// connection formula; when c - a - b sits within 1e-4 of an integer the
/// logarithmic case is approached by polynomial interpolation in `a` from
/// four nearby non-degenerate parameter sets.
double hyp2f1(const HypParams& p, const SeriesOptions& opt = {});

/// Same as hyp2f1, with w = 1 - z passed in exactly. Near z = 1 the
/// connection formula works in w, so a w known to full relative precision
/// (e.g. a time gap r - s scaled by positive factors) is not rounded away.
double hyp2f1_complement(const HypParams& p, double w, const SeriesOptions& opt = {});

inline double hyp2f1(double a, double b, double c, double z) {
    return hyp2f1(HypParams{a, b, c, z});
}

/// Two-term connection formula around z = 1 with both inner series taken at
/// 1 - z. Rejects |gamma - alpha - beta - round(.)| < 1e-8.
double hyp2f1_near_one(double alpha, double beta, double gamma, double z,
                       const SeriesOptions& opt = {});

/// Gamma(gamma) Gamma(alpha+beta-gamma) / (Gamma(alpha) Gamma(beta)), the
/// coefficient of (1-z)^(gamma-alpha-beta) in the z -> 1 divergence of 2F1.
double asymptotic_prefactor(double alpha, double beta, double gamma);

struct ContiguousPair {
    double lhs_derivative = 0.0;  ///< central difference of z^(c-b) (1-z)^(a+b-c) 2F1(a,b;c;z)
    double rhs = 0.0;             ///< (c-b) z^(c-b-1) (1-z)^(a+b-c-1) 2F1(a,b-1;c;z)
};

ContiguousPair contiguous_pair(const HypParams& p, double fd_step = 1e-5,
                               const SeriesOptions& opt = {});

/// Kummer's confluent function M(a; b; x) for real x. Negative arguments use
/// Kummer's transformation, and the algebraic large-|x| expansion below -40.
double hyp1f1(double a, double b, double x);

}  // namespace bbridge::specfun
