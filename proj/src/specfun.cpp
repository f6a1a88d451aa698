#include "bbridge/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bbridge/error.hpp"

namespace bbridge::specfun {
namespace {

constexpr double kPoleDistance = 1e-12;
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double x, double tol = 0.0) {
    const double n = std::round(x);
    return n <= 0.0 && std::abs(x - n) <= tol;
}

void check_pole(double x) {
    if (is_nonpositive_integer(x, kPoleDistance)) {
        std::ostringstream os;
        os << "Gamma pole: argument " << x << " is within " << kPoleDistance
           << " of a nonpositive integer";
        throw PoleError(os.str());
    }
}

/// sin(pi x) with argument reduction done before multiplying by pi.
double sin_pi(double x) {
    double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
    if (r > 0.5) {
        r = 1.0 - r;
    } else if (r < -0.5) {
        r = -1.0 - r;
    }
    return std::sin(std::numbers::pi * r);
}

double lanczos_sum(double xm1) {
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        acc += kLanczos[i] / (xm1 + static_cast<double>(i));
    }
    return acc;
}

// Gamma(x) for x >= 0.5.
double gamma_right(double x) {
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    // split the power so t^(x-1/2) does not overflow before exp(-t) shrinks it
    const double half_pow = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) *
           lanczos_sum(xm1);
}

double log_gamma_right(double x) {
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
           std::log(lanczos_sum(xm1));
}

/// Signed product prod Gamma(num_i) / prod Gamma(den_j). Denominator poles
/// yield an exact zero; numerator poles throw.
template <std::size_t N, std::size_t M>
double gamma_ratio(const std::array<double, N>& num, const std::array<double, M>& den) {
    double log_sum = 0.0;
    int sign = 1;
    for (double d : den) {
        if (is_nonpositive_integer(d)) {
            return 0.0;
        }
    }
    for (double n : num) {
        const SignedLog lg = log_gamma(n);
        log_sum += lg.log_abs;
        sign *= lg.sign;
    }
    for (double d : den) {
        const SignedLog lg = log_gamma(d);
        log_sum -= lg.log_abs;
        sign *= lg.sign;
    }
    return sign * std::exp(log_sum);
}

void check_hyp_params(const HypParams& p) {
    if (is_nonpositive_integer(p.c, kPoleDistance)) {
        std::ostringstream os;
        os << "2F1 parameter c = " << p.c << " is a nonpositive integer";
        throw DomainError(os.str());
    }
    if (!(std::abs(p.z) < 1.0)) {
        std::ostringstream os;
        os << "2F1 argument z = " << p.z << " outside (-1, 1)";
        throw DomainError(os.str());
    }
}

// w = 1 - z, supplied separately so callers can keep it exact
double connection_formula(double alpha, double beta, double gamma, double w,
                          const SeriesOptions& opt) {
    const double diff = gamma - alpha - beta;
    const double coef1 =
        gamma_ratio<2, 2>({gamma, diff}, {gamma - alpha, gamma - beta});
    const double coef2 = gamma_ratio<2, 2>({gamma, -diff}, {alpha, beta});
    double term1 = 0.0;
    if (coef1 != 0.0) {
        term1 = coef1 * hyp2f1_series({alpha, beta, 1.0 - diff, w}, opt);
    }
    double term2 = 0.0;
    if (coef2 != 0.0) {
        term2 = coef2 * std::pow(w, diff) *
                hyp2f1_series({gamma - alpha, gamma - beta, diff + 1.0, w}, opt);
    }
    return term1 + term2;
}

constexpr double kIntegerBand = 1e-4;

// Integer c - a - b: interpolate in `a` through four shifted parameter sets at
// offsets -2h, -h, h, 2h from the degenerate point, each of which is at least
// h away from an integer difference.
double integer_difference_limit(const HypParams& p, double w, double nearest,
                                const SeriesOptions& opt) {
    const double h = kIntegerBand;
    const double a_star = p.c - p.b - nearest;
    const double tau = p.a - a_star;
    const std::array<double, 4> nodes = {-2.0 * h, -h, h, 2.0 * h};
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double weight = 1.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j != i) {
                weight *= (tau - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        acc += weight * connection_formula(a_star + nodes[i], p.b, p.c, w, opt);
    }
    return acc;
}

double kummer_series(double a, double b, double x) {
    constexpr int kMaxTerms = 20000;
    double term = 1.0;
    double sum = 1.0;
    int small = 0;
    for (int k = 0; k < kMaxTerms; ++k) {
        term *= (a + k) * x / ((b + k) * (k + 1.0));
        sum += term;
        if (term == 0.0) {
            return sum;
        }
        small = std::abs(term) <= 1e-16 * std::abs(sum) ? small + 1 : 0;
        if (small >= 3) {
            return sum;
        }
    }
    throw ConvergenceError("1F1 series did not converge", kMaxTerms, term);
}

// Algebraic expansion of M(a; b; -y) for large y; the exponentially small
// companion term is below 1e-17 relative once y >= 40.
double kummer_large_negative(double a, double b, double y) {
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 200; ++s) {
        const double next = term * (a + s) * (a - b + 1.0 + s) / ((s + 1.0) * y);
        if (std::abs(next) >= std::abs(prev) || std::abs(next) <= 1e-17 * std::abs(sum)) {
            break;
        }
        prev = term;
        term = next;
        sum += term;
    }
    return gamma(b) * rgamma(b - a) * std::pow(y, -a) * sum;
}

}  // namespace

SignedLog log_gamma(double x) {
    check_pole(x);
    if (x >= 0.5) {
        return {log_gamma_right(x), 1};
    }
    const double s = sin_pi(x);
    return {std::log(std::numbers::pi) - std::log(std::abs(s)) - log_gamma_right(1.0 - x),
            s < 0.0 ? -1 : 1};
}

double gamma(double x) {
    check_pole(x);
    if (x >= 0.5) {
        return gamma_right(x);
    }
    return std::numbers::pi / (sin_pi(x) * gamma_right(1.0 - x));
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) {
        return 0.0;
    }
    if (x >= 0.5) {
        return 1.0 / gamma_right(x);
    }
    return sin_pi(x) * gamma_right(1.0 - x) / std::numbers::pi;
}

double pochhammer(double a, int k) {
    if (k < 0) {
        throw DomainError("pochhammer: negative count");
    }
    double acc = 1.0;
    for (int j = 0; j < k; ++j) {
        acc *= a + j;
    }
    return acc;
}

double hyp2f1_series(const HypParams& p, const SeriesOptions& opt) {
    check_hyp_params(p);
    double term = 1.0;
    double sum = 1.0;
    int small = 0;
    int frozen = 0;
    int k = 0;
    for (; k < opt.max_terms; ++k) {
        term *= (p.a + k) * (p.b + k) / ((k + 1.0) * (p.c + k)) * p.z;
        const double next = sum + term;
        if (term == 0.0) {
            return next;  // terminating series
        }
        small = std::abs(term) <= opt.rel_tol * std::abs(next) ? small + 1 : 0;
        if (small >= 3) {
            return next;
        }
        // the sum no longer moves but the terms are still above rel_tol
        frozen = next == sum ? frozen + 1 : 0;
        sum = next;
        if (frozen >= 3) {
            break;
        }
    }
    std::ostringstream os;
    os << "2F1 series did not converge in " << k << " terms (a=" << p.a
       << ", b=" << p.b << ", c=" << p.c << ", z=" << p.z << ", rel_tol=" << opt.rel_tol << ")";
    throw ConvergenceError(os.str(), k, term);
}

double hyp2f1_near_one(double alpha, double beta, double gamma, double z,
                       const SeriesOptions& opt) {
    if (!(z > 0.0 && z < 1.0)) {
        throw DomainError("hyp2f1_near_one: z must lie in (0, 1)");
    }
    if (is_nonpositive_integer(gamma, kPoleDistance)) {
        throw DomainError("hyp2f1_near_one: gamma is a nonpositive integer");
    }
    const double diff = gamma - alpha - beta;
    if (std::abs(diff - std::round(diff)) < 1e-8) {
        std::ostringstream os;
        os << "hyp2f1_near_one: gamma - alpha - beta = " << diff
           << " is an integer (logarithmic case)";
        throw DomainError(os.str());
    }
    return connection_formula(alpha, beta, gamma, 1.0 - z, opt);
}

double hyp2f1(const HypParams& p, const SeriesOptions& opt) {
    return hyp2f1_complement(p, 1.0 - p.z, opt);
}

double hyp2f1_complement(const HypParams& p, double w, const SeriesOptions& opt) {
    if (!(w > 0.0 && w < 2.0)) {
        throw DomainError("hyp2f1: 1 - z must lie in (0, 2)");
    }
    // z itself may have rounded to 1; w carries the argument
    HypParams q = p;
    q.z = std::min(p.z, std::nextafter(1.0, 0.0));
    check_hyp_params(q);
    if (q.z == 0.0) {
        return 1.0;
    }
    if (q.z <= opt.z_switch) {
        return hyp2f1_series(q, opt);
    }
    const double diff = p.c - p.a - p.b;
    const double nearest = std::round(diff);
    if (std::abs(diff - nearest) < kIntegerBand) {
        return integer_difference_limit(p, w, nearest, opt);
    }
    return connection_formula(p.a, p.b, p.c, w, opt);
}

double asymptotic_prefactor(double alpha, double beta, double gamma) {
    if (is_nonpositive_integer(gamma, kPoleDistance)) {
        throw DomainError("asymptotic_prefactor: gamma is a nonpositive integer");
    }
    const double diff = gamma - alpha - beta;
    if (!(diff < 0.0) || std::abs(diff - std::round(diff)) < 1e-8) {
        std::ostringstream os;
        os << "asymptotic_prefactor: gamma - alpha - beta = " << diff
           << " must be negative and non-integer";
        throw DomainError(os.str());
    }
    const SignedLog g = log_gamma(gamma);
    const SignedLog d = log_gamma(-diff);
    const SignedLog ga = log_gamma(alpha);
    const SignedLog gb = log_gamma(beta);
    return g.sign * d.sign * ga.sign * gb.sign *
           std::exp(g.log_abs + d.log_abs - ga.log_abs - gb.log_abs);
}

ContiguousPair contiguous_pair(const HypParams& p, double fd_step, const SeriesOptions& opt) {
    if (!(p.z - fd_step > 0.0 && p.z + fd_step < 1.0)) {
        throw DomainError("contiguous_pair: z +- fd_step must stay inside (0, 1)");
    }
    const double e1 = p.c - p.b;
    const double e2 = p.a + p.b - p.c;
    auto weighted = [&](double z) {
        return std::pow(z, e1) * std::pow(1.0 - z, e2) * hyp2f1({p.a, p.b, p.c, z}, opt);
    };
    ContiguousPair out;
    out.lhs_derivative = (weighted(p.z + fd_step) - weighted(p.z - fd_step)) / (2.0 * fd_step);
    out.rhs = e1 * std::pow(p.z, e1 - 1.0) * std::pow(1.0 - p.z, e2 - 1.0) *
              hyp2f1({p.a, p.b - 1.0, p.c, p.z}, opt);
    return out;
}

double hyp1f1(double a, double b, double x) {
    if (is_nonpositive_integer(b, kPoleDistance)) {
        throw DomainError("1F1: b is a nonpositive integer");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (x > -1.0 || is_nonpositive_integer(a)) {
        return kummer_series(a, b, x);
    }
    if (x > -40.0 || is_nonpositive_integer(b - a)) {
        return std::exp(x) * kummer_series(b - a, b, -x);
    }
    return kummer_large_negative(a, b, -x);
}

}  // namespace bbridge::specfun
