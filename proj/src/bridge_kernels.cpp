#include "bbridge/bridge_kernels.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bbridge/error.hpp"
#include "bbridge/specfun.hpp"

namespace bbridge::kernels {
namespace {

using specfun::hyp2f1_complement;
using specfun::log_gamma;

constexpr int kMaxSigmaTerms = 500;
constexpr int kMaxTransitionTerms = 20000;
// Bessel argument beyond which I_nu switches to its large-argument expansion
constexpr double kBesselAsymptotic = 100.0;
// hybrid mode keeps the series while kappa b^2 stays below this
constexpr double kSeriesArgument = 10.0;

void check_time(double t, const char* what) {
    if (!(t > 0.0 && t < 1.0)) {
        std::ostringstream os;
        os << what << " = " << t << " must lie in (0, 1)";
        throw DomainError(os.str());
    }
}

void check_pair(const TimePair& t) {
    check_time(t.s, "s");
    check_time(t.r, "r");
    if (t.gap == 0.0) {
        throw DomainError("s and r must differ");
    }
}

double lgamma_value(double x) { return log_gamma(x).log_abs; }

// Value and first three derivatives of y -> M(-1/2; c; -y).
std::array<double, 4> kummer_derivs(double c, double y) {
    std::array<double, 4> out{};
    double coef = 1.0;  // (-1)^j (-1/2)_j / (c)_j
    for (int j = 0; j < 4; ++j) {
        out[j] = coef * specfun::hyp1f1(-0.5 + j, c + j, -y);
        coef *= -(-0.5 + j) / (c + j);
    }
    return out;
}

// Derivatives of u -> sum_k coeffs[k] u^k.
std::array<double, 4> series_derivs(const std::vector<double>& coeffs, double u) {
    std::array<double, 4> out{};
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
        out[3] = out[3] * u + 3.0 * out[2];
        out[2] = out[2] * u + 2.0 * out[1];
        out[1] = out[1] * u + out[0];
        out[0] = out[0] * u + coeffs[k];
    }
    return out;
}

// n-th b-derivative of amp * exp(-rho b^2) * m(lambda b^2), given m and its
// first three derivatives at lambda b^2.
double gauss_product_deriv(double amp, double rho, double lambda, const std::array<double, 4>& m,
                           double b, int n) {
    const double b2 = b * b;
    const double e = std::exp(-rho * b2);
    const std::array<double, 4> ed = {
        e,
        -2.0 * rho * b * e,
        (4.0 * rho * rho * b2 - 2.0 * rho) * e,
        (-8.0 * rho * rho * rho * b2 * b + 12.0 * rho * rho * b) * e,
    };
    const std::array<double, 4> gd = {
        m[0],
        2.0 * lambda * b * m[1],
        2.0 * lambda * m[1] + 4.0 * lambda * lambda * b2 * m[2],
        12.0 * lambda * lambda * b * m[2] + 8.0 * lambda * lambda * lambda * b2 * b * m[3],
    };
    static constexpr std::array<std::array<double, 4>, 4> binom = {
        {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        acc += binom[n][i] * ed[i] * gd[n - i];
    }
    return amp * acc;
}

bool uses_series(const SigmaSeries& sigma, double b) {
    if (b < 0.0 || std::isnan(b)) {
        throw DomainError("Sigma: b must be nonnegative");
    }
    if (b <= sigma.series_limit) {
        return true;
    }
    if (sigma.mode == SigmaMode::series_only) {
        std::ostringstream os;
        os << "Sigma: b = " << b << " beyond the declared b_max = " << sigma.b_max;
        throw DomainError(os.str());
    }
    return false;
}

// Lower-branch (s < r) two-point function; w = 1 - z = gap / (r (1 - s)).
double two_point_lower(double delta, double k, double s, double r, double gap) {
    const double a = 0.5 * (delta + 1.0);
    const double c = 0.5 * delta;
    const double z = s * (1.0 - r) / (r * (1.0 - s));
    const double w = gap / (r * (1.0 - s));
    return k * s * (1.0 - r) * std::pow(z, -0.5) * std::pow(w, c + 1.0) *
           hyp2f1_complement({a, a, c, z}, w);
}

}  // namespace

Dimension::Dimension(double delta) : delta_(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        std::ostringstream os;
        os << "dimension delta = " << delta << " must be finite and positive";
        throw DomainError(os.str());
    }
}

bool Dimension::near_two() const { return std::abs(delta_ - 2.0) < 1e-6; }

double kernel_constant(const Dimension& d) {
    const double delta = d.delta();
    return 2.0 * std::exp(2.0 * (lgamma_value(0.5 * (delta + 1.0)) - lgamma_value(0.5 * delta)));
}

double marginal_density(const Dimension& d, double r, double b) {
    check_time(r, "r");
    if (b < 0.0) {
        throw DomainError("marginal_density: b must be nonnegative");
    }
    const double delta = d.delta();
    const double v = r * (1.0 - r);
    const double log_norm = (0.5 * delta - 1.0) * std::log(2.0) + lgamma_value(0.5 * delta) + 0.5 * delta * std::log(v);
    if (b == 0.0 || std::isinf(b)) {
        return std::isinf(b) ? 0.0 : std::pow(b, delta - 1.0) * std::exp(-log_norm);
    }
    return std::exp((delta - 1.0) * std::log(b) - b * b / (2.0 * v) - log_norm);
}

double transition_density(const Dimension& d, double t, double x, double y) {
    if (!(t > 0.0) || x < 0.0 || y < 0.0) {
        throw DomainError("transition_density: need t > 0 and x, y >= 0");
    }
    const double delta = d.delta();
    if (std::isinf(y)) {
        return 0.0;
    }
    if (x == 0.0) {
        const double log_norm =
            (0.5 * delta - 1.0) * std::log(2.0) + 0.5 * delta * std::log(t) + lgamma_value(0.5 * delta);
        if (y == 0.0) {
            return std::pow(y, delta - 1.0) * std::exp(-log_norm);
        }
        return std::exp((delta - 1.0) * std::log(y) - y * y / (2.0 * t) - log_norm);
    }
    if (y == 0.0) {
        return 0.0;
    }
    const double nu = 0.5 * delta - 1.0;
    const double z = x * y / t;
    if (z > kBesselAsymptotic) {
        // I_nu(z) ~ e^z / sqrt(2 pi z) sum_k (-1)^k a_k(nu) / z^k
        const double mu = 4.0 * nu * nu;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            const double next = -term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
            if (std::abs(next) >= std::abs(term)) {
                break;
            }
            term = next;
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum)) {
                break;
            }
        }
        const double log_val = std::log(y / t) + nu * std::log(y / x) - (x - y) * (x - y) / (2.0 * t) -
                               0.5 * std::log(2.0 * std::numbers::pi * z);
        return std::exp(log_val) * sum;
    }
    const double q = 0.5 * z;
    const double log_q = std::log(q);
    auto log_term = [&](int k) {
        return (2.0 * k + nu) * log_q - lgamma_value(k + 1.0) - lgamma_value(k + nu + 1.0);
    };
    // the largest term sits where (k+1)(k+nu+1) ~ q^2
    const int peak = std::max(0, static_cast<int>(std::floor(std::sqrt(q * q + 0.25 * nu * nu) - 0.5 * nu)));
    const double log_peak = log_term(peak);
    double sum = 1.0;
    int terms = 1;
    for (int k = peak + 1;; ++k) {
        const double rel = std::exp(log_term(k) - log_peak);
        sum += rel;
        if (rel <= 1e-17 * sum) {
            break;
        }
        if (++terms > kMaxTransitionTerms) {
            throw ConvergenceError("transition_density: series term cap reached", terms, rel);
        }
    }
    for (int k = peak - 1; k >= 0; --k) {
        const double rel = std::exp(log_term(k) - log_peak);
        sum += rel;
        if (rel <= 1e-17 * sum) {
            break;
        }
        if (++terms > kMaxTransitionTerms) {
            throw ConvergenceError("transition_density: series term cap reached", terms, rel);
        }
    }
    const double log_pref = std::log(y / t) + nu * std::log(y / x) - (x * x + y * y) / (2.0 * t);
    return std::exp(log_pref + log_peak) * sum;
}

double end_ratio(const Dimension& d, double r, double b) {
    check_time(r, "r");
    return std::pow(1.0 - r, -0.5 * d.delta()) * std::exp(-b * b / (2.0 * (1.0 - r)));
}

double joint_density(const Dimension& d, double s, double r, double a, double b) {
    check_time(s, "s");
    check_time(r, "r");
    if (!(s < r)) {
        throw DomainError("joint_density: needs s < r (relabel by time reversal otherwise)");
    }
    if (!(a > 0.0) || !(b > 0.0)) {
        return 0.0;
    }
    return transition_density(d, s, 0.0, a) * transition_density(d, r - s, a, b) * end_ratio(d, r, b);
}

SigmaSeries sigma_series(const Dimension& d, const TimePair& t, const SigmaOptions& opt) {
    check_pair(t);
    const double delta = d.delta();
    const double s = t.s;
    const double r = t.r;
    SigmaSeries out;
    out.delta = delta;
    out.s = s;
    out.r = r;
    out.gap = t.gap;
    out.mode = opt.mode;
    out.b_max = opt.b_max > 0.0 ? opt.b_max : 10.0 * std::sqrt(r * (1.0 - r));
    out.prefactor = std::pow(2.0, 1.0 - 0.5 * delta) * std::pow(r * (1.0 - r), -0.5 * delta);
    out.omega = 1.0 / (2.0 * r * (1.0 - r));
    // C_0 = Gamma((delta+1)/2) / Gamma(delta/2)^2
    const double gamma_ratio =
        std::exp(lgamma_value(0.5 * (delta + 1.0)) - 2.0 * lgamma_value(0.5 * delta));
    double c0 = 0.0;
    if (t.gap > 0.0) {
        out.gauss_rate = 0.5 * (1.0 - s) / (t.gap * (1.0 - r));
        out.kappa = s / (2.0 * r * t.gap);
        c0 = gamma_ratio * std::sqrt(s / r) * std::sqrt(2.0 * t.gap);
    } else {
        const double g = -t.gap;
        out.gauss_rate = 0.5 * s / (r * g);
        out.kappa = (1.0 - s) / (2.0 * (1.0 - r) * g);
        c0 = gamma_ratio * std::sqrt((1.0 - s) / (1.0 - r)) * std::sqrt(2.0 * g);
    }
    out.series_limit = out.b_max;
    if (opt.mode == SigmaMode::hybrid) {
        out.series_limit = std::min(out.b_max, std::sqrt(kSeriesArgument / out.kappa));
    }
    // truncate once the next term at series_limit is negligible and the
    // ratio test bounds the remaining tail by that term
    const double a = 0.5 * (delta + 1.0);
    const double c = 0.5 * delta;
    const double y = out.kappa * out.series_limit * out.series_limit;
    out.coeffs.push_back(c0);
    double term = 1.0;  // coeffs[k] y^k / c0
    double sum = 1.0;
    for (int k = 0;; ++k) {
        const double ratio = y * (k + a) / ((k + c) * (k + 1.0));
        const double next = term * ratio;
        if (next < 1e-16 * sum && ratio < 0.5) {
            break;
        }
        if (static_cast<int>(out.coeffs.size()) >= kMaxSigmaTerms) {
            std::ostringstream os;
            os << "Sigma series needs more than " << kMaxSigmaTerms << " terms at b_max = "
               << out.b_max << " (s = " << s << ", r = " << r << " too close)";
            throw ConvergenceError(os.str(), kMaxSigmaTerms, next);
        }
        out.coeffs.push_back(out.coeffs.back() * (k + a) / ((k + c) * (k + 1.0)));
        term = next;
        sum += next;
    }
    return out;
}

double sigma_eval(const SigmaSeries& sigma, double b) {
    const double b2 = b * b;
    if (uses_series(sigma, b)) {
        const double y = sigma.kappa * b2;
        double acc = 0.0;
        for (auto it = sigma.coeffs.rbegin(); it != sigma.coeffs.rend(); ++it) {
            acc = acc * y + *it;
        }
        return sigma.prefactor * std::exp(-sigma.gauss_rate * b2) * acc;
    }
    return sigma.prefactor * sigma.coeffs[0] * std::exp(-sigma.omega * b2) *
           specfun::hyp1f1(-0.5, 0.5 * sigma.delta, -sigma.kappa * b2);
}

double sigma_deriv(const SigmaSeries& sigma, double b, int order) {
    if (order < 1 || order > 3) {
        throw DomainError("sigma_deriv: order must be 1, 2 or 3");
    }
    if (b == 0.0 && order % 2 == 1) {
        return 0.0;
    }
    if (uses_series(sigma, b)) {
        return gauss_product_deriv(sigma.prefactor, sigma.gauss_rate, sigma.kappa,
                                   series_derivs(sigma.coeffs, sigma.kappa * b * b), b, order);
    }
    return gauss_product_deriv(sigma.prefactor * sigma.coeffs[0], sigma.omega, sigma.kappa,
                               kummer_derivs(0.5 * sigma.delta, sigma.kappa * b * b), b, order);
}

mu::SmoothTestFunction sigma_test_function(const SigmaSeries& sigma) {
    const double amp = sigma.prefactor * sigma.coeffs[0];
    // coefficient of b^2 in the series
    const double c1 = sigma.kappa * (sigma.coeffs.size() > 1 ? sigma.coeffs[1]
                                                             : sigma.coeffs[0] * (sigma.delta + 1.0) / sigma.delta);
    mu::TestFunctionParts parts;
    parts.value = [sigma](double b) { return sigma_eval(sigma, b); };
    parts.third_derivative = [sigma](double b) { return sigma_deriv(sigma, b, 3); };
    parts.taylor0 = {amp, 0.0, 2.0 * sigma.prefactor * (c1 - sigma.gauss_rate * sigma.coeffs[0]), 0.0};

    // M(-1/2; c; -y) <= 1 + y/(2c), and y e^{-eta omega b^2} <= kappa / (e eta omega)
    const double c = 0.5 * sigma.delta;
    const double eta = 0.25;
    parts.decay.kind = mu::DecayCertificate::Kind::gaussian;
    parts.decay.constant = amp * (1.0 + sigma.kappa / (2.0 * c * std::exp(1.0) * eta * sigma.omega));
    parts.decay.rate = (1.0 - eta) * sigma.omega;

    // Maclaurin data in xi = b / radius from exp(-omega u) M(-1/2; c; -kappa u), u = b^2
    mu::MaclaurinTail tail;
    const double rho = 0.1 / (sigma.omega + sigma.kappa);
    tail.radius = std::sqrt(rho);
    constexpr int kTerms = 30;
    std::array<double, kTerms> m{};
    std::array<double, kTerms> e{};
    m[0] = 1.0;
    e[0] = 1.0;
    for (int k = 1; k < kTerms; ++k) {
        m[k] = m[k - 1] * (-0.5 + k - 1) * (-sigma.kappa * rho) / ((c + k - 1) * k);
        e[k] = e[k - 1] * (-sigma.omega * rho) / k;
    }
    tail.coeffs.assign(2 * kTerms, 0.0);
    for (int n = 0; n < kTerms; ++n) {
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {
            acc += m[k] * e[n - k];
        }
        tail.coeffs[2 * n] = amp * acc;
    }
    parts.tail = std::move(tail);
    parts.scale = 1.0 / std::sqrt(sigma.omega + sigma.kappa);
    return mu::SmoothTestFunction(std::move(parts));
}

double two_point(const Dimension& d, const TimePair& t) {
    check_time(t.s, "s");
    check_time(t.r, "r");
    const double delta = d.delta();
    if (t.gap == 0.0) {
        return delta * t.s * (1.0 - t.s);
    }
    const double k = kernel_constant(d);
    if (t.gap > 0.0) {
        return two_point_lower(delta, k, t.s, t.r, t.gap);
    }
    return two_point_lower(delta, k, t.r, t.s, -t.gap);
}

double two_point_dr(const Dimension& d, const TimePair& t) {
    check_pair(t);
    const double delta = d.delta();
    const double k = kernel_constant(d);
    const double a = 0.5 * (delta + 1.0);
    const double c = 0.5 * delta;
    const double s = t.s;
    const double r = t.r;
    if (t.gap > 0.0) {
        const double z = s * (1.0 - r) / (r * (1.0 - s));
        const double w = t.gap / (r * (1.0 - s));
        return -k * s * std::pow(z, -0.5) * std::pow(w, c + 1.0) * hyp2f1_complement({a, a, c, z}, w) +
               0.5 * k * (1.0 - s) / (1.0 - r) * std::sqrt(z) * std::pow(w, c) *
                   hyp2f1_complement({a, 0.5 * (delta - 1.0), c, z}, w);
    }
    const double z = r * (1.0 - s) / (s * (1.0 - r));
    const double w = -t.gap / (s * (1.0 - r));
    return k * (1.0 - s) * std::pow(z, -0.5) * std::pow(w, c + 1.0) * hyp2f1_complement({a, a, c, z}, w) -
           0.5 * k * (s / r) * std::sqrt(z) * std::pow(w, c) *
               hyp2f1_complement({a, 0.5 * (delta - 1.0), c, z}, w);
}

double two_point_d2r(const Dimension& d, const TimePair& t) {
    check_pair(t);
    const double delta = d.delta();
    const double k = kernel_constant(d);
    const double a = 0.5 * (delta + 1.0);
    const double b = 0.5 * (delta - 3.0);
    const double c = 0.5 * delta;
    const double s = t.s;
    const double r = t.r;
    if (t.gap > 0.0) {
        const double z = s * (1.0 - r) / (r * (1.0 - s));
        const double w = t.gap / (r * (1.0 - s));
        return -0.25 * k * std::pow(t.gap, c - 1.0) * std::sqrt(s) /
               (std::pow(1.0 - r, 1.5) * std::pow(r, a) * std::pow(1.0 - s, b)) *
               hyp2f1_complement({a, b, c, z}, w);
    }
    const double z = r * (1.0 - s) / (s * (1.0 - r));
    const double w = -t.gap / (s * (1.0 - r));
    return -0.25 * k * std::pow(-t.gap, c - 1.0) * std::sqrt(1.0 - s) /
           (std::pow(r, 1.5) * std::pow(1.0 - r, a) * std::pow(s, b)) * hyp2f1_complement({a, b, c, z}, w);
}

DerivativeLimits derivative_limits(const Dimension& d, double s) {
    check_time(s, "s");
    const double delta = d.delta();
    return {-delta * s + 0.5 * (delta - 1.0), delta * (1.0 - s) - 0.5 * (delta - 1.0)};
}

}  // namespace bbridge::kernels
