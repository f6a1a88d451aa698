#include "bbridge/mu_pairing.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "bbridge/error.hpp"
#include "bbridge/specfun.hpp"

namespace bbridge::mu {
namespace {

constexpr std::array<double, 4> kFactorial = {1.0, 1.0, 2.0, 6.0};
// x = exp(-t) never goes below exp(-kMaxT) ~ 1e-300
constexpr double kMaxT = 690.0;
// below this, a remainder without Maclaurin data is extrapolated from its leading order
constexpr double kExtrapolationFloor = 1e-3;

bool is_whole(double x) { return x == std::round(x); }

// Which Taylor orders 0..3 are subtracted, and the highest one (L).
struct Subtraction {
    std::array<bool, 4> on{};
    int top = -1;
    int lowest_left = 0;  // lowest order whose term is not removed (nonzero coefficient)
};

Subtraction plan_subtraction(double alpha, const SmoothTestFunction& psi, OrderOneTerm order_one) {
    const int required = static_cast<int>(std::floor(-alpha));
    const int available = static_cast<int>(psi.taylor0().size()) - 1;
    if (available < required) {
        std::ostringstream os;
        os << "mu_pair: alpha = " << alpha << " needs Taylor data up to order " << required
           << ", got " << available + 1 << " entries";
        throw DomainError(os.str());
    }
    Subtraction sub;
    // One order beyond the definition is subtracted and added back exactly;
    // this keeps the (0,1) integrand decaying like x^(L+1+alpha) with L+1+alpha > 1.
    sub.top = std::min(std::max(required + 1, 0), std::min(available, 3));
    for (int j = 0; j <= sub.top; ++j) {
        sub.on[j] = true;
    }
    if (sub.top >= 1 && order_one == OrderOneTerm::force_omit) {
        sub.on[1] = false;
    }
    if (order_one == OrderOneTerm::force_subtract && available >= 1) {
        sub.on[1] = true;
        sub.top = std::max(sub.top, 1);
        for (int j = 0; j <= 1; ++j) {
            sub.on[j] = true;
        }
    }
    sub.lowest_left = sub.top + 1;
    for (int j = 0; j <= sub.top; ++j) {
        if (!sub.on[j] && psi.taylor0()[j] != 0.0) {
            sub.lowest_left = j;
            break;
        }
    }
    return sub;
}

double taylor_part(const SmoothTestFunction& psi, const Subtraction& sub, double x, bool subtracted) {
    double acc = 0.0;
    double xp = 1.0;
    for (int j = 0; j <= sub.top; ++j) {
        if (sub.on[j] == subtracted) {
            acc += psi.taylor0()[j] * xp / kFactorial[j];
        }
        xp *= x;
    }
    return acc;
}

double remainder(const SmoothTestFunction& psi, const Subtraction& sub, double x) {
    const auto& tail = psi.tail();
    if (tail && x <= tail->radius) {
        return tail->remainder(x, sub.top) + taylor_part(psi, sub, x, false);
    }
    if (!tail && x < kExtrapolationFloor) {
        const double at_floor = psi(kExtrapolationFloor) - taylor_part(psi, sub, kExtrapolationFloor, true);
        return at_floor * std::pow(x / kExtrapolationFloor, sub.lowest_left);
    }
    return psi(x) - taylor_part(psi, sub, x, true);
}

// int_0^1 g(x) x^(beta-1) dx with x = exp(-t); g(x) = O(x^p) near 0 and
// p + beta = rate > 0. The range in t grows until the neglected tail is small.
double unit_interval_integral(const std::function<double(double)>& g, double beta, double rate,
                              const oracles::QuadratureConfig& quad) {
    auto integrand = [&](double t) {
        const double gx = g(std::exp(-t));
        if (gx == 0.0) {
            return 0.0;
        }
        return std::copysign(std::exp(std::log(std::abs(gx)) - beta * t), gx);
    };
    double lo = 0.0;
    double hi = std::min(kMaxT, std::max(20.0, 40.0 / rate));
    double total = 0.0;
    for (;;) {
        total += oracles::integrate_1d(integrand, lo, hi, quad).value;
        const double tail = std::abs(integrand(hi)) / rate;
        if (tail <= 1e-3 * quad.rel_tol * std::abs(total) || tail <= quad.abs_tol || hi >= kMaxT) {
            return total;
        }
        lo = hi;
        hi = std::min(kMaxT, 2.0 * hi);
    }
}

double outer_integral(const std::function<double(double)>& g, double beta, double x_max,
                      const oracles::QuadratureConfig& quad) {
    if (x_max <= 1.0) {
        return 0.0;
    }
    auto integrand = [&](double x) {
        const double gx = g(x);
        return gx == 0.0 ? 0.0 : gx * std::pow(x, beta - 1.0);
    };
    return oracles::integrate_1d(integrand, 1.0, x_max, quad).value;
}

}  // namespace

double DecayCertificate::truncation_point(double alpha, double tail_tol) const {
    if (kind == Kind::power) {
        return oracles::kInfinity;
    }
    if (!(rate > 0.0) || !(constant >= 0.0)) {
        throw DomainError("DecayCertificate: rate must be positive and constant nonnegative");
    }
    // x^(alpha-1) <= x^(A-1) on [1, inf) with A >= 1
    const double a = std::max(alpha, 1.0);
    auto tail = [&](double x) {
        if (kind == Kind::gaussian) {
            return constant * 0.5 * std::pow(rate, -0.5 * a) *
                   boost::math::tgamma(0.5 * a, rate * x * x);
        }
        return constant * std::pow(rate, -a) * boost::math::tgamma(a, rate * x);
    };
    double x = 1.0;
    while (tail(x) >= tail_tol) {
        x *= 1.05;
        if (x > 1e8) {
            throw DomainError("DecayCertificate: truncation point beyond 1e8");
        }
    }
    return x;
}

double MaclaurinTail::remainder(double x, int order) const {
    // Horner over the retained coefficients, then shift by xi^(order+1)
    const double xi = x / radius;
    const int n = static_cast<int>(coeffs.size());
    const int first = std::max(order + 1, 0);
    double acc = 0.0;
    for (int m = n - 1; m >= first; --m) {
        acc = acc * xi + coeffs[m];
    }
    return first == 0 ? acc : acc * std::pow(xi, first);
}

SmoothTestFunction::SmoothTestFunction(TestFunctionParts parts) : parts_(std::move(parts)) {
    if (!parts_.value) {
        throw DomainError("SmoothTestFunction: value map missing");
    }
    if (!(parts_.scale > 0.0) || !std::isfinite(parts_.scale)) {
        throw DomainError("SmoothTestFunction: scale must be positive and finite");
    }
    if (parts_.taylor0.size() > 4) {
        throw DomainError("SmoothTestFunction: at most four Taylor entries are carried");
    }
    for (double t : parts_.taylor0) {
        if (!std::isfinite(t)) {
            throw DomainError("SmoothTestFunction: Taylor data must be finite");
        }
    }
    if (!parts_.taylor0.empty()) {
        const double v0 = parts_.value(0.0);
        if (std::abs(v0 - parts_.taylor0[0]) > 1e-12 * std::max(1.0, std::abs(v0))) {
            throw DomainError("SmoothTestFunction: value(0) disagrees with taylor0[0]");
        }
    }
    if (parts_.third_derivative && parts_.taylor0.size() == 4) {
        const double d0 = parts_.third_derivative(0.0);
        if (std::abs(d0 - parts_.taylor0[3]) > 1e-6 * (1.0 + std::abs(d0))) {
            throw DomainError("SmoothTestFunction: third_derivative(0) disagrees with taylor0[3]");
        }
    }
}

double SmoothTestFunction::third_derivative(double x) const {
    if (!parts_.third_derivative) {
        throw DomainError("SmoothTestFunction: no third derivative supplied");
    }
    return parts_.third_derivative(x);
}

SmoothTestFunction exponential_test_function(double lambda) {
    if (!(lambda > 0.0)) {
        throw DomainError("exponential_test_function: lambda must be positive");
    }
    MaclaurinTail tail;
    tail.radius = 0.1 / lambda;
    double c = 1.0;
    for (int m = 0; m < 30; ++m) {
        tail.coeffs.push_back(c);
        c *= -0.1 / (m + 1.0);
    }
    TestFunctionParts parts;
    parts.value = [lambda](double x) { return std::exp(-lambda * x); };
    parts.taylor0 = {1.0, -lambda, lambda * lambda, -lambda * lambda * lambda};
    parts.decay = {DecayCertificate::Kind::exponential, 1.0, lambda, 0.0};
    parts.third_derivative = [lambda](double x) { return -lambda * lambda * lambda * std::exp(-lambda * x); };
    parts.tail = std::move(tail);
    return SmoothTestFunction(std::move(parts));
}

SmoothTestFunction gaussian_poly_test_function(std::vector<double> poly, double lambda) {
    if (!(lambda > 0.0) || poly.empty()) {
        throw DomainError("gaussian_poly_test_function: need lambda > 0 and a nonempty polynomial");
    }
    // q(u) = sum poly[i] u^i e^{-lambda u}, psi(x) = q(x^2)
    const int n = static_cast<int>(poly.size());
    auto q_derivs = [poly, lambda, n](double u) {
        // value and first three u-derivatives of p(u) e^{-lambda u}
        std::array<double, 4> p{};
        for (int i = n - 1; i >= 0; --i) {
            p[3] = p[3] * u + 3.0 * p[2];
            p[2] = p[2] * u + 2.0 * p[1];
            p[1] = p[1] * u + p[0];
            p[0] = p[0] * u + poly[i];
        }
        const double e = std::exp(-lambda * u);
        const double l = lambda;
        return std::array<double, 4>{
            p[0] * e,
            (p[1] - l * p[0]) * e,
            (p[2] - 2.0 * l * p[1] + l * l * p[0]) * e,
            (p[3] - 3.0 * l * p[2] + 3.0 * l * l * p[1] - l * l * l * p[0]) * e,
        };
    };
    MaclaurinTail tail;
    tail.radius = std::sqrt(0.1 / (lambda + static_cast<double>(n)));
    std::vector<double> ucoef(40, 0.0);
    for (int k = 0; k < 40; ++k) {
        double e = 1.0;  // (-lambda)^(k-i)/(k-i)!
        double acc = 0.0;
        for (int i = k; i >= 0; --i) {
            if (i < n) {
                acc += poly[i] * e;
            }
            e *= -lambda / (k - i + 1.0);
        }
        ucoef[k] = acc;
    }
    tail.coeffs.assign(80, 0.0);
    const double r2 = tail.radius * tail.radius;
    double scale = 1.0;
    for (int k = 0; k < 40; ++k) {
        tail.coeffs[2 * k] = ucoef[k] * scale;
        scale *= r2;
    }
    // Gaussian bound with half the rate: |p(u)| e^{-lambda u / 2} <= sum |p_i| (2i / (e lambda))^i
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        bound += std::abs(poly[i]) * (i == 0 ? 1.0 : std::pow(2.0 * i / (std::exp(1.0) * lambda), i));
    }
    TestFunctionParts parts;
    parts.value = [q_derivs](double x) { return q_derivs(x * x)[0]; };
    parts.taylor0 = {ucoef[0], 0.0, 2.0 * ucoef[1], 0.0};
    parts.decay = {DecayCertificate::Kind::gaussian, bound, 0.5 * lambda, 0.0};
    parts.third_derivative = [q_derivs](double x) {
        const auto q = q_derivs(x * x);
        return 12.0 * x * q[2] + 8.0 * x * x * x * q[3];
    };
    parts.tail = std::move(tail);
    return SmoothTestFunction(std::move(parts));
}

double mu_pair(double alpha, const SmoothTestFunction& psi, const PairingOptions& opt) {
    if (!(alpha > -4.0)) {
        throw DomainError("mu_pair: alpha must exceed -4");
    }
    if (alpha <= 0.0 && is_whole(alpha)) {
        const int k = static_cast<int>(-alpha);
        if (static_cast<int>(psi.taylor0().size()) <= k) {
            throw DomainError("mu_pair: missing Taylor entry for integer alpha");
        }
        return (k % 2 == 0 ? 1.0 : -1.0) * psi.taylor0()[k];
    }
    const Subtraction sub = plan_subtraction(alpha, psi, opt.order_one);
    const double rate = sub.lowest_left + alpha;
    if (!(rate > 0.0)) {
        throw DomainError("mu_pair: renormalized integrand is not integrable at 0");
    }
    // split at ell: (0, ell) carries the renormalized remainder, (ell, inf) psi
    // itself. Integrands are divided by a magnitude n so that abs_tol is
    // relative to psi, and the ell^alpha factor stays in log form.
    const double ell = std::min(1.0, psi.scale());
    const double log_ell = std::log(ell);
    double n = std::abs(psi.taylor0()[0]);
    if (n == 0.0) {
        n = std::abs(psi(ell));
    }
    if (n == 0.0 || !std::isfinite(n)) {
        n = 1.0;
    }
    const double big = std::exp(alpha * log_ell + std::log(n));  // n ell^alpha
    // (0, ell) in x = ell y
    double near = unit_interval_integral([&](double y) { return remainder(psi, sub, ell * y) / n; }, alpha, rate,
                                         opt.quad);
    double far = 0.0;
    if (ell < 1.0) {
        const double span = -log_ell;
        if (alpha < 0.0) {
            // x = ell e^tau: n ell^alpha int_0^span (psi / n) e^(alpha tau) d tau
            auto integrand = [&](double tau) {
                const double gx = psi(ell * std::exp(tau)) / n;
                return gx == 0.0 ? 0.0 : gx * std::exp(alpha * tau);
            };
            near += oracles::integrate_1d(integrand, 0.0, span, opt.quad).value;
        } else {
            // x = e^-t: n int_0^span (psi / n) e^(-alpha t) dt
            auto integrand = [&](double t) {
                const double gx = psi(std::exp(-t)) / n;
                return gx == 0.0 ? 0.0 : gx * std::exp(-alpha * t);
            };
            far += oracles::integrate_1d(integrand, 0.0, span, opt.quad).value;
        }
    }
    const double x_max = psi.decay().truncation_point(alpha, opt.tail_tol);
    far += outer_integral([&](double x) { return psi(x) / n; }, alpha, x_max, opt.quad);
    // int_ell^inf x^(j+alpha-1) = -ell^(j+alpha)/(j+alpha) for subtracted j <= -alpha; the
    // extra orders removed on (0, ell) only come back as int_0^ell x^(j+alpha-1) = ell^(j+alpha)/(j+alpha)
    double ell_j = 1.0;
    for (int j = 0; j <= sub.top; ++j) {
        if (sub.on[j]) {
            near += psi.taylor0()[j] / n * ell_j / (kFactorial[j] * (j + alpha));
        }
        ell_j *= ell;
    }
    return specfun::rgamma(alpha) * (big * near + n * far);
}

double mu_pair_via_third_derivative(double alpha, const SmoothTestFunction& psi,
                                    const PairingOptions& opt) {
    if (!(alpha > -3.0)) {
        throw DomainError("mu_pair_via_third_derivative: alpha must exceed -3");
    }
    const double beta = alpha + 3.0;
    const double d3_0 = psi.third_derivative(0.0);
    const double inner = unit_interval_integral(
        [&](double x) { return psi.third_derivative(x) - d3_0; }, beta, beta + 1.0, opt.quad);
    auto d3 = [&](double x) { return psi.third_derivative(x); };
    auto integrand = [&](double x) {
        const double g = d3(x);
        return g == 0.0 ? 0.0 : g * std::pow(x, beta - 1.0);
    };
    const double outer = oracles::integrate_1d(integrand, 1.0, oracles::kInfinity, opt.quad).value;
    return -specfun::rgamma(beta) * (inner + outer + d3_0 / beta);
}

}  // namespace bbridge::mu
