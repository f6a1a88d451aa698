#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bbridge/bridge_kernels.hpp"
#include "bbridge/error.hpp"
#include "bbridge/mu_pairing.hpp"
#include "bbridge/quadrature.hpp"
#include "bbridge/specfun.hpp"

using namespace bbridge;
using namespace bbridge::kernels;
using oracles::integrate_1d;
using oracles::kInfinity;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// 20-digit values of E[X_s X_r] and its r-derivatives (the r-derivatives by
// high-precision numerical differentiation of the hypergeometric form).
struct TwoPointRef {
    double delta, s, r, value, dr, d2r;
};

const std::vector<TwoPointRef> kTwoPoint = {
    {1.0, 0.25, 0.75, 0.12606122051581235, -0.20413944334421404, -0.70024602367774917},
    {3.0, 0.3, 0.6, 0.59932157089341488, -0.36673199323875861, -2.0970505043536264},
    {2.5, 0.3, 0.6, 0.48845762378946018, -0.31732831610619995, -1.6276635188077345},
    {0.5, 0.45, 0.55, 0.097811164584270275, -0.20605172174639708, 0.59263750853717481},
    {4.0, 0.7, 0.4, 0.82214115728086748, 0.46369997514940502, -3.0495512942034193},
    {1.5, 0.1, 0.5, 0.17026174993384916, -0.024720675086809498, -0.58046570283921611},
};

// Sigma_r(X_s | b) by quadrature of the joint density, 20 digits.
struct SigmaRef {
    double delta, s, r, b, value;
};

const std::vector<SigmaRef> kSigma = {
    {3.0, 0.3, 0.6, 0.8, 1.2923567743353166},
    {1.5, 0.7, 0.4, 1.1, 0.14661440888904113},
    {0.5, 0.2, 0.7, 0.3, 0.10502999068449335},
    {4.0, 0.5, 0.53, 0.2, 2.7036859582285052},
};

}  // namespace

TEST_CASE("Dimension") {
    CHECK_THROWS_AS(Dimension(0.0), DomainError);
    CHECK_THROWS_AS(Dimension(-1.0), DomainError);
    CHECK_THROWS_AS(Dimension(std::nan("")), DomainError);
    CHECK(Dimension(2.0 + 5e-7).near_two());
    CHECK_FALSE(Dimension(2.0 + 2e-6).near_two());
    CHECK(kernel_constant(Dimension(3.0)) == doctest::Approx(8.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("marginal density: normalization, value, second moment") {
    for (double delta : {0.5, 1.0, 2.0, 3.0, 4.7}) {
        for (double r : {0.1, 0.5, 0.9}) {
            const Dimension d(delta);
            oracles::QuadratureConfig cfg;
            cfg.endpoint_transform = oracles::EndpointTransform::tanh_sinh;
            const double mass = integrate_1d([&](double b) { return marginal_density(d, r, b); }, 0.0,
                                             kInfinity, cfg).value;
            CAPTURE(delta);
            CAPTURE(r);
            CHECK(std::abs(mass - 1.0) <= 1e-10);
        }
    }
    CHECK(marginal_density(Dimension(1.0), 0.25, 0.0) == doctest::Approx(1.8426354638471226).epsilon(1e-14));
    const Dimension d(2.5);
    const double m2 =
        integrate_1d([&](double b) { return b * b * marginal_density(d, 0.3, b); }, 0.0, kInfinity).value;
    CHECK(m2 == doctest::Approx(0.525).epsilon(1e-10));
}

TEST_CASE("transition density") {
    const Dimension d3(3.0);
    const double mass = integrate_1d([&](double y) { return transition_density(d3, 1.0, 0.0, y); }, 0.0,
                                     kInfinity).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    const Dimension d1(1.0);
    for (double a : {0.1, 0.7, 2.0}) {
        const double folded = 2.0 / std::sqrt(2.0 * std::numbers::pi * 0.4) * std::exp(-a * a / 0.8);
        CHECK(transition_density(d1, 0.4, 0.0, a) == doctest::Approx(folded).epsilon(1e-14));
    }

    // modified-Bessel references (30-digit arithmetic)
    CHECK(rel(transition_density(Dimension(2.5), 0.3, 0.7, 1.2), 0.74984007141244699) <= 1e-13);
    CHECK(rel(transition_density(Dimension(1.5), 0.01, 3.0, 3.05), 3.53559428697232) <= 1e-12);
    // either side of the switch to the large-argument expansion
    CHECK(rel(transition_density(Dimension(2.5), 0.02, 1.7, 1.8), 2.2945954215305551) <= 1e-12);
    CHECK(rel(transition_density(Dimension(4.0), 0.01, 1.0, 0.99), 3.8952734225384502) <= 1e-12);
    CHECK(rel(transition_density(Dimension(0.5), 0.05, 2.2, 2.25), 1.7275825446145165) <= 1e-12);

    // Chapman-Kolmogorov
    const Dimension d2(2.0);
    const double ck = integrate_1d(
        [&](double a) { return transition_density(d2, 0.2, 0.0, a) * transition_density(d2, 0.3, a, 0.7); },
        0.0, kInfinity).value;
    CHECK(ck == doctest::Approx(transition_density(d2, 0.5, 0.0, 0.7)).epsilon(1e-10));

    // positive start integrates to one as well
    const double mass_x = integrate_1d([&](double y) { return transition_density(d3, 0.5, 1.3, y); }, 0.0,
                                       kInfinity).value;
    CHECK(mass_x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(transition_density(d3, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("end ratio and the bridge factorization") {
    const Dimension d2(2.0);
    CHECK(end_ratio(d2, 0.5, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(end_ratio(Dimension(3.0), 0.2, 0.0) == doctest::Approx(std::pow(0.8, -1.5)).epsilon(1e-15));
    const Dimension d3(3.0);
    CHECK(marginal_density(d3, 0.4, 0.8) ==
          doctest::Approx(transition_density(d3, 0.4, 0.0, 0.8) * end_ratio(d3, 0.4, 0.8)).epsilon(1e-14));
}

TEST_CASE("joint density: normalization, marginal, time reversal") {
    const Dimension d3(3.0);
    oracles::QuadratureConfig cfg;
    cfg.rel_tol = 1e-9;
    const double mass = oracles::integrate_2d(
        [&](double a, double b) { return joint_density(d3, 0.3, 0.6, a, b); },
        {0.0, kInfinity, 0.0, kInfinity}, cfg).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

    const Dimension d(2.5);
    const double marg =
        integrate_1d([&](double a) { return joint_density(d, 0.2, 0.7, a, 0.5); }, 0.0, kInfinity).value;
    CHECK(marg == doctest::Approx(marginal_density(d, 0.7, 0.5)).epsilon(1e-10));

    const Dimension d15(1.5);
    CHECK(joint_density(d15, 0.3, 0.6, 0.4, 0.9) ==
          doctest::Approx(joint_density(d15, 0.4, 0.7, 0.9, 0.4)).epsilon(1e-12));
    CHECK_THROWS_AS(joint_density(d15, 0.6, 0.3, 0.4, 0.9), DomainError);
}

TEST_CASE("Sigma series: structure and closed values") {
    const Dimension d(3.0);
    const SigmaSeries sig = sigma_series(d, 0.3, 0.6);
    for (double c : sig.coeffs) {
        CHECK(c > 0.0);
    }
    CHECK(sig.gauss_rate > 0.0);
    CHECK(sigma_eval(sig, 0.0) == sig.prefactor * sig.coeffs[0]);
    CHECK(sigma_deriv(sig, 0.0, 1) == 0.0);
    CHECK(sigma_deriv(sig, 0.0, 3) == 0.0);
    const double want2 = 2.0 * sig.prefactor * (sig.kappa * sig.coeffs[1] - sig.gauss_rate * sig.coeffs[0]);
    CHECK(sigma_deriv(sig, 0.0, 2) == doctest::Approx(want2).epsilon(1e-14));
    CHECK_THROWS_AS(sigma_series(d, 0.4, 0.4), DomainError);
    CHECK_THROWS_AS(sigma_series(d, 0.0, 0.4), DomainError);
    CHECK_THROWS_AS(sigma_deriv(sig, 0.5, 4), DomainError);
}

TEST_CASE("Sigma series matches the joint-density quadrature") {
    for (const SigmaRef& ref : kSigma) {
        CAPTURE(ref.delta);
        CAPTURE(ref.s);
        CAPTURE(ref.r);
        const Dimension d(ref.delta);
        for (SigmaMode mode : {SigmaMode::series_only, SigmaMode::hybrid}) {
            SigmaOptions opt;
            opt.mode = mode;
            opt.b_max = 2.0 * ref.b;
            const SigmaSeries sig = sigma_series(d, ref.s, ref.r, opt);
            CHECK(rel(sigma_eval(sig, ref.b), ref.value) <= 1e-12);
        }
    }
}

TEST_CASE("series and Kummer forms agree, and derivatives match differences") {
    for (double delta : {0.5, 1.5, 3.0}) {
        for (auto [s, r] : {std::pair{0.3, 0.6}, std::pair{0.7, 0.4}, std::pair{0.5, 0.52}}) {
            const Dimension d(delta);
            SigmaOptions series;
            series.mode = SigmaMode::series_only;
            series.b_max = 2.0;
            const SigmaSeries a = sigma_series(d, s, r, series);
            SigmaOptions closed;
            closed.b_max = 1e-3;  // forces the Kummer branch past b = 1e-3
            const SigmaSeries k = sigma_series(d, s, r, closed);
            for (double b : {0.05, 0.3, 0.8, 1.4, 2.0}) {
                CAPTURE(delta);
                CAPTURE(s);
                CAPTURE(b);
                CHECK(rel(sigma_eval(k, b), sigma_eval(a, b)) <= 1e-12);
                for (int order = 1; order <= 3; ++order) {
                    const double sa = sigma_deriv(a, b, order);
                    const double sk = sigma_deriv(k, b, order);
                    CHECK(std::abs(sa - sk) <= 1e-9 * (std::abs(sa) + sigma_eval(a, b)));
                }
            }
        }
    }

    const Dimension d(3.0);
    const SigmaSeries sig = sigma_series(d, 0.3, 0.6);
    const double b = 0.8;
    const double h = 1e-3;
    auto f = [&](double x) { return sigma_eval(sig, x); };
    auto stencil3 = [&](double step) {
        return (f(b + 2 * step) - 2 * f(b + step) + 2 * f(b - step) - f(b - 2 * step)) / (2 * step * step * step);
    };
    // one Richardson step removes the O(h^2) truncation of the 5-point stencil
    const double fd3 = (4.0 * stencil3(h) - stencil3(2.0 * h)) / 3.0;
    CHECK(rel(sigma_deriv(sig, b, 3), fd3) <= 1e-6);
    CHECK(rel(sigma_deriv(sig, b, 3), 10.399025887819060735) <= 1e-12);
    const double fd1 = (f(b - 2 * h) - 8 * f(b - h) + 8 * f(b + h) - f(b + 2 * h)) / (12 * h);
    CHECK(rel(sigma_deriv(sig, b, 1), fd1) <= 1e-9);
}

TEST_CASE("Sigma near the diagonal") {
    const Dimension d(1.5);
    SigmaOptions strict;
    strict.mode = SigmaMode::series_only;
    CHECK_THROWS_AS(sigma_series(d, 0.5, 0.5005, strict), ConvergenceError);

    // the hybrid form stays finite and keeps the exact gap
    for (double gap : {1e-3, 1e-8, 1e-14, 1e-20}) {
        const SigmaSeries sig = sigma_series(d, TimePair::offset(0.5, gap));
        const double c0 = std::exp(specfun::log_gamma(1.25).log_abs - 2.0 * specfun::log_gamma(0.75).log_abs) *
                          std::sqrt(0.5 / (0.5 + gap)) * std::sqrt(2.0 * gap);
        CHECK(rel(sig.coeffs[0], c0) <= 1e-14);
        CHECK(std::isfinite(sigma_eval(sig, 0.3)));
        CHECK(sigma_eval(sig, 0.3) > 0.0);
        // inside the series range, where kappa b^2 <= 10
        const double b_in = 0.5 * sig.series_limit;
        const double kummer = sig.prefactor * sig.coeffs[0] * std::exp(-sig.omega * b_in * b_in) *
                              specfun::hyp1f1(-0.5, 0.75, -sig.kappa * b_in * b_in);
        CHECK(rel(sigma_eval(sig, b_in), kummer) <= 1e-12);
        CHECK(std::isfinite(sigma_deriv(sig, b_in, 3)));
    }
}

TEST_CASE("two-point function and r-derivatives against references") {
    for (const TwoPointRef& ref : kTwoPoint) {
        CAPTURE(ref.delta);
        CAPTURE(ref.s);
        CAPTURE(ref.r);
        const Dimension d(ref.delta);
        CHECK(rel(two_point(d, ref.s, ref.r), ref.value) <= 1e-12);
        CHECK(rel(two_point_dr(d, ref.s, ref.r), ref.dr) <= 1e-10);
        CHECK(rel(two_point_d2r(d, ref.s, ref.r), ref.d2r) <= 1e-9);
    }
}

TEST_CASE("two-point structure") {
    const Dimension d(2.5);
    CHECK(two_point(d, 0.3, 0.6) == two_point(d, 0.6, 0.3));
    CHECK(two_point(d, 0.4, 0.4) == doctest::Approx(2.5 * 0.4 * 0.6).epsilon(1e-15));
    // continuous approach to the diagonal, from both sides
    const DerivativeLimits lim = derivative_limits(d, 0.4);
    for (double gap : {1e-4, 1e-6, 1e-8}) {
        const double up = two_point(d, TimePair::offset(0.4, gap));
        const double down = two_point(d, TimePair::offset(0.4, -gap));
        CHECK(std::abs(up - (0.6 + lim.d_plus * gap)) <= 10.0 * gap * std::sqrt(gap));
        CHECK(std::abs(down - (0.6 - lim.d_minus * gap)) <= 10.0 * gap * std::sqrt(gap));
    }
    for (double delta : {2.5, 3.0, 4.0, 6.0}) {
        CHECK(two_point_d2r(Dimension(delta), 0.2, 0.5) < 0.0);
    }
    CHECK_THROWS_AS(two_point_dr(d, 0.3, 0.3), DomainError);
    CHECK_THROWS_AS(two_point(d, 1.0, 0.3), DomainError);
}

TEST_CASE("derivative chain matches finite differences") {
    const Dimension d3(3.0);
    const double h1 = 1e-5;
    const double fd1 = (two_point(d3, 0.3, 0.6 + h1) - two_point(d3, 0.3, 0.6 - h1)) / (2 * h1);
    CHECK(rel(two_point_dr(d3, 0.3, 0.6), fd1) <= 1e-6);

    const Dimension d(2.5);
    const double h = 1e-4;
    auto e = [&](double r) { return two_point(d, 0.3, r); };
    const double r = 0.6;
    const double fd2 = (-e(r + 2 * h) + 16 * e(r + h) - 30 * e(r) + 16 * e(r - h) - e(r - 2 * h)) / (12 * h * h);
    CHECK(rel(two_point_d2r(d, 0.3, 0.6), fd2) <= 1e-4);

    for (double delta : {0.5, 1.0, 1.5, 2.5, 4.0}) {
        const Dimension dd(delta);
        for (auto [s, rr] : {std::pair{0.3, 0.6}, std::pair{0.7, 0.4}}) {
            auto f = [&](double x) { return two_point(dd, s, x); };
            auto g = [&](double x) { return two_point_dr(dd, s, x); };
            CAPTURE(delta);
            CAPTURE(s);
            CHECK(rel(two_point_dr(dd, s, rr), (f(rr + h1) - f(rr - h1)) / (2 * h1)) <= 1e-6);
            CHECK(rel(two_point_d2r(dd, s, rr), (g(rr + h1) - g(rr - h1)) / (2 * h1)) <= 1e-6);
        }
    }
}

TEST_CASE("second derivative equals the renormalized Sigma pairing") {
    for (double delta : {0.5, 1.0, 1.5, 2.5, 3.0, 4.0}) {
        for (auto [s, r] : {std::pair{0.3, 0.6}, std::pair{0.7, 0.4}}) {
            const Dimension d(delta);
            const SigmaSeries sig = sigma_series(d, s, r);
            const double pairing = mu::mu_pair(delta - 3.0, sigma_test_function(sig));
            const double drift = -specfun::gamma(delta) / (4.0 * (delta - 2.0)) * pairing;
            CAPTURE(delta);
            CAPTURE(s);
            CHECK(rel(drift, two_point_d2r(d, s, r)) <= 1e-6);
        }
    }
    const Dimension d(1.5);
    const SigmaSeries sig = sigma_series(d, 0.3, 0.6);
    const double via3 = mu::mu_pair_via_third_derivative(-1.5, sigma_test_function(sig));
    CHECK(rel(via3, mu::mu_pair(-1.5, sigma_test_function(sig))) <= 1e-7);
}

TEST_CASE("derivative limits and the unit jump") {
    const DerivativeLimits lim = derivative_limits(Dimension(3.0), 0.5);
    CHECK(lim.d_plus == -0.5);
    CHECK(lim.d_minus == 0.5);
    const DerivativeLimits lim07 = derivative_limits(Dimension(0.7), 0.2);
    CHECK(lim07.d_plus == doctest::Approx(-0.29).epsilon(1e-15));
    CHECK(lim07.d_minus == doctest::Approx(0.71).epsilon(1e-15));
    for (double delta : {0.5, 1.0, 1.5, 2.5, 4.0}) {
        for (int i = 1; i <= 9; ++i) {
            const DerivativeLimits l = derivative_limits(Dimension(delta), 0.1 * i);
            CHECK(std::abs(l.d_plus - l.d_minus + 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() * 4.0);
        }
    }
    const Dimension d(1.5);
    const DerivativeLimits l = derivative_limits(d, 0.4);
    CHECK(std::abs(two_point_dr(d, 0.4, 0.4 + 1e-6) - l.d_plus) <= 5e-4);
    CHECK(std::abs(two_point_dr(d, 0.4, 0.4 - 1e-6) - l.d_minus) <= 5e-4);
}
