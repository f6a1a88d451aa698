#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bbridge/error.hpp"
#include "bbridge/specfun.hpp"

using namespace bbridge;
using namespace bbridge::specfun;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Reference values computed with mpmath at 40 digits.
struct HypRef {
    double a, b, c, z, value;
};
constexpr HypRef kHypRefs[] = {
    {1, 1, 2, 0.5, 1.3862943611198906188},
    {2, 2, 1.3, 0.6, 14.589568635559384226},
    {0.75, 0.75, 0.25, 0.9, 36.118176706703895625},
    {2.5, 2.5, 2, 0.999999, 1131768342640356400.0},
    {2.5, 0.5, 2, 0.999, 426.9654307385337208},
    {2.5, -0.5, 2, 0.95, -0.17039335833136074222},
    {1.5, 1.5, 1, 0.99999, 12732363616.947833496},
    {1.5, 0.5, 1, 0.8, 3.7512499368153843523},
    {1.25, 1.25, 0.75, 0.9999, 13707940.731296124612},
    {2, 3.5, 1.5, 0.3, 4.972927946688879289},
    {-0.5, -0.5, 0.25, 0.85, 1.9612710771549554288},
    {3, 1.2, 0.7, -0.6, -0.019748165316384833609},
    {2, 2.7, 2.7, 0.9, 100.00000000000004441},
    {0.5, 0.5, 1.0, 0.99, 2.3527158167797423215},
};

struct KummerRef {
    double a, b, x, value;
};
constexpr KummerRef kKummerRefs[] = {
    {-0.5, 1.25, -0.3, 1.1161767850219354071},   {-0.5, 1.25, -5, 2.3730751932422046373},
    {-0.5, 0.25, -39.9, 18.6298780604852659},    {-0.5, 0.25, -40.1, 18.676808648281204722},
    {0.5, 2.25, -120, 0.11218478851110781043},   {1.5, 3.25, -55, 0.0066603361894567461716},
    {2.5, 2.0, -45, -0.000022688168139135573376}, {-0.5, 2, -1000, 23.806160559151934985},
    {1.75, 1.25, 3.5, 67.785991203986679746},
};

}  // namespace

TEST_CASE("log_gamma matches factorial and half-integer values") {
    SignedLog g1 = log_gamma(1.0);
    CHECK(std::abs(g1.log_abs) < 1e-15);
    CHECK(g1.sign == 1);

    SignedLog g5 = log_gamma(5.0);
    CHECK(g5.log_abs == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK(g5.sign == 1);

    SignedLog gh = log_gamma(0.5);
    CHECK(gh.log_abs == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));

    SignedLog gm = log_gamma(-0.5);
    CHECK(gm.sign == -1);
    CHECK(gm.log_abs == doctest::Approx(std::log(2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-14));
}

TEST_CASE("gamma relative accuracy against libm on [-50, 50]") {
    double worst = 0.0;
    for (double x = -50.0; x <= 50.0; x += 0.0137) {
        const double dist = std::abs(x - std::round(x));
        if (x <= 0.0 && dist <= 1e-3) {
            continue;
        }
        const double want = std::tgamma(x);
        worst = std::max(worst, rel_err(specfun::gamma(x), want));
        const SignedLog lg = log_gamma(x);
        worst = std::max(worst, rel_err(lg.sign * std::exp(lg.log_abs), want));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("gamma recursion Gamma(x+1) = x Gamma(x)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 30.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng);
        if (std::abs(x - std::round(x)) < 1e-3 && x < 1.0) {
            continue;
        }
        const double g1 = specfun::gamma(x + 1.0);
        CHECK(std::abs(g1 - x * specfun::gamma(x)) / std::abs(g1) <= 1e-12);
    }
}

TEST_CASE("poles are rejected and rgamma vanishes there") {
    CHECK_THROWS_AS(log_gamma(0.0), PoleError);
    CHECK_THROWS_AS(log_gamma(-3.0 + 1e-13), PoleError);
    CHECK_THROWS_AS(specfun::gamma(-7.0), PoleError);
    CHECK_NOTHROW(log_gamma(-3.0 + 1e-9));
    CHECK(rgamma(0.0) == 0.0);
    CHECK(rgamma(-4.0) == 0.0);
    CHECK(rgamma(-0.5) == doctest::Approx(-1.0 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-14));
}

TEST_CASE("pochhammer") {
    CHECK(pochhammer(3.7, 0) == 1.0);
    CHECK(pochhammer(-2.0, 0) == 1.0);
    CHECK(pochhammer(2.0, 3) == 24.0);
    CHECK(pochhammer(-1.5, 2) == 0.75);
    CHECK_THROWS_AS(pochhammer(1.0, -1), DomainError);
}

TEST_CASE("hyp2f1 trivial values") {
    CHECK(hyp2f1({0.3, 1.7, 2.2, 0.0}) == 1.0);
    CHECK(hyp2f1({-3.0, 5.0, 0.5, 0.0}) == 1.0);
    // terminating series: 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
    const double b = 1.5, c = 2.5, z = 0.4;
    CHECK(hyp2f1({-2.0, b, c, z}) ==
          doctest::Approx(1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0))).epsilon(1e-15));
}

TEST_CASE("hyp2f1 against high-precision reference values") {
    for (const HypRef& r : kHypRefs) {
        CAPTURE(r.a);
        CAPTURE(r.b);
        CAPTURE(r.c);
        CAPTURE(r.z);
        CHECK(rel_err(hyp2f1({r.a, r.b, r.c, r.z}), r.value) < 1e-10);
    }
}

TEST_CASE("hyp2f1 parameter and argument errors") {
    CHECK_THROWS_AS(hyp2f1({1.0, 1.0, 0.0, 0.3}), DomainError);
    CHECK_THROWS_AS(hyp2f1({1.0, 1.0, -2.0, 0.3}), DomainError);
    CHECK_THROWS_AS(hyp2f1({1.0, 1.0, 2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(hyp2f1({1.0, 1.0, 2.0, -1.2}), DomainError);
    SeriesOptions tight;
    tight.max_terms = 5;
    CHECK_THROWS_AS(hyp2f1_series({1.0, 1.0, 2.0, 0.5}, tight), ConvergenceError);
    SeriesOptions unreachable;
    unreachable.rel_tol = 1e-30;
    CHECK_THROWS_AS(hyp2f1_series({1.0, 1.0, 2.0, 0.5}, unreachable), ConvergenceError);
    CHECK_THROWS_AS(hyp2f1({2.0, 2.0, 1.3, 0.9}, unreachable), ConvergenceError);
}

TEST_CASE("binomial collapse b = c") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(0.1, 4.0);
    std::uniform_real_distribution<double> uc(0.2, 5.0);
    for (int i = 0; i < 400; ++i) {
        const double a = ua(rng);
        const double c = uc(rng);
        const double z = 0.99 * i / 399.0;
        const double want = std::pow(1.0 - z, -a);
        CAPTURE(a);
        CAPTURE(c);
        CAPTURE(z);
        CHECK(std::abs(hyp2f1({a, c, c, z}) - want) <= 1e-11 * want);
    }
    // integer a exercises the logarithmic-case interpolation
    for (double a : {1.0, 2.0, 3.0}) {
        for (double z : {0.75, 0.9, 0.99}) {
            const double want = std::pow(1.0 - z, -a);
            CHECK(std::abs(hyp2f1({a, 1.7, 1.7, z}) - want) <= 1e-11 * want);
        }
    }
}

TEST_CASE("direct series and connection formula agree on [0.5, 0.75]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> up(0.2, 3.0);
    std::uniform_real_distribution<double> uz(0.5, 0.75);
    int checked = 0;
    while (checked < 500) {
        const double a = up(rng), b = up(rng), c = up(rng), z = uz(rng);
        const double diff = c - a - b;
        if (std::abs(diff - std::round(diff)) < 1e-2) {
            continue;
        }
        const double direct = hyp2f1_series({a, b, c, z});
        const double conn = hyp2f1_near_one(a, b, c, z);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(c);
        CAPTURE(z);
        CHECK(rel_err(conn, direct) <= 1e-9);
        ++checked;
    }
}

TEST_CASE("hyp2f1_near_one") {
    SUBCASE("matches the direct series at z = 0.6") {
        CHECK(rel_err(hyp2f1_near_one(2.0, 2.0, 1.3, 0.6), hyp2f1_series({2.0, 2.0, 1.3, 0.6})) <= 1e-10);
    }
    SUBCASE("beta = gamma collapses to a binomial") {
        CHECK(rel_err(hyp2f1_near_one(1.3, 2.2, 2.2, 0.95), std::pow(0.05, -1.3)) <= 1e-12);
    }
    SUBCASE("integer gamma - alpha - beta is rejected") {
        CHECK_THROWS_AS(hyp2f1_near_one(2.5, 2.5, 2.0, 0.9), DomainError);
        CHECK_THROWS_AS(hyp2f1_near_one(1.0, 1.0, 2.0 + 1e-9, 0.9), DomainError);
    }
}

TEST_CASE("asymptotic_prefactor") {
    const double pi = std::numbers::pi;
    CHECK(asymptotic_prefactor(2.0, 2.0, 1.5) == doctest::Approx(3.0 * pi / 8.0).epsilon(1e-13));

    // prefactor times K(delta) gives delta, the coefficient in the right-limit of d/dr
    for (double delta : {0.5, 1.5, 3.0, 4.5}) {
        const double k = 2.0 * std::pow(specfun::gamma(0.5 * (delta + 1.0)) / specfun::gamma(0.5 * delta), 2);
        const double pref = asymptotic_prefactor(0.5 * (delta + 1.0), 0.5 * (delta + 1.0), 0.5 * delta);
        CHECK(pref * k == doctest::Approx(delta).epsilon(1e-12));
    }
    CHECK(asymptotic_prefactor(1.7, -0.3, 0.9) < 0.0);  // Gamma(-0.3) < 0
    CHECK_THROWS_AS(asymptotic_prefactor(1.0, 0.2, 1.5), DomainError);  // diff > 0
    CHECK_THROWS_AS(asymptotic_prefactor(2.0, 2.0, 2.0), DomainError);  // integer diff
}

TEST_CASE("divergence rate near z = 1") {
    for (double delta : {1.0, 1.5, 3.0}) {
        const double a = 0.5 * (delta + 1.0), c = 0.5 * delta;
        const double pref = asymptotic_prefactor(a, a, c);
        double previous = 1.0;
        for (double w : {1e-2, 1e-3, 1e-4}) {
            const double ratio = hyp2f1({a, a, c, 1.0 - w}) * std::pow(w, 2.0 * a - c) / pref;
            const double dev = std::abs(ratio - 1.0);
            CHECK(dev < previous);
            previous = dev;
        }
        CHECK(previous <= 5e-3);
    }
}

TEST_CASE("contiguous relation") {
    SUBCASE("b = c gives zero on both sides") {
        const ContiguousPair p = contiguous_pair({2.0, 1.4, 1.4, 0.3});
        CHECK(p.rhs == 0.0);
        CHECK(std::abs(p.lhs_derivative) < 1e-9);
    }
    SUBCASE("b = c + 1 is closed form") {
        // z^{-1} (1-z)^{a+1} (1-z)^{-a} ... derivative of z^{-1}(1-z) 2F1(a, c+1; c; z)
        const ContiguousPair p = contiguous_pair({2.0, 2.5, 1.5, 0.4});
        CHECK(std::abs(p.lhs_derivative - p.rhs) <= 1e-7 * (1.0 + std::abs(p.rhs)));
    }
    SUBCASE("random draws in [0.3, 4]^3 x (0.05, 0.7)") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> up(0.3, 4.0);
        std::uniform_real_distribution<double> uz(0.05, 0.7);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const HypParams p{up(rng), up(rng), up(rng), uz(rng)};
            const ContiguousPair cp = contiguous_pair(p);
            worst = std::max(worst, std::abs(cp.lhs_derivative - cp.rhs) / (1.0 + std::abs(cp.rhs)));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("hyp1f1 against high-precision reference values") {
    for (const KummerRef& r : kKummerRefs) {
        CAPTURE(r.a);
        CAPTURE(r.b);
        CAPTURE(r.x);
        CHECK(rel_err(hyp1f1(r.a, r.b, r.x), r.value) < 1e-12);
    }
    CHECK(hyp1f1(0.3, 1.2, 0.0) == 1.0);
    CHECK_THROWS_AS(hyp1f1(1.0, -1.0, 0.5), DomainError);
}
