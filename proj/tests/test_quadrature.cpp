#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bbridge/error.hpp"
#include "bbridge/quadrature.hpp"

using namespace bbridge;
using namespace bbridge::oracles;

namespace {

struct Known {
    std::string name;
    Integrand f;
    double lo;
    double hi;
    double value;
    bool singular_far_end = false;  // needs the double-exponential rule
};

// Twelve integrals with closed-form values: Gamma-type, Gaussian, endpoint-singular.
std::vector<Known> battery() {
    const double pi = std::numbers::pi;
    return {
        {"exp", [](double x) { return std::exp(-x); }, 0.0, kInfinity, 1.0},
        {"inv_sqrt", [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 2.0},
        {"gamma_half_gauss", [](double x) { return std::pow(x, 0.5) * std::exp(-0.5 * x * x); }, 0.0,
         kInfinity, std::pow(2.0, -0.25) * std::tgamma(0.75)},
        {"gauss", [](double x) { return std::exp(-x * x); }, 0.0, kInfinity, 0.5 * std::sqrt(pi)},
        {"x2_gauss", [](double x) { return x * x * std::exp(-x * x); }, 0.0, kInfinity, 0.25 * std::sqrt(pi)},
        {"gamma_3.5", [](double x) { return std::pow(x, 2.5) * std::exp(-x); }, 0.0, kInfinity,
         std::tgamma(3.5)},
        {"x^-0.75", [](double x) { return std::pow(x, -0.75); }, 0.0, 1.0, 4.0},
        {"log", [](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
        {"sqrt_over_1px", [](double x) { return 1.0 / (std::sqrt(x) * (1.0 + x)); }, 0.0, 1.0, 0.5 * pi},
        {"sin", [](double x) { return std::sin(x); }, 0.0, pi, 2.0},
        {"rational", [](double x) { return 1.0 / (1.0 + x * x); }, 0.0, kInfinity, 0.5 * pi},
        {"gamma_-0.5_shift", [](double x) { return std::pow(x, -0.5) * std::exp(-2.0 * x); }, 0.0, kInfinity,
         std::sqrt(pi / 2.0), true},
    };
}

}  // namespace

TEST_CASE("quadrature battery reproduces closed forms in both modes") {
    for (EndpointTransform mode : {EndpointTransform::none, EndpointTransform::tanh_sinh}) {
        QuadratureConfig cfg;
        cfg.endpoint_transform = mode;
        for (const Known& k : battery()) {
            if (k.singular_far_end && mode == EndpointTransform::none) {
                continue;
            }
            CAPTURE(k.name);
            CAPTURE(static_cast<int>(mode));
            const QuadResult r = integrate_1d(k.f, k.lo, k.hi, cfg);
            CHECK(std::abs(r.value - k.value) <= std::max(1e-10 * std::abs(k.value), 1e-14));
        }
    }
}

TEST_CASE("Gamma substitution integral at delta = 1.5") {
    const double delta = 1.5;
    auto f = [delta](double x) { return std::pow(x, delta - 1.0) * std::exp(-0.5 * x * x); };
    const double want = std::pow(2.0, 0.5 * delta - 1.0) * std::tgamma(0.5 * delta);
    CHECK(integrate_1d(f, 0.0, kInfinity).value == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("reversed limits and empty range") {
    auto f = [](double x) { return x * x; };
    CHECK(integrate_1d(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(integrate_1d(f, 0.5, 0.5).value == 0.0);
}

TEST_CASE("panels sum to the whole") {
    auto f = [](double x) { return std::abs(x - 0.3); };
    const std::array<double, 3> pts = {0.0, 0.3, 1.0};
    CHECK(integrate_panels(f, pts).value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
}

TEST_CASE("2D: separable exponential and inner tolerance") {
    auto f = [](double a, double b) { return std::exp(-a - b); };
    const QuadResult r = integrate_2d(f, {0.0, kInfinity, 0.0, kInfinity});
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("config validation and budget exhaustion") {
    QuadratureConfig bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, bad), DomainError);
    bad = {};
    bad.max_subdivisions = 5;
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, bad), DomainError);

    QuadratureConfig tiny;
    tiny.max_subdivisions = 10;
    tiny.rel_tol = 1e-14;
    try {
        integrate_1d([](double x) { return std::sin(200.0 * x) / std::sqrt(x); }, 0.0, 10.0, tiny);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(e.err_est() > 0.0);
    }
}
