#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "bbridge/bridge_kernels.hpp"
#include "bbridge/error.hpp"
#include "bbridge/oracles.hpp"

using namespace bbridge;
using namespace bbridge::oracles;
using kernels::Dimension;
using kernels::TimePair;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("Sigma quadrature against 20-digit references") {
    struct Ref {
        double delta, s, r, b, value;
    };
    const std::vector<Ref> refs = {
        {3.0, 0.3, 0.6, 0.8, 1.2923567743353166},
        {1.5, 0.7, 0.4, 1.1, 0.14661440888904113},
        {0.5, 0.2, 0.7, 0.3, 0.10502999068449335},
        {4.0, 0.5, 0.53, 0.2, 2.7036859582285052},
    };
    for (const Ref& ref : refs) {
        CAPTURE(ref.delta);
        const QuadResult q = sigma_quadrature(Dimension(ref.delta), TimePair::of(ref.s, ref.r), ref.b);
        CHECK(rel(q.value, ref.value) <= 1e-9);
    }
}

TEST_CASE("Sigma quadrature equals the series on a grid") {
    double worst = 0.0;
    for (double delta : {0.5, 1.0, 2.5, 4.0}) {
        const Dimension d(delta);
        for (auto [s, r] : {std::pair{0.2, 0.6}, std::pair{0.8, 0.35}, std::pair{0.45, 0.5}}) {
            const auto sig = kernels::sigma_series(d, s, r);
            for (double b : {0.2, 0.7, 1.4}) {
                const double q = sigma_quadrature(d, TimePair::of(s, r), b).value;
                worst = std::max(worst, rel(q, kernels::sigma_eval(sig, b)));
            }
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("two-point quadrature") {
    const Dimension d1(1.0);
    const QuadResult q = two_point_quadrature(d1, 0.25, 0.75);
    CHECK(rel(q.value, 0.12606122051581235) <= 1e-8);
    CHECK(two_point_quadrature(d1, 0.75, 0.25).value == q.value);
    const Dimension d3(3.0);
    CHECK(rel(two_point_quadrature(d3, 0.3, 0.6).value, kernels::two_point(d3, 0.3, 0.6)) <= 1e-7);
    CHECK_THROWS_AS(two_point_quadrature(d1, 0.4, 0.4), DomainError);
    CHECK_THROWS_AS(sigma_quadrature(d1, TimePair::of(0.2, 0.4), 0.0), DomainError);
}

TEST_CASE("Monte Carlo second moment and folded-bridge mean") {
    const PathEnsemble e2 = mc_bridge(2, {0.25, 0.5, 0.75}, 200000, 7);
    const McEstimate m2 = mc_two_point(e2, 0.5, 0.5);
    CHECK(std::abs(m2.mean - 0.5) <= 3.0 * m2.std_error);

    const PathEnsemble e1 = mc_bridge(1, {0.3, 0.5}, 200000, 11);
    const McEstimate m1 = mc_mean(e1, 0.3);
    CHECK(std::abs(m1.mean - std::sqrt(2.0 * 0.3 * 0.7 / std::numbers::pi)) <= 3.0 * m1.std_error);
}

TEST_CASE("Monte Carlo matches the closed two-point function") {
    const PathEnsemble e = mc_bridge(3, {0.3, 0.6}, 200000, 2024);
    const McEstimate m = mc_two_point(e, 0.3, 0.6);
    CHECK(std::abs(m.mean - 0.59932157089341488) <= 3.0 * m.std_error);
}

TEST_CASE("path values stay small near the ends") {
    const std::vector<double> grid = {0.001, 0.5, 0.999};
    const PathEnsemble e = mc_bridge(3, grid, 20000, 5);
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            REQUIRE(e.at(p, j) >= 0.0);
        }
    }
    for (double t : {0.001, 0.999}) {
        CHECK(mc_mean(e, t).mean < 3.0 * std::sqrt(3.0 * t * (1.0 - t)));
    }
}

TEST_CASE("ensembles do not depend on the thread count") {
    const std::vector<double> grid = {0.1, 0.4, 0.6, 0.9};
    McOptions one;
    one.threads = 1;
    McOptions many;
    many.threads = 5;
    const PathEnsemble a = mc_bridge(2, grid, 1001, 99, one);
    const PathEnsemble b = mc_bridge(2, grid, 1001, 99, many);
    CHECK(a.values == b.values);
    CHECK(mc_two_point(a, 0.4, 0.6).mean == mc_two_point(b, 0.4, 0.6).mean);
    const PathEnsemble c = mc_bridge(2, grid, 1001, 100, one);
    CHECK(a.values != c.values);
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
    const std::vector<double> grid = {0.5};
    const double se1 = mc_two_point(mc_bridge(2, grid, 50000, 3), 0.5, 0.5).std_error;
    const double se2 = mc_two_point(mc_bridge(2, grid, 100000, 3), 0.5, 0.5).std_error;
    CHECK(se1 / se2 == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("CSV and binary round trips are exact") {
    const PathEnsemble e = mc_bridge(3, {0.125, 0.3, 0.7}, 50, 17);
    std::stringstream csv;
    write_csv(e, csv);
    const PathEnsemble c = read_csv(csv, 3, 17);
    CHECK(c.grid == e.grid);
    CHECK(c.values == e.values);
    CHECK(c.n_paths == e.n_paths);

    std::stringstream bin;
    write_binary(e, bin);
    const PathEnsemble b = read_binary(bin);
    CHECK(b.values == e.values);
    CHECK(b.grid == e.grid);
    CHECK(b.seed == 17);
    CHECK(b.delta_int == 3);

    std::stringstream junk("not an ensemble");
    CHECK_THROWS_AS(read_binary(junk), DomainError);
}

TEST_CASE("Monte Carlo errors") {
    CHECK_THROWS_AS(mc_bridge(0, {0.5}, 10, 1), DomainError);
    CHECK_THROWS_AS(mc_bridge(2, {0.5, 0.4}, 10, 1), DomainError);
    CHECK_THROWS_AS(mc_bridge(2, {0.0, 0.4}, 10, 1), DomainError);
    CHECK_THROWS_AS(mc_bridge(2, {}, 10, 1), DomainError);
    const PathEnsemble e = mc_bridge(2, {0.5}, 10, 1);
    CHECK_THROWS_AS(mc_two_point(e, 0.5, 0.6), DomainError);
}
