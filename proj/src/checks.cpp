#include "bbridge/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "bbridge/specfun.hpp"

namespace bbridge::checks {

namespace {

std::string describe(std::initializer_list<std::pair<const char*, double>> fields) {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& [name, v] : fields) {
        os << (first ? "" : " ") << name << '=' << v;
        first = false;
    }
    return os.str();
}

// run one cell; fill value/reference/residual via body, turn exceptions into failures
void add_cell(CheckSummary& out, std::string group, std::string label, double tolerance,
              const std::function<void(CheckCell&)>& body) {
    CheckCell cell;
    cell.group = std::move(group);
    cell.label = std::move(label);
    cell.tolerance = tolerance;
    try {
        body(cell);
        cell.passed = std::isfinite(cell.residual) && cell.residual <= tolerance;
    } catch (const std::exception& ex) {
        cell.error = ex.what();
        cell.residual = std::nan("");
        cell.passed = false;
    }
    ++(cell.passed ? out.passed : out.failed);
    out.cells.push_back(std::move(cell));
}

}  // namespace

std::vector<CheckCell> CheckSummary::group(const std::string& name) const {
    std::vector<CheckCell> out;
    for (const CheckCell& c : cells) {
        if (c.group == name) {
            out.push_back(c);
        }
    }
    return out;
}

CheckSummary specfun_battery(const SpecfunBatteryOptions& opt) {
    using specfun::HypParams;
    const auto start = std::chrono::steady_clock::now();
    specfun::SeriesOptions series;
    series.rel_tol = opt.series_rel_tol;
    CheckSummary out;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> up(0.3, 4.0);
    std::uniform_real_distribution<double> uz(0.05, 0.7);
    const int draws = opt.quick ? 100 : 1000;
    for (int i = 0; i < draws; ++i) {
        const HypParams p{up(rng), up(rng), up(rng), uz(rng)};
        add_cell(out, "contiguous", describe({{"a", p.a}, {"b", p.b}, {"c", p.c}, {"z", p.z}}), 1e-6,
                 [&](CheckCell& c) {
                     const specfun::ContiguousPair cp = specfun::contiguous_pair(p, 1e-5, series);
                     c.value = cp.lhs_derivative;
                     c.reference = cp.rhs;
                     c.residual = std::abs(cp.lhs_derivative - cp.rhs) / (1.0 + std::abs(cp.rhs));
                 });
    }

    const double zstep = opt.quick ? 0.33 : 0.09;
    for (double a : {0.5, 1.7, 3.2}) {
        for (double b : {0.8, 2.5}) {
            for (double z = 0.0; z <= 0.99; z += zstep) {
                add_cell(out, "binomial", describe({{"a", a}, {"b=c", b}, {"z", z}}), 1e-11, [&](CheckCell& c) {
                    c.value = specfun::hyp2f1({a, b, b, z}, series);
                    c.reference = std::pow(1.0 - z, -a);
                    c.residual = std::abs(c.value - c.reference) / c.reference;
                });
            }
            add_cell(out, "binomial", describe({{"a", a}, {"b=c", b}, {"z", 0.99}}), 1e-11, [&](CheckCell& c) {
                c.value = specfun::hyp2f1({a, b, b, 0.99}, series);
                c.reference = std::pow(0.01, -a);
                c.residual = std::abs(c.value - c.reference) / c.reference;
            });
        }
    }

    const HypParams conn[] = {{2.0, 2.0, 1.3, 0}, {0.75, 0.75, 0.25, 0}, {1.5, 0.5, 1.2, 0},
                              {2.5, 1.2, 0.9, 0}, {1.1, 0.4, 2.3, 0},   {2.25, 2.25, 1.7, 0}};
    for (HypParams p : conn) {
        for (double z = 0.5; z <= 0.75 + 1e-12; z += opt.quick ? 0.125 : 0.05) {
            p.z = z;
            add_cell(out, "connection", describe({{"a", p.a}, {"b", p.b}, {"c", p.c}, {"z", z}}), 1e-9,
                     [&](CheckCell& c) {
                         c.value = specfun::hyp2f1_near_one(p.a, p.b, p.c, z, series);
                         c.reference = specfun::hyp2f1_series(p, series);
                         c.residual = std::abs(c.value - c.reference) / std::abs(c.reference);
                     });
        }
    }

    for (double x = -10.0; x <= 30.0; x += opt.quick ? 1.37 : 0.37) {
        if (std::abs(x - std::round(x)) < 1e-3 && x <= 0.0) {
            continue;
        }
        add_cell(out, "recursion", describe({{"x", x}}), 1e-12, [&](CheckCell& c) {
            c.value = specfun::gamma(x + 1.0);
            c.reference = x * specfun::gamma(x);
            c.residual = std::abs(c.value - c.reference) / std::abs(c.value);
        });
    }

    for (double delta : {1.0, 1.5, 3.0}) {
        const double a = 0.5 * (delta + 1.0);
        const double g = 0.5 * delta;
        add_cell(out, "asymptotic", describe({{"delta", delta}}), 5e-3, [&](CheckCell& c) {
            const double pref = specfun::asymptotic_prefactor(a, a, g);
            double previous = INFINITY;
            bool monotone = true;
            double dev = 0.0;
            for (double w : {1e-2, 1e-3, 1e-4}) {
                const double ratio = specfun::hyp2f1_complement({a, a, g, 1.0 - w}, w, series) *
                                     std::pow(w, 2.0 * a - g) / pref;
                dev = std::abs(ratio - 1.0);
                monotone = monotone && dev < previous;
                previous = dev;
            }
            c.value = dev;
            c.reference = 0.0;
            c.residual = monotone ? dev : INFINITY;
            if (!monotone) {
                c.error = "deviation not decreasing along 1 - z = 1e-2, 1e-3, 1e-4";
            }
        });
    }

    out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace bbridge::checks
