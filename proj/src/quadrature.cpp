#include "bbridge/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bbridge/error.hpp"

namespace bbridge::oracles {
namespace {

// 7-point Gauss / 15-point Kronrod abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double value;
    double err;
    bool operator<(const Panel& other) const { return err < other.err; }
};

Panel kronrod15(const Integrand& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double res_k = fc * kWgk[7];
    double res_g = fc * kWg[3];
    double res_abs = std::abs(res_k);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        res_k += kWgk[j] * (f1[j] + f2[j]);
        res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) {
            res_g += kWg[j / 2] * (f1[j] + f2[j]);
        }
    }
    const double mean = 0.5 * res_k;
    double res_asc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    res_asc *= std::abs(half);
    res_abs *= std::abs(half);
    double err = std::abs((res_k - res_g) * half);
    if (res_asc != 0.0 && err != 0.0) {
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * res_abs, err);
    }
    return {lo, hi, res_k * half, err};
}

QuadResult adaptive_kronrod(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg) {
    std::priority_queue<Panel> heap;
    Panel first = kronrod15(f, lo, hi);
    double total = first.value;
    double total_err = first.err;
    heap.push(first);
    int evaluations = 15;
    int subdivisions = 0;
    auto converged = [&] { return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
    while (!converged()) {
        if (subdivisions >= cfg.max_subdivisions) {
            std::ostringstream os;
            os << "quadrature on (" << lo << ", " << hi << ") hit " << cfg.max_subdivisions
               << " subdivisions; error estimate " << total_err;
            throw QuadratureError(os.str(), total, total_err);
        }
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            std::ostringstream os;
            os << "quadrature on (" << lo << ", " << hi
               << ") cannot bisect further; error estimate " << total_err;
            throw QuadratureError(os.str(), total, total_err);
        }
        heap.pop();
        const Panel left = kronrod15(f, worst.lo, mid);
        const Panel right = kronrod15(f, mid, worst.hi);
        evaluations += 30;
        ++subdivisions;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift accumulated by incremental updates
    double value = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().err;
        heap.pop();
    }
    return {value, err, evaluations};
}

QuadResult double_exponential(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg) {
    double err = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    int evaluations = 0;
    auto counted = [&](double x) {
        ++evaluations;
        return f(x);
    };
    // the rules stop on their own level-difference test, which can be looser
    // than ours; tighten the request a few times before giving up
    double request = cfg.rel_tol;
    for (int attempt = 0; attempt < 3; ++attempt) {
        if (std::isinf(hi)) {
            boost::math::quadrature::exp_sinh<double> rule;
            value = rule.integrate(counted, lo, hi, request, &err, &l1);
        } else {
            boost::math::quadrature::tanh_sinh<double> rule;
            value = rule.integrate(counted, lo, hi, request, &err, &l1);
        }
        if (std::isfinite(value) && err <= std::max(cfg.abs_tol, cfg.rel_tol * l1)) {
            break;
        }
        request = std::max(request * 1e-2, 1e-15);
    }
    if (!std::isfinite(value) || err > std::max(cfg.abs_tol, cfg.rel_tol * l1)) {
        std::ostringstream os;
        os << "double-exponential quadrature on (" << lo << ", " << hi
           << ") did not reach tolerance; error estimate " << err;
        throw QuadratureError(os.str(), value, err);
    }
    return {value, err, evaluations};
}

}  // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw DomainError("QuadratureConfig: tolerances must be positive");
    }
    if (max_subdivisions < 10) {
        throw DomainError("QuadratureConfig: max_subdivisions must be at least 10");
    }
}

QuadResult integrate_1d(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg) {
    cfg.validate();
    if (std::isinf(lo) || std::isnan(lo) || std::isnan(hi) || (std::isinf(hi) && hi < 0.0)) {
        throw DomainError("integrate_1d: lower limit must be finite and upper limit > -inf");
    }
    if (hi == lo) {
        return {};
    }
    if (hi < lo) {
        QuadResult r = integrate_1d(f, hi, lo, cfg);
        r.value = -r.value;
        return r;
    }
    if (cfg.endpoint_transform == EndpointTransform::tanh_sinh) {
        return double_exponential(f, lo, hi, cfg);
    }
    if (std::isinf(hi)) {
        // x = lo + (1 - t) / t maps (0, 1] onto [lo, inf)
        auto mapped = [&f, lo](double t) {
            const double x = lo + (1.0 - t) / t;
            const double fx = f(x);
            return fx == 0.0 ? 0.0 : fx / (t * t);
        };
        return adaptive_kronrod(mapped, 0.0, 1.0, cfg);
    }
    return adaptive_kronrod(f, lo, hi, cfg);
}

QuadResult integrate_panels(const Integrand& f, std::span<const double> points,
                            const QuadratureConfig& cfg) {
    QuadResult total;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const QuadResult part = integrate_1d(f, points[i], points[i + 1], cfg);
        total.value += part.value;
        total.err_est += part.err_est;
        total.evaluations += part.evaluations;
    }
    return total;
}

QuadResult integrate_2d(const Integrand2& f, const Box& box, const QuadratureConfig& cfg) {
    QuadratureConfig inner = cfg;
    inner.rel_tol = cfg.rel_tol / 10.0;
    inner.abs_tol = cfg.abs_tol / 10.0;
    int evaluations = 0;
    auto outer = [&](double y) {
        const QuadResult r = integrate_1d([&](double x) { return f(x, y); }, box.x_lo, box.x_hi, inner);
        evaluations += r.evaluations;
        return r.value;
    };
    QuadResult r = integrate_1d(outer, box.y_lo, box.y_hi, cfg);
    r.evaluations = evaluations;
    return r;
}

}  // namespace bbridge::oracles
