#pragma once

#include <functional>
#include <limits>
#include <span>

namespace bbridge::oracles {

enum class EndpointTransform { none, tanh_sinh };

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
    EndpointTransform endpoint_transform = EndpointTransform::none;

    /// Throws DomainError on non-positive tolerances or fewer than 10 subdivisions.
    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;
using Integrand2 = std::function<double(double, double)>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Integral of f over (lo, hi); hi may be +infinity. Integrable singularities
/// are allowed at the endpoints only (f is never evaluated there).
///
/// `none` runs globally adaptive 7/15-point Gauss-Kronrod bisection; a
/// semi-infinite range is mapped onto (0, 1] first. `tanh_sinh` uses the
/// double-exponential rules (tanh-sinh on finite, exp-sinh on semi-infinite
/// ranges). Throws QuadratureError when the budget runs out before
/// err_est <= max(rel_tol |value|, abs_tol).
QuadResult integrate_1d(const Integrand& f, double lo, double hi, const QuadratureConfig& cfg = {});

/// Sum of integrate_1d over consecutive panels [p0,p1], [p1,p2], ...; use it
/// to place kinks and near-singular features on panel boundaries.
QuadResult integrate_panels(const Integrand& f, std::span<const double> points,
                            const QuadratureConfig& cfg = {});

struct Box {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;
};

/// Iterated integral: outer over y, inner over x with rel_tol / 10.
QuadResult integrate_2d(const Integrand2& f, const Box& box, const QuadratureConfig& cfg = {});

}  // namespace bbridge::oracles
