#pragma once

// The distributions mu_alpha on [0, inf): point evaluation of a signed
// derivative at 0 for alpha in {0, -1, -2, -3}, otherwise the Taylor-renormalized
// power-weight integral
//
//   <mu_alpha, psi> = 1/Gamma(alpha) * int_0^inf (psi(x) - sum_{j <= -alpha} psi^(j)(0) x^j / j!) x^(alpha-1) dx.

#include <functional>
#include <optional>
#include <vector>

#include "bbridge/quadrature.hpp"

namespace bbridge::mu {

/// Bound |psi(x)| <= constant * g(x) for x >= 1, with g one of
/// exp(-rate x^2), exp(-rate x), x^(-power).
struct DecayCertificate {
    enum class Kind { gaussian, exponential, power };
    Kind kind = Kind::gaussian;
    double constant = 1.0;
    double rate = 1.0;
    double power = 0.0;

    /// Smallest X >= 1 (up to a factor 1.05) with
    /// int_X^inf constant g(x) x^(alpha-1) dx < tail_tol;
    /// +inf for power decay.
    double truncation_point(double alpha, double tail_tol = 1e-15) const;
};

/// Maclaurin data in the scaled variable: psi(x) = sum_m coeffs[m] (x/radius)^m,
/// trusted for x <= radius.
/// Lets the pairing evaluate Taylor remainders without cancellation near 0.
/// Without it the remainder is formed by direct subtraction and extrapolated
/// below x = 1e-3 from its leading order, which is adequate for alpha > -2
/// but loses digits beyond that.
struct MaclaurinTail {
    std::vector<double> coeffs;
    double radius = 0.0;

    /// sum_{m > order} coeffs[m] x^m.
    double remainder(double x, int order) const;
};

struct TestFunctionParts {
    std::function<double(double)> value;
    /// psi(0), psi'(0), psi''(0), psi'''(0); may be shorter when fewer are known.
    std::vector<double> taylor0;
    DecayCertificate decay;
    std::function<double(double)> third_derivative;
    std::optional<MaclaurinTail> tail;
    /// Length over which psi varies. The pairing splits its integral at
    /// min(1, scale), so a sharply curved psi does not cancel its own Taylor terms.
    double scale = 1.0;
};

/// Immutable psi fed to mu_alpha. The constructor checks that the Taylor data
/// is finite and consistent with the supplied maps at 0.
class SmoothTestFunction {
public:
    explicit SmoothTestFunction(TestFunctionParts parts);

    double operator()(double x) const { return parts_.value(x); }
    double third_derivative(double x) const;
    bool has_third_derivative() const { return static_cast<bool>(parts_.third_derivative); }
    const std::vector<double>& taylor0() const { return parts_.taylor0; }
    const DecayCertificate& decay() const { return parts_.decay; }
    const std::optional<MaclaurinTail>& tail() const { return parts_.tail; }
    double scale() const { return parts_.scale; }

private:
    TestFunctionParts parts_;
};

/// psi(x) = exp(-lambda x).
SmoothTestFunction exponential_test_function(double lambda);

/// psi(x) = (sum_i poly[i] x^(2i)) exp(-lambda x^2), with all Taylor data.
SmoothTestFunction gaussian_poly_test_function(std::vector<double> poly, double lambda);

enum class OrderOneTerm {
    by_definition,  ///< subtract psi'(0) x exactly when 1 <= -alpha
    force_subtract,
    force_omit,
};

struct PairingOptions {
    oracles::QuadratureConfig quad{1e-11, 1e-16, 4000, oracles::EndpointTransform::none};
    OrderOneTerm order_one = OrderOneTerm::by_definition;
    double tail_tol = 1e-15;
};

/// <mu_alpha, psi> for alpha > -4. Throws DomainError when alpha <= -4 or the
/// Taylor entries the subtraction needs are missing; QuadratureError when the
/// integral does not converge.
double mu_pair(double alpha, const SmoothTestFunction& psi, const PairingOptions& opt = {});

/// -<mu_{alpha+3}, psi'''>, the third-derivative route; needs alpha > -3 and
/// psi.third_derivative.
double mu_pair_via_third_derivative(double alpha, const SmoothTestFunction& psi,
                                    const PairingOptions& opt = {});

}  // namespace bbridge::mu
