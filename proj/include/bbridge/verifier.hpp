#pragma once

// Executable checks of the integration-by-parts identity for Bessel bridges:
// the drift term as a renormalized pairing, the pointwise-in-s identity, the
// integrated identity against <phi, h>, the vanishing b-derivative of Sigma at
// 0, the unit derivative jump on the diagonal, and regularity across delta = 2.

#include <string>
#include <vector>

#include "bbridge/bridge_kernels.hpp"
#include "bbridge/mu_pairing.hpp"
#include "bbridge/quadrature.hpp"

namespace bbridge::verifier {

/// scale ((t-a)(b-t))^3 on [a, b], 0 outside; C^2 with compact support.
struct CubicBump {
    double a = 0.2;
    double b = 0.8;
    double scale = 1.0;
};

/// Sum of cubic bumps with exact first and second derivatives.
class BumpFunction {
public:
    /// Throws DomainError unless every bump satisfies 0 < a < b < 1 and has a finite scale.
    explicit BumpFunction(std::vector<CubicBump> bumps);

    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
    /// Sorted, deduplicated bump endpoints.
    const std::vector<double>& breakpoints() const { return breaks_; }
    double support_lo() const { return breaks_.front(); }
    double support_hi() const { return breaks_.back(); }
    const std::vector<CubicBump>& bumps() const { return bumps_; }

private:
    std::vector<CubicBump> bumps_;
    std::vector<double> breaks_;
};

/// phi on [0, 1]: constant c, polynomial sum c_i t^i, or sin(k pi t).
class PhiFunction {
public:
    enum class Kind { constant, polynomial, sine };

    static PhiFunction constant(double c);
    static PhiFunction polynomial(std::vector<double> coeffs);
    static PhiFunction sine(double k = 1.0);

    double operator()(double t) const;
    Kind kind() const { return kind_; }
    bool is_zero() const;

private:
    Kind kind_ = Kind::constant;
    std::vector<double> coeffs_;
};

/// Registry keys: "1", "const:c", "poly:c0,c1,...", "sin", "sin:k".
PhiFunction parse_phi(const std::string& key);
/// Registry keys: "bump:a,b", "bump:a,b,scale", and '+'-joined sums of those.
BumpFunction parse_h(const std::string& key);

struct TestPair {
    std::string phi_key = "1";
    std::string h_key = "bump:0.2,0.8";
    PhiFunction phi() const { return parse_phi(phi_key); }
    BumpFunction h() const { return parse_h(h_key); }
};

/// Everything needed to rerun one verification.
struct CellSpec {
    std::string claim;  ///< identity | ibpf | vanishing | jump | chain | regularity
    double delta = 3.0;
    double s = 0.5;
    double r = 0.0;  ///< unused by identity, ibpf and jump
    std::string phi = "1";
    std::string h = "bump:0.2,0.8";
};

struct Diagnostic {
    std::string label;
    double point = 0.0;
    double value = 0.0;
};

enum class Metric {
    relative,  ///< |lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish
    mixed,     ///< |lhs - rhs| / (1 + |lhs|)
    absolute,
};

struct VerificationReport {
    CellSpec cell;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    Metric metric = Metric::relative;
    double tolerance = 0.0;
    bool passed = false;
    std::vector<Diagnostic> diagnostics;
    double runtime_ms = 0.0;
    std::string error;  ///< set when the computation threw; passed is then false
};

const char* metric_name(Metric m);

/// Fills the residuals and the verdict for the given metric and tolerance.
void finish_report(VerificationReport& rep, Metric metric, double tolerance);

struct NumericsOptions {
    mu::PairingOptions pairing{};
    /// inner (r) integrals
    oracles::QuadratureConfig inner{1e-9, 1e-13, 2000, oracles::EndpointTransform::none};
    /// outer (s) integral of verify_ibpf
    oracles::QuadratureConfig outer{1e-7, 1e-12, 2000, oracles::EndpointTransform::none};
    /// |r - s| below this uses the one-sided linearization of E[X_s X_r]
    double diagonal_window = 1e-5;
};

/// -Gamma(delta) / (4 (delta - 2)) <mu_{delta-3}, Sigma_r(X_s | .)>.
/// Throws DomainError when |delta - 2| < 1e-6.
double drift_term(const kernels::Dimension& d, const kernels::TimePair& t, const mu::PairingOptions& opt = {});

inline double drift_term(const kernels::Dimension& d, double s, double r, const mu::PairingOptions& opt = {}) {
    return drift_term(d, kernels::TimePair::of(s, r), opt);
}

struct DriftAtTwo {
    double value = 0.0;
    double err_est = 0.0;
};

/// Average of drift_term at 2 +- eps, error estimate half their difference.
DriftAtTwo drift_term_at_two(const kernels::TimePair& t, double eps = 1e-3, const mu::PairingOptions& opt = {});

/// int_0^1 h''(r) E[X_s X_r] dr, split at r = s.
double second_derivative_integral(const kernels::Dimension& d, double s, const BumpFunction& h,
                                  const NumericsOptions& opt = {});

/// int_0^1 h(r) drift_term(s, r) dr in the variable r - s.
double drift_integral(const kernels::Dimension& d, double s, const BumpFunction& h,
                      const NumericsOptions& opt = {});

/// lhs = int h'' E[X_s X_r] dr, rhs = -h(s) + int h(r) drift_term(s, r) dr.
VerificationReport verify_distributional_identity(const kernels::Dimension& d, double s, const BumpFunction& h,
                                                  double tolerance = 1e-5, const NumericsOptions& opt = {});

/// lhs = <phi, h>; rhs = int phi(s) (-int h'' E + int h drift) ds.
VerificationReport verify_ibpf(const kernels::Dimension& d, const TestPair& pair, double tolerance = 1e-4,
                               const NumericsOptions& opt = {});

/// Exact zero of the structural b-derivative at 0, and a fit of the quadrature
/// Sigma at b in {1e-3, 2e-3} against Sigma(0): lhs is the fitted linear
/// coefficient, rhs 0.
VerificationReport verify_vanishing_derivative(const kernels::Dimension& d, double s, double r,
                                               double tolerance = 1e-6);

/// lhs = d_plus - d_minus, rhs = -1. One-sided derivatives at s +- 1e-6 are
/// recorded in the diagnostics.
VerificationReport verify_jump(const kernels::Dimension& d, double s, double tolerance = 1e-13);

/// lhs = drift_term, rhs = two_point_d2r.
VerificationReport verify_chain(const kernels::Dimension& d, double s, double r, double tolerance = 1e-6,
                                const mu::PairingOptions& opt = {});

/// lhs = drift_term_at_two(eps = 1e-3), rhs = two_point_d2r at delta = 2.
VerificationReport verify_regularity(double s, double r, double tolerance = 1e-5,
                                     const mu::PairingOptions& opt = {});

/// Dispatch on cell.claim; exceptions become failed reports with `error` set.
VerificationReport run_cell(const CellSpec& cell, const NumericsOptions& opt = {});

struct SweepConfig {
    std::vector<double> deltas{0.5, 1.0, 1.5, 2.5, 3.0, 4.0};
    std::vector<std::string> claims{"identity", "ibpf", "vanishing", "jump", "chain", "regularity"};
    /// s values for identity and jump
    std::vector<double> s_values{0.3, 0.5, 0.7};
    /// (s, r) pairs for vanishing, chain and regularity
    std::vector<std::pair<double, double>> pairs{{0.3, 0.6}, {0.7, 0.4}};
    std::vector<std::string> phis{"1", "sin", "poly:0,0,1"};
    std::vector<std::string> hs{"bump:0.2,0.8", "bump:0.35,0.9"};
    /// <= 0 uses oracles::default_thread_count()
    int threads = 0;
};

/// Cells in key order: claims in config order, then delta, then the claim's
/// own grid. regularity ignores the delta grid.
std::vector<CellSpec> sweep_cells(const SweepConfig& cfg);

struct SweepResult {
    std::vector<VerificationReport> reports;
    std::size_t passed = 0;
    std::size_t failed = 0;
};

/// Runs every cell, in parallel when threads > 1; reports keep cell order.
SweepResult sweep(const SweepConfig& cfg, const NumericsOptions& opt = {});

}  // namespace bbridge::verifier
