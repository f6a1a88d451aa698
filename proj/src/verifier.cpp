#include "bbridge/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "bbridge/error.hpp"
#include "bbridge/oracles.hpp"
#include "bbridge/specfun.hpp"

namespace bbridge::verifier {

using kernels::Dimension;
using kernels::TimePair;
using oracles::QuadratureConfig;

namespace {

constexpr double kJumpStep = 1e-6;
constexpr double kTwoEps = 1e-3;

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != cell.size() || !std::isfinite(v)) {
            throw DomainError("bad number '" + cell + "' in '" + key + "'");
        }
        out.push_back(v);
    }
    return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// integrate f over [lo, hi] with panels at every breakpoint strictly inside
double integrate_broken(const oracles::Integrand& f, double lo, double hi, const std::vector<double>& breaks,
                        const QuadratureConfig& cfg) {
    std::vector<double> pts{lo};
    for (double b : breaks) {
        if (b > lo && b < hi) {
            pts.push_back(b);
        }
    }
    pts.push_back(hi);
    return oracles::integrate_panels(f, pts, cfg).value;
}

}  // namespace

BumpFunction::BumpFunction(std::vector<CubicBump> bumps) : bumps_(std::move(bumps)) {
    if (bumps_.empty()) {
        throw DomainError("BumpFunction: at least one bump is required");
    }
    for (const CubicBump& b : bumps_) {
        if (!(b.a > 0.0 && b.a < b.b && b.b < 1.0) || !std::isfinite(b.scale)) {
            throw DomainError("BumpFunction: need 0 < a < b < 1 and a finite scale");
        }
        breaks_.push_back(b.a);
        breaks_.push_back(b.b);
    }
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
}

double BumpFunction::value(double t) const {
    double sum = 0.0;
    for (const CubicBump& b : bumps_) {
        if (t > b.a && t < b.b) {
            const double p = (t - b.a) * (b.b - t);
            sum += b.scale * p * p * p;
        }
    }
    return sum;
}

double BumpFunction::d1(double t) const {
    double sum = 0.0;
    for (const CubicBump& b : bumps_) {
        if (t > b.a && t < b.b) {
            const double p = (t - b.a) * (b.b - t);
            sum += b.scale * 3.0 * p * p * (b.a + b.b - 2.0 * t);
        }
    }
    return sum;
}

double BumpFunction::d2(double t) const {
    double sum = 0.0;
    for (const CubicBump& b : bumps_) {
        if (t > b.a && t < b.b) {
            const double p = (t - b.a) * (b.b - t);
            const double dp = b.a + b.b - 2.0 * t;
            sum += b.scale * (6.0 * p * dp * dp - 6.0 * p * p);
        }
    }
    return sum;
}

PhiFunction PhiFunction::constant(double c) {
    PhiFunction f;
    f.kind_ = Kind::constant;
    f.coeffs_ = {c};
    return f;
}

PhiFunction PhiFunction::polynomial(std::vector<double> coeffs) {
    PhiFunction f;
    f.kind_ = Kind::polynomial;
    f.coeffs_ = std::move(coeffs);
    return f;
}

PhiFunction PhiFunction::sine(double k) {
    PhiFunction f;
    f.kind_ = Kind::sine;
    f.coeffs_ = {k};
    return f;
}

double PhiFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::constant:
            return coeffs_[0];
        case Kind::sine:
            return std::sin(coeffs_[0] * std::numbers::pi * t);
        case Kind::polynomial:
            break;
    }
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * t + *it;
    }
    return acc;
}

bool PhiFunction::is_zero() const {
    if (kind_ == Kind::sine) {
        return coeffs_[0] == 0.0;
    }
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

PhiFunction parse_phi(const std::string& key) {
    if (key == "1") {
        return PhiFunction::constant(1.0);
    }
    if (key == "0") {
        return PhiFunction::constant(0.0);
    }
    if (key == "sin") {
        return PhiFunction::sine(1.0);
    }
    const auto colon = key.find(':');
    if (colon == std::string::npos) {
        throw DomainError("unknown phi '" + key + "'");
    }
    const std::string name = key.substr(0, colon);
    const std::vector<double> nums = parse_numbers(key.substr(colon + 1), key);
    if (name == "const" && nums.size() == 1) {
        return PhiFunction::constant(nums[0]);
    }
    if (name == "sin" && nums.size() == 1) {
        return PhiFunction::sine(nums[0]);
    }
    if (name == "poly" && !nums.empty()) {
        return PhiFunction::polynomial(nums);
    }
    throw DomainError("unknown phi '" + key + "'");
}

BumpFunction parse_h(const std::string& key) {
    std::vector<CubicBump> bumps;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '+')) {
        if (part.rfind("bump:", 0) != 0) {
            throw DomainError("unknown h '" + key + "'");
        }
        const std::vector<double> nums = parse_numbers(part.substr(5), key);
        if (nums.size() != 2 && nums.size() != 3) {
            throw DomainError("bump needs a,b or a,b,scale in '" + key + "'");
        }
        bumps.push_back({nums[0], nums[1], nums.size() == 3 ? nums[2] : 1.0});
    }
    return BumpFunction(std::move(bumps));
}

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::relative:
            return "relative";
        case Metric::mixed:
            return "mixed";
        case Metric::absolute:
            return "absolute";
    }
    return "relative";
}

void finish_report(VerificationReport& rep, Metric metric, double tolerance) {
    rep.metric = metric;
    rep.tolerance = tolerance;
    rep.abs_residual = std::abs(rep.lhs - rep.rhs);
    switch (metric) {
        case Metric::relative: {
            const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
            rep.rel_residual = scale == 0.0 ? 0.0 : rep.abs_residual / scale;
            break;
        }
        case Metric::mixed:
            rep.rel_residual = rep.abs_residual / (1.0 + std::abs(rep.lhs));
            break;
        case Metric::absolute:
            rep.rel_residual = rep.abs_residual;
            break;
    }
    rep.passed = std::isfinite(rep.rel_residual) && rep.rel_residual <= tolerance && rep.error.empty();
}

double drift_term(const Dimension& d, const TimePair& t, const mu::PairingOptions& opt) {
    if (d.near_two()) {
        throw DomainError("drift_term: delta within 1e-6 of 2, use drift_term_at_two");
    }
    const double delta = d.delta();
    const kernels::SigmaSeries sig = kernels::sigma_series(d, t);
    const mu::SmoothTestFunction psi = kernels::sigma_test_function(sig);
    const double pairing = mu::mu_pair(delta - 3.0, psi, opt);
    return -specfun::gamma(delta) / (4.0 * (delta - 2.0)) * pairing;
}

DriftAtTwo drift_term_at_two(const TimePair& t, double eps, const mu::PairingOptions& opt) {
    if (!(eps > 1e-6) || !(eps < 1.0)) {
        throw DomainError("drift_term_at_two: eps must lie in (1e-6, 1)");
    }
    const double up = drift_term(Dimension(2.0 + eps), t, opt);
    const double down = drift_term(Dimension(2.0 - eps), t, opt);
    return {0.5 * (up + down), 0.5 * std::abs(up - down)};
}

double second_derivative_integral(const Dimension& d, double s, const BumpFunction& h, const NumericsOptions& opt) {
    const double lo = h.support_lo();
    const double hi = h.support_hi();
    const auto& bp = h.breakpoints();
    if (!(s > lo && s < hi)) {
        return integrate_broken([&](double r) { return h.d2(r) * kernels::two_point(d, s, r); }, lo, hi, bp,
                                opt.inner);
    }
    const double diag = kernels::two_point(d, s, s);
    const kernels::DerivativeLimits lim = kernels::derivative_limits(d, s);
    const double w = opt.diagonal_window;
    // one side in u = |r - s|; the kink sits at u = 0
    auto side = [&](double sign, double slope, double len) {
        std::vector<double> ubreaks;
        for (double b : bp) {
            ubreaks.push_back(sign * (b - s));
        }
        auto f = [&](double u) {
            const double r = s + sign * u;
            const double e = u < w ? diag + slope * sign * u : kernels::two_point(d, TimePair::offset(s, sign * u));
            return h.d2(r) * e;
        };
        ubreaks.push_back(w);
        return integrate_broken(f, 0.0, len, ubreaks, opt.inner);
    };
    return side(1.0, lim.d_plus, hi - s) + side(-1.0, lim.d_minus, s - lo);
}

double drift_integral(const Dimension& d, double s, const BumpFunction& h, const NumericsOptions& opt) {
    const double lo = h.support_lo();
    const double hi = h.support_hi();
    const auto& bp = h.breakpoints();
    if (!(s > lo && s < hi)) {
        return integrate_broken([&](double r) { return h.value(r) * drift_term(d, TimePair::of(s, r), opt.pairing); },
                                lo, hi, bp, opt.inner);
    }
    // drift_term blows up like |r - s|^(delta/2 - 1) for delta < 2: the panel
    // touching the diagonal runs tanh-sinh
    QuadratureConfig near = opt.inner;
    near.endpoint_transform = oracles::EndpointTransform::tanh_sinh;
    auto side = [&](double sign, double len) {
        auto f = [&](double u) {
            return h.value(s + sign * u) * drift_term(d, TimePair::offset(s, sign * u), opt.pairing);
        };
        std::vector<double> pts{0.0};
        for (double b : bp) {
            const double u = sign * (b - s);
            if (u > 0.0 && u < len) {
                pts.push_back(u);
            }
        }
        pts.push_back(len);
        std::sort(pts.begin(), pts.end());
        double total = oracles::integrate_1d(f, pts[0], pts[1], near).value;
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            total += oracles::integrate_1d(f, pts[i], pts[i + 1], opt.inner).value;
        }
        return total;
    };
    return side(1.0, hi - s) + side(-1.0, s - lo);
}

VerificationReport verify_distributional_identity(const Dimension& d, double s, const BumpFunction& h,
                                                  double tolerance, const NumericsOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.cell.claim = "identity";
    rep.cell.delta = d.delta();
    rep.cell.s = s;
    const double i1 = second_derivative_integral(d, s, h, opt);
    const double i2 = drift_integral(d, s, h, opt);
    rep.lhs = i1;
    rep.rhs = -h.value(s) + i2;
    rep.diagnostics = {{"h(s)", s, h.value(s)}, {"int h drift", s, i2}};
    finish_report(rep, Metric::mixed, tolerance);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

VerificationReport verify_ibpf(const Dimension& d, const TestPair& pair, double tolerance, const NumericsOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    const PhiFunction phi = pair.phi();
    const BumpFunction h = pair.h();
    VerificationReport rep;
    rep.cell.claim = "ibpf";
    rep.cell.delta = d.delta();
    rep.cell.phi = pair.phi_key;
    rep.cell.h = pair.h_key;

    const auto& bp = h.breakpoints();
    rep.lhs = integrate_broken([&](double s) { return phi(s) * h.value(s); }, h.support_lo(), h.support_hi(), bp,
                               opt.outer);
    if (phi.is_zero()) {
        rep.rhs = 0.0;
    } else {
        // g(s) = -int h'' E + int h drift, which should reproduce h(s)
        std::map<double, double> cache;
        auto g = [&](double s) {
            auto it = cache.find(s);
            if (it != cache.end()) {
                return it->second;
            }
            const double v = -second_derivative_integral(d, s, h, opt) + drift_integral(d, s, h, opt);
            cache.emplace(s, v);
            return v;
        };
        rep.rhs = integrate_broken([&](double s) { return phi(s) * g(s); }, 0.0, 1.0, bp, opt.outer);
        double worst = 0.0;
        double worst_s = 0.0;
        for (const auto& [s, v] : cache) {
            const double dev = std::abs(v - h.value(s));
            if (dev > worst) {
                worst = dev;
                worst_s = s;
            }
        }
        rep.diagnostics.push_back({"max |g(s) - h(s)|", worst_s, worst});
        rep.diagnostics.push_back({"s nodes", 0.0, static_cast<double>(cache.size())});
    }
    finish_report(rep, Metric::relative, tolerance);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

VerificationReport verify_vanishing_derivative(const Dimension& d, double s, double r, double tolerance) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.cell.claim = "vanishing";
    rep.cell.delta = d.delta();
    rep.cell.s = s;
    rep.cell.r = r;
    const kernels::SigmaSeries sig = kernels::sigma_series(d, s, r);
    const double structural = kernels::sigma_deriv(sig, 0.0, 1);
    const double sigma0 = kernels::sigma_eval(sig, 0.0);
    const QuadratureConfig tight{1e-13, 1e-300, 4000, oracles::EndpointTransform::none};
    const double b1 = 1e-3;
    const double d1 = oracles::sigma_quadrature(d, TimePair::of(s, r), b1, tight).value - sigma0;
    const double d2 = oracles::sigma_quadrature(d, TimePair::of(s, r), 2.0 * b1, tight).value - sigma0;
    // Sigma(b) - Sigma(0) = c1 b + c2 b^2 through both points
    const double c1 = (4.0 * d1 - d2) / (2.0 * b1);
    const double c2 = (d2 - 2.0 * d1) / (2.0 * b1 * b1);
    rep.lhs = std::abs(c1) + std::abs(structural);
    rep.rhs = 0.0;
    rep.diagnostics = {{"structural d/db at 0", 0.0, structural},
                       {"fitted linear coefficient", b1, c1},
                       {"fitted quadratic coefficient", b1, c2},
                       {"Sigma(0)", 0.0, sigma0}};
    finish_report(rep, Metric::absolute, tolerance);
    if (structural != 0.0) {
        rep.passed = false;
    }
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

VerificationReport verify_jump(const Dimension& d, double s, double tolerance) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.cell.claim = "jump";
    rep.cell.delta = d.delta();
    rep.cell.s = s;
    const kernels::DerivativeLimits lim = kernels::derivative_limits(d, s);
    rep.lhs = lim.d_plus - lim.d_minus;
    rep.rhs = -1.0;
    const double num_plus = kernels::two_point_dr(d, TimePair::offset(s, kJumpStep));
    const double num_minus = kernels::two_point_dr(d, TimePair::offset(s, -kJumpStep));
    rep.diagnostics = {{"d_plus", s, lim.d_plus},
                       {"d_minus", s, lim.d_minus},
                       {"dr at s + 1e-6", s + kJumpStep, num_plus},
                       {"dr at s - 1e-6", s - kJumpStep, num_minus},
                       {"|dr(s+) - d_plus|", s, std::abs(num_plus - lim.d_plus)},
                       {"|dr(s-) - d_minus|", s, std::abs(num_minus - lim.d_minus)}};
    finish_report(rep, Metric::absolute, tolerance);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

VerificationReport verify_chain(const Dimension& d, double s, double r, double tolerance,
                                const mu::PairingOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.cell.claim = "chain";
    rep.cell.delta = d.delta();
    rep.cell.s = s;
    rep.cell.r = r;
    rep.lhs = drift_term(d, s, r, opt);
    rep.rhs = kernels::two_point_d2r(d, s, r);
    finish_report(rep, Metric::relative, tolerance);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

VerificationReport verify_regularity(double s, double r, double tolerance, const mu::PairingOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.cell.claim = "regularity";
    rep.cell.delta = 2.0;
    rep.cell.s = s;
    rep.cell.r = r;
    const TimePair t = TimePair::of(s, r);
    const DriftAtTwo avg = drift_term_at_two(t, kTwoEps, opt);
    rep.lhs = avg.value;
    rep.rhs = kernels::two_point_d2r(Dimension(2.0), t);
    rep.diagnostics.push_back({"drift at 2 + 1e-3", 2.0 + kTwoEps, drift_term(Dimension(2.0 + kTwoEps), t, opt)});
    rep.diagnostics.push_back({"drift at 2 - 1e-3", 2.0 - kTwoEps, drift_term(Dimension(2.0 - kTwoEps), t, opt)});
    rep.diagnostics.push_back({"error estimate", kTwoEps, avg.err_est});
    // the j = 1 Taylor term must not matter on either side of 2
    for (double delta : {1.5, 2.0 - kTwoEps, 2.0 + kTwoEps, 2.5}) {
        mu::PairingOptions omit = opt;
        omit.order_one = mu::OrderOneTerm::force_omit;
        mu::PairingOptions keep = opt;
        keep.order_one = mu::OrderOneTerm::force_subtract;
        const Dimension dd(delta);
        const double change = std::abs(drift_term(dd, t, omit) - drift_term(dd, t, keep));
        rep.diagnostics.push_back({"order-one toggle change", delta, change});
        if (change != 0.0) {
            rep.error = "order-one toggle changed the drift term";
        }
    }
    finish_report(rep, Metric::mixed, tolerance);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

VerificationReport run_cell(const CellSpec& cell, const NumericsOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    try {
        VerificationReport rep;
        const std::string& c = cell.claim;
        if (c == "regularity") {
            rep = verify_regularity(cell.s, cell.r, 1e-5, opt.pairing);
        } else {
            const Dimension d(cell.delta);
            if (c == "identity") {
                rep = verify_distributional_identity(d, cell.s, parse_h(cell.h), cell.delta < 1.0 ? 1e-4 : 1e-5, opt);
            } else if (c == "ibpf") {
                rep = verify_ibpf(d, TestPair{cell.phi, cell.h}, 1e-4, opt);
            } else if (c == "vanishing") {
                rep = verify_vanishing_derivative(d, cell.s, cell.r);
            } else if (c == "jump") {
                rep = verify_jump(d, cell.s);
            } else if (c == "chain") {
                rep = verify_chain(d, cell.s, cell.r, 1e-6, opt.pairing);
            } else {
                throw DomainError("unknown claim '" + c + "'");
            }
        }
        rep.cell = cell;
        return rep;
    } catch (const std::exception& ex) {
        VerificationReport rep;
        rep.cell = cell;
        rep.lhs = std::nan("");
        rep.rhs = std::nan("");
        rep.abs_residual = std::nan("");
        rep.rel_residual = std::nan("");
        rep.error = ex.what();
        rep.passed = false;
        rep.runtime_ms = elapsed_ms(start);
        return rep;
    }
}

std::vector<CellSpec> sweep_cells(const SweepConfig& cfg) {
    std::vector<CellSpec> cells;
    for (const std::string& claim : cfg.claims) {
        if (claim == "regularity") {
            for (auto [s, r] : cfg.pairs) {
                cells.push_back({claim, 2.0, s, r, "", ""});
            }
            continue;
        }
        for (double delta : cfg.deltas) {
            if (claim == "identity") {
                for (double s : cfg.s_values) {
                    for (const std::string& h : cfg.hs) {
                        cells.push_back({claim, delta, s, 0.0, "", h});
                    }
                }
            } else if (claim == "ibpf") {
                for (const std::string& phi : cfg.phis) {
                    for (const std::string& h : cfg.hs) {
                        cells.push_back({claim, delta, 0.0, 0.0, phi, h});
                    }
                }
            } else if (claim == "jump") {
                for (double s : cfg.s_values) {
                    cells.push_back({claim, delta, s, 0.0, "", ""});
                }
            } else if (claim == "vanishing" || claim == "chain") {
                for (auto [s, r] : cfg.pairs) {
                    cells.push_back({claim, delta, s, r, "", ""});
                }
            } else {
                throw DomainError("unknown claim '" + claim + "'");
            }
        }
    }
    return cells;
}

SweepResult sweep(const SweepConfig& cfg, const NumericsOptions& opt) {
    const std::vector<CellSpec> cells = sweep_cells(cfg);
    SweepResult out;
    out.reports.resize(cells.size());
    const int threads = cfg.threads > 0 ? cfg.threads : oracles::default_thread_count();
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, cells.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            out.reports[i] = run_cell(cells[i], opt);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& rep : out.reports) {
        (rep.passed ? out.passed : out.failed) += 1;
    }
    return out;
}

}  // namespace bbridge::verifier
