// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance                 all ten criteria
//   acceptance --criterion 4   just one (repeatable)
//
// Exit status 0 iff every selected criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "bbridge/bridge_kernels.hpp"
#include "bbridge/checks.hpp"
#include "bbridge/oracles.hpp"
#include "bbridge/verifier.hpp"

#ifndef BBRIDGE_CLI_PATH
#define BBRIDGE_CLI_PATH "bbridge"
#endif

using namespace bbridge;
using kernels::Dimension;
using kernels::TimePair;

namespace {

const std::vector<double> kDeltas = {0.5, 1.0, 1.5, 2.5, 3.0, 4.0};

struct Outcome {
    bool passed = false;
    std::string summary;
    std::vector<std::string> notes;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string sci(double v, int digits = 2) {
    std::ostringstream os;
    os.precision(digits);
    os << std::scientific << v;
    return os.str();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// --------------------------------------------------------------------------

Outcome contiguous() {
    const checks::CheckSummary s = checks::specfun_battery();
    const auto cells = s.group("contiguous");
    std::size_t ok = 0;
    double worst = 0.0;
    for (const auto& c : cells) {
        ok += c.passed ? 1 : 0;
        worst = std::max(worst, std::isnan(c.residual) ? INFINITY : c.residual);
    }
    return {ok == cells.size() && cells.size() >= 1000,
            std::to_string(ok) + "/" + std::to_string(cells.size()) + " random cells, worst residual " + sci(worst) +
                " <= 1e-06 (1 + |rhs|)",
            {}};
}

Outcome asymptotics() {
    const checks::CheckSummary s = checks::specfun_battery({true});
    const auto cells = s.group("asymptotic");
    Outcome out{true, "", {}};
    std::ostringstream sum;
    for (const auto& c : cells) {
        out.passed = out.passed && c.passed;
        sum << (sum.tellp() > 0 ? ", " : "") << c.label << " dev@1e-4 " << sci(c.value);
        if (!c.error.empty()) {
            out.notes.push_back(c.label + ": " + c.error);
        }
    }
    out.passed = out.passed && cells.size() == 3;
    out.summary = sum.str() + " (monotone, <= 5e-03)";
    return out;
}

Outcome sigma_grid() {
    double worst = 0.0;
    std::size_t cells = 0;
    for (double delta : kDeltas) {
        const Dimension d(delta);
        for (double s : {0.2, 0.45, 0.8}) {
            for (double r : {0.3, 0.6, 0.7}) {
                const auto sig = kernels::sigma_series(d, s, r);
                for (double b : {0.2, 0.7, 1.4}) {
                    const double q = oracles::sigma_quadrature(d, TimePair::of(s, r), b).value;
                    worst = std::max(worst, rel(kernels::sigma_eval(sig, b), q));
                    ++cells;
                }
            }
        }
    }
    return {worst <= 1e-8, std::to_string(cells) + " cells (6 delta x 3x3x3), worst relative error " + sci(worst) +
                               " <= 1e-08",
            {}};
}

Outcome two_point_oracles() {
    Outcome out;
    double worst = 0.0;
    std::size_t quad_cells = 0;
    const std::vector<std::pair<double, double>> quad_pairs = {{0.25, 0.75}, {0.3, 0.6}, {0.7, 0.4}, {0.2, 0.5}, {0.45, 0.55}};
    for (double delta : kDeltas) {
        const Dimension d(delta);
        for (auto [s, r] : quad_pairs) {
            worst = std::max(worst, rel(kernels::two_point(d, s, r), oracles::two_point_quadrature(d, s, r).value));
            ++quad_cells;
        }
    }
    const std::vector<std::pair<double, double>> mc_pairs = {{0.25, 0.75}, {0.3, 0.6}, {0.45, 0.55}};
    const std::vector<double> grid = {0.25, 0.3, 0.45, 0.55, 0.6, 0.75};
    int within = 0;
    double worst_z = 0.0;
    for (int k : {1, 2, 3}) {
        const oracles::PathEnsemble e = oracles::mc_bridge(k, grid, 200000, 1000 + k);
        for (auto [s, r] : mc_pairs) {
            const oracles::McEstimate m = oracles::mc_two_point(e, s, r);
            const double z = std::abs(m.mean - kernels::two_point(Dimension(k), s, r)) / m.std_error;
            within += z <= 3.0 ? 1 : 0;
            worst_z = std::max(worst_z, z);
        }
    }
    out.passed = worst <= 1e-6 && within >= 8;
    out.summary = "quadrature " + std::to_string(quad_cells) + " cells worst " + sci(worst) +
                  " <= 1e-06; Monte Carlo " + std::to_string(within) + "/9 within 3 std errors (max |z| " +
                  sci(worst_z) + ", n = 2e5)";
    return out;
}

Outcome chain() {
    double worst = 0.0;
    std::size_t cells = 0, ok = 0;
    for (double delta : kDeltas) {
        for (auto [s, r] : {std::pair{0.3, 0.6}, std::pair{0.7, 0.4}}) {
            const auto rep = verifier::verify_chain(Dimension(delta), s, r);
            worst = std::max(worst, rep.rel_residual);
            ok += rep.passed ? 1 : 0;
            ++cells;
        }
    }
    return {ok == cells, std::to_string(ok) + "/" + std::to_string(cells) + " cells, worst relative " + sci(worst) +
                             " <= 1e-06",
            {}};
}

Outcome derivative_limits() {
    Outcome out;
    std::size_t cells = 0, jump_ok = 0, near_ok = 0;
    std::map<double, double> worst_by_delta;
    for (double delta : {0.5, 1.0, 1.5, 2.5, 4.0}) {
        const Dimension d(delta);
        for (int i = 1; i <= 9; ++i) {
            const double s = i / 10.0;
            const auto rep = verifier::verify_jump(d, s);
            ++cells;
            jump_ok += rep.passed ? 1 : 0;
            const double dev = std::max(rep.diagnostics.at(4).value, rep.diagnostics.at(5).value);
            near_ok += dev <= 5e-4 ? 1 : 0;
            worst_by_delta[delta] = std::max(worst_by_delta[delta], dev);
        }
    }
    out.passed = jump_ok == cells && near_ok == cells;
    out.summary = "jump = -1 in " + std::to_string(jump_ok) + "/" + std::to_string(cells) +
                  " cells; derivatives at s +- 1e-6 within 5e-04 of the limits in " + std::to_string(near_ok) + "/" +
                  std::to_string(cells);
    std::ostringstream worst;
    worst << "worst |dr(s +- 1e-6) - limit| by delta:";
    for (auto [delta, w] : worst_by_delta) {
        worst << " " << delta << ": " << sci(w);
    }
    out.notes.push_back(worst.str());
    if (near_ok != cells) {
        // how far from the diagonal the 5e-4 band is actually reached
        double worst_close = 0.0;
        for (double delta : {0.5, 1.0}) {
            for (int i = 1; i <= 9; ++i) {
                const double s = i / 10.0;
                const auto lim = kernels::derivative_limits(Dimension(delta), s);
                worst_close = std::max(
                    {worst_close,
                     std::abs(kernels::two_point_dr(Dimension(delta), TimePair::offset(s, 1e-14)) - lim.d_plus),
                     std::abs(kernels::two_point_dr(Dimension(delta), TimePair::offset(s, -1e-14)) - lim.d_minus)});
            }
        }
        out.notes.push_back("the derivative approaches its limit like |r - s|^(delta/2), so at distance 1e-6 the gap "
                            "is ~1e-3 for delta = 1 and ~1e-2 for delta = 0.5 (same values at 50 digits); at distance "
                            "1e-14 the worst gap for delta <= 1 is " +
                            sci(worst_close));
    }
    return out;
}

Outcome ibpf() {
    verifier::SweepConfig cfg;
    cfg.claims = {"ibpf"};
    const verifier::SweepResult res = verifier::sweep(cfg);
    double worst = 0.0;
    Outcome out;
    for (const auto& rep : res.reports) {
        worst = std::max(worst, std::isnan(rep.rel_residual) ? INFINITY : rep.rel_residual);
        if (!rep.passed) {
            out.notes.push_back("failed: delta " + std::to_string(rep.cell.delta) + " phi " + rep.cell.phi + " h " +
                                rep.cell.h + " " + rep.error);
        }
    }
    out.passed = res.failed == 0 && res.reports.size() == 36;
    out.summary = std::to_string(res.passed) + "/" + std::to_string(res.reports.size()) +
                  " (delta, phi, h) cells, worst relative " + sci(worst) + " <= 1e-04";
    return out;
}

Outcome vanishing() {
    std::size_t cells = 0, ok = 0;
    double worst = 0.0;
    bool structural = true;
    for (double delta : kDeltas) {
        for (auto [s, r] : {std::pair{0.3, 0.6}, std::pair{0.7, 0.4}, std::pair{0.2, 0.7}, std::pair{0.5, 0.53}}) {
            const auto rep = verifier::verify_vanishing_derivative(Dimension(delta), s, r);
            structural = structural && rep.diagnostics.at(0).value == 0.0;
            worst = std::max(worst, std::abs(rep.diagnostics.at(1).value));
            ok += rep.passed ? 1 : 0;
            ++cells;
        }
    }
    return {ok == cells && structural,
            std::string("structural d/db at 0 ") + (structural ? "exactly 0" : "NONZERO") + "; fitted linear " +
                "coefficient worst " + sci(worst) + " <= 1e-06 in " + std::to_string(ok) + "/" +
                std::to_string(cells) + " cells",
            {}};
}

Outcome regularity() {
    std::size_t cells = 0, ok = 0;
    double worst = 0.0, toggle = 0.0;
    for (auto [s, r] : {std::pair{0.3, 0.6}, std::pair{0.7, 0.4}, std::pair{0.2, 0.7}}) {
        const auto rep = verifier::verify_regularity(s, r);
        worst = std::max(worst, rep.rel_residual);
        for (const auto& dg : rep.diagnostics) {
            if (dg.label == "order-one toggle change") {
                toggle = std::max(toggle, dg.value);
            }
        }
        ok += rep.passed ? 1 : 0;
        ++cells;
    }
    return {ok == cells && toggle == 0.0,
            "drift at 2 +- 1e-3 vs delta = 2 closed form worst " + sci(worst) + " <= 1e-05 in " + std::to_string(ok) +
                "/" + std::to_string(cells) + " cells; order-one toggle change " + sci(toggle) +
                " at delta in {1.5, 1.999, 2.001, 2.5}",
            {}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); }

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("bbridge_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "sweep.json");
        cfg << R"({"deltas": [0.5, 3.0], "s_values": [0.5], "pairs": [[0.3, 0.6]], "phis": ["sin"],)"
            << R"( "hs": ["bump:0.2,0.8"]})";
    }
    const std::string cli = BBRIDGE_CLI_PATH;
    const std::string d = dir.string();
    Outcome out;
    int status = 0;
    status |= run(cli + " --no-timestamp --threads 1 --output " + d + "/sweep1.json sweep --config " + d + "/sweep.json");
    status |= run(cli + " --no-timestamp --threads 4 --output " + d + "/sweep2.json sweep --config " + d + "/sweep.json");
    status |= run(cli + " --no-timestamp --format csv --output " + d + "/sweep3.csv sweep --config " + d + "/sweep.json");
    status |= run(cli + " --no-timestamp --format csv --output " + d + "/sweep4.csv sweep --config " + d + "/sweep.json");
    const std::string mc = " mc --delta-int 3 --paths 20000 --grid 0.1,0.3,0.6,0.9 --seed 77";
    status |= run(cli + " --no-timestamp --threads 1 --output " + d + "/mc1.json" + mc + " --ensemble " + d + "/e1.bin");
    status |= run(cli + " --no-timestamp --threads 3 --output " + d + "/mc2.json" + mc + " --ensemble " + d + "/e2.bin");
    status |= run(cli + " --no-timestamp --output " + d + "/mc3.json" + mc + " --ensemble " + d + "/e3.csv");
    status |= run(cli + " --no-timestamp --output " + d + "/mc4.json" + mc + " --ensemble " + d + "/e4.csv");

    auto same = [&](const char* a, const char* b) {
        const std::string x = slurp(dir / a), y = slurp(dir / b);
        return !x.empty() && x == y;
    };
    auto same_summary = [&](const char* a, const char* b) {
        // the summaries name their own ensemble file; compare everything else
        auto strip = [](std::string text) {
            std::string out;
            std::istringstream in(text);
            for (std::string line; std::getline(in, line);) {
                if (line.find("ensemble_file") == std::string::npos) {
                    out += line + '\n';
                }
            }
            return out;
        };
        const std::string x = strip(slurp(dir / a)), y = strip(slurp(dir / b));
        return !x.empty() && x == y;
    };
    const bool sweeps = same("sweep1.json", "sweep2.json") && same("sweep3.csv", "sweep4.csv");
    const bool ensembles = same("e1.bin", "e2.bin") && same("e3.csv", "e4.csv");
    const bool summaries = same_summary("mc1.json", "mc2.json") && same_summary("mc3.json", "mc4.json") &&
                           same_summary("mc1.json", "mc3.json");
    out.passed = status == 0 && sweeps && ensembles && summaries;
    out.summary = std::string("sweep reports ") + (sweeps ? "identical" : "DIFFER") + ", mc ensembles " +
                  (ensembles ? "identical" : "DIFFER") + ", mc summaries " + (summaries ? "identical" : "DIFFER") +
                  " across reruns and thread counts" + (status == 0 ? "" : "; a command exited nonzero");
    std::error_code ec;
    fs::remove_all(dir, ec);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria for the Bessel-bridge integration-by-parts artifact"};
    std::vector<int> selected;
    app.add_option("--criterion", selected, "Criterion number 1-10 (repeatable)")->check(CLI::Range(1, 10));
    bool verbose = false;
    app.add_flag("--verbose", verbose, "Print notes for passing criteria too");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = {
        {1, "contiguous relation", 10, contiguous},
        {2, "asymptotics near z = 1", 5, asymptotics},
        {3, "Sigma series vs quadrature", 60, sigma_grid},
        {4, "two-point function vs quadrature and Monte Carlo", 300, two_point_oracles},
        {5, "second derivative as renormalized pairing", 30, chain},
        {6, "derivative limits and unit jump", 10, derivative_limits},
        {7, "integration by parts formula", 300, ibpf},
        {8, "vanishing derivative at b = 0", 60, vanishing},
        {9, "regularity across delta = 2", 60, regularity},
        {10, "determinism of sweep and mc", 120, determinism},
    };

    bool ok = true;
    for (const Criterion& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o.passed = false;
            o.summary = std::string("threw: ") + ex.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool passed = o.passed && in_time;
        std::ostringstream time;
        time.precision(2);
        time << std::fixed << secs << " s";
        std::cout << "[" << (passed ? "PASS" : "FAIL") << "] criterion " << c.id << " " << c.title << ": "
                  << o.summary << " (" << time.str() << (in_time ? "" : ", over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget") << ")\n";
        if (!passed || verbose) {
            for (const std::string& note : o.notes) {
                std::cout << "       " << note << '\n';
            }
        }
        std::cout.flush();
        ok = ok && passed;
    }
    return ok ? 0 : 1;
}
