// bbridge: command-line front end for the Bessel-bridge checks.
//
//   bbridge check-specfun [--quick] [--rel-tol x]
//   bbridge verify --claim c --delta d --s s [--r r] [--phi key] [--h key]
//   bbridge sweep [--config file.json]
//   bbridge tabulate --delta d --grid n
//   bbridge mc --delta-int k --paths n --grid t1,t2,... [--seed s] [--ensemble file]
//
// Global: --format json|csv, --output file, --no-timestamp, --threads n.
// Exit status: 0 all checks passed, 1 a check failed, 2 bad input, 3 runtime error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbridge/bridge_kernels.hpp"
#include "bbridge/checks.hpp"
#include "bbridge/error.hpp"
#include "bbridge/oracles.hpp"
#include "bbridge/verifier.hpp"
#include "report_io.hpp"

using json = nlohmann::ordered_json;
using namespace bbridge;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Global {
    std::string format;
    std::string output;
    bool no_timestamp = false;
    int threads = 0;

    io::WriteOptions write() const { return {no_timestamp}; }
    std::string format_or(const std::string& fallback) const { return format.empty() ? fallback : format; }
};

void emit(const Global& g, const std::string& text) {
    if (g.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(g.output, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + g.output);
    }
    out << text;
}

void stamp(json& j, const Global& g) {
    if (!g.no_timestamp) {
        j["generated_at"] = io::utc_timestamp();
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// open interval (0, 1)
const CLI::Validator kUnitTime(
    [](const std::string& text) -> std::string {
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(text, &used);
            if (used != text.size()) {
                return "not a number: " + text;
            }
        } catch (const std::exception&) {
            return "not a number: " + text;
        }
        return v > 0.0 && v < 1.0 ? std::string() : "time must lie strictly inside (0, 1)";
    },
    "TIME in (0,1)");

// ---------------------------------------------------------------------------

struct CheckSpecfunArgs {
    bool quick = false;
    double rel_tol = 1e-14;
};

int cmd_check_specfun(const Global& g, const CheckSpecfunArgs& a) {
    checks::SpecfunBatteryOptions opt;
    opt.quick = a.quick;
    opt.series_rel_tol = a.rel_tol;
    const checks::CheckSummary s = checks::specfun_battery(opt);

    std::ostringstream table;
    table << std::left << std::setw(12) << "group" << std::right << std::setw(7) << "cells" << std::setw(8)
          << "failed" << std::setw(16) << "worst residual" << std::setw(12) << "tolerance" << '\n';
    for (const char* name : {"contiguous", "binomial", "connection", "recursion", "asymptotic"}) {
        const auto cells = s.group(name);
        std::size_t failed = 0;
        double worst = 0.0;
        for (const auto& c : cells) {
            failed += c.passed ? 0 : 1;
            worst = std::isnan(c.residual) || std::isnan(worst) ? NAN : std::max(worst, c.residual);
        }
        std::ostringstream w;
        w << std::scientific << std::setprecision(2) << worst;
        std::ostringstream tol;
        tol << std::scientific << std::setprecision(0) << (cells.empty() ? 0.0 : cells.front().tolerance);
        table << std::left << std::setw(12) << name << std::right << std::setw(7) << cells.size() << std::setw(8)
              << failed << std::setw(16) << w.str() << std::setw(12) << tol.str() << '\n';
    }
    int shown = 0;
    for (const auto& c : s.cells) {
        if (!c.passed && shown++ < 10) {
            table << "FAIL " << c.group << " [" << c.label << "] residual " << c.residual;
            if (!c.error.empty()) {
                table << ": " << c.error;
            }
            table << '\n';
        }
    }
    if (s.failed > static_cast<std::size_t>(shown)) {
        table << "... " << s.failed - shown << " more failing cells\n";
    }
    table << "specfun battery: " << (s.all_passed() ? "PASS" : "FAIL") << " (" << s.passed << " passed, "
          << s.failed << " failed)\n";
    std::cout << table.str();

    if (!g.output.empty()) {
        if (g.format_or("json") == "csv") {
            std::ostringstream out;
            io::write_check_cells_csv(s, out);
            emit(g, out.str());
        } else {
            json j = io::check_summary_json(s, g.write());
            stamp(j, g);
            emit(g, dump(j));
        }
    }
    return s.all_passed() ? 0 : kExitFailed;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string claim;
    double delta = 0.0;
    double s = 0.0;
    double r = -1.0;
    std::string phi = "1";
    std::string h = "bump:0.2,0.8";
};

int cmd_verify(const Global& g, const VerifyArgs& a) {
    const bool needs_r = a.claim == "vanishing" || a.claim == "chain" || a.claim == "regularity";
    const bool needs_s = a.claim != "ibpf";
    if (needs_s && a.s <= 0.0) {
        throw UsageError("--s is required for claim " + a.claim);
    }
    if (needs_r && a.r < 0.0) {
        throw UsageError("--r is required for claim " + a.claim);
    }
    if (needs_r && a.r == a.s) {
        throw UsageError("--r must differ from --s");
    }
    if (a.claim != "regularity" && a.claim != "jump" && a.claim != "vanishing" && std::abs(a.delta - 2.0) < 1e-6) {
        throw UsageError("delta within 1e-6 of 2: use --claim regularity");
    }
    if (a.claim != "regularity" && a.delta == 0.0) {
        throw UsageError("--delta is required for claim " + a.claim);
    }
    // registry keys are input too
    verifier::parse_phi(a.phi);
    verifier::parse_h(a.h);

    verifier::CellSpec cell{a.claim, a.claim == "regularity" ? 2.0 : a.delta, needs_s ? a.s : 0.0,
                            needs_r ? a.r : 0.0, a.claim == "ibpf" ? a.phi : "",
                            a.claim == "ibpf" || a.claim == "identity" ? a.h : ""};
    const verifier::VerificationReport rep = verifier::run_cell(cell);

    if (g.format_or("json") == "csv") {
        std::ostringstream out;
        io::write_reports_csv({rep}, out, g.write());
        emit(g, out.str());
    } else {
        json j = io::report_json(rep, g.write());
        stamp(j, g);
        emit(g, dump(j));
    }
    if (!g.output.empty()) {
        std::cout << rep.cell.claim << ": " << (rep.passed ? "PASS" : "FAIL") << " residual " << rep.rel_residual
                  << " (tolerance " << rep.tolerance << ")\n";
    }
    return rep.passed ? 0 : kExitFailed;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const Global& g, const std::string& config_path) {
    verifier::SweepConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            throw UsageError("cannot read config " + config_path);
        }
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& ex) {
            throw UsageError(std::string("config parse error: ") + ex.what());
        }
        cfg = io::parse_sweep_config(j);
    }
    if (g.threads > 0) {
        cfg.threads = g.threads;
    }
    const verifier::SweepResult res = verifier::sweep(cfg);

    if (g.format_or("json") == "csv") {
        std::ostringstream out;
        io::write_reports_csv(res.reports, out, g.write());
        emit(g, out.str());
    } else {
        json reports = json::array();
        for (const auto& rep : res.reports) {
            reports.push_back(io::report_json(rep, g.write()));
        }
        json j = {{"claim_id", "sweep"},
                  {"config", io::sweep_config_json(cfg)},
                  {"cells", res.reports.size()},
                  {"passed_cells", res.passed},
                  {"failed_cells", res.failed},
                  {"passed", res.failed == 0},
                  {"reports", reports}};
        stamp(j, g);
        emit(g, dump(j));
    }
    if (!g.output.empty()) {
        std::cout << "sweep: " << res.reports.size() << " cells, " << res.passed << " passed, " << res.failed
                  << " failed\n";
        for (const auto& rep : res.reports) {
            if (!rep.passed) {
                std::cout << "FAIL " << rep.cell.claim << " delta=" << rep.cell.delta << " s=" << rep.cell.s
                          << " r=" << rep.cell.r << " phi=" << rep.cell.phi << " h=" << rep.cell.h << " residual "
                          << rep.rel_residual << (rep.error.empty() ? "" : " " + rep.error) << '\n';
            }
        }
    }
    return res.failed == 0 ? 0 : kExitFailed;
}

// ---------------------------------------------------------------------------

int cmd_tabulate(const Global& g, double delta, int n) {
    const auto rows = io::tabulate_two_point(delta, n);
    if (g.format_or("csv") == "json") {
        json data = json::array();
        for (const auto& row : rows) {
            data.push_back({row.s, row.r, row.value});
        }
        json j = {{"delta", delta}, {"grid", n}, {"columns", {"s", "r", "two_point"}}, {"rows", data}};
        stamp(j, g);
        emit(g, dump(j));
    } else {
        std::ostringstream out;
        io::write_table_csv(rows, out);
        emit(g, out.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct McArgs {
    int delta_int = 0;
    std::size_t paths = 0;
    std::string grid;
    std::uint64_t seed = 1;
    std::string ensemble;
};

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
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
        if (used == 0 || used != cell.size()) {
            throw UsageError("bad grid time '" + cell + "'");
        }
        grid.push_back(v);
    }
    if (grid.empty()) {
        throw UsageError("--grid needs at least one time");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] < 1.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw UsageError("--grid must be increasing times inside (0, 1)");
        }
    }
    return grid;
}

int cmd_mc(const Global& g, const McArgs& a) {
    const std::vector<double> grid = parse_grid(a.grid);
    oracles::McOptions opt;
    opt.threads = g.threads;
    const oracles::PathEnsemble e = oracles::mc_bridge(a.delta_int, grid, a.paths, a.seed, opt);

    if (!a.ensemble.empty()) {
        std::ofstream out(a.ensemble, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + a.ensemble);
        }
        const bool csv = a.ensemble.size() >= 4 && a.ensemble.compare(a.ensemble.size() - 4, 4, ".csv") == 0;
        csv ? oracles::write_csv(e, out) : oracles::write_binary(e, out);
    }

    const kernels::Dimension d(a.delta_int);
    struct Row {
        std::string kind;
        double s, r;
        oracles::McEstimate est;
        double exact;
    };
    std::vector<Row> rows;
    for (double t : grid) {
        rows.push_back({"mean", t, t, oracles::mc_mean(e, t), NAN});
        rows.push_back({"second_moment", t, t, oracles::mc_two_point(e, t, t), kernels::two_point(d, t, t)});
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        rows.push_back(
            {"two_point", grid[i], grid[i + 1], oracles::mc_two_point(e, grid[i], grid[i + 1]),
             kernels::two_point(d, grid[i], grid[i + 1])});
    }
    auto zscore = [](const Row& row) {
        return std::isnan(row.exact) ? NAN : (row.est.mean - row.exact) / row.est.std_error;
    };

    if (g.format_or("json") == "csv") {
        std::ostringstream out;
        out << "kind,s,r,mc_mean,std_error,exact,z\n";
        for (const Row& row : rows) {
            out << row.kind << ',' << io::format_double(row.s) << ',' << io::format_double(row.r) << ','
                << io::format_double(row.est.mean) << ',' << io::format_double(row.est.std_error) << ','
                << io::format_double(row.exact) << ',' << io::format_double(zscore(row)) << '\n';
        }
        emit(g, out.str());
    } else {
        json stats = json::array();
        for (const Row& row : rows) {
            json item = {{"kind", row.kind}, {"s", row.s}, {"r", row.r}, {"mc_mean", row.est.mean},
                         {"std_error", row.est.std_error}};
            if (!std::isnan(row.exact)) {
                item["exact"] = row.exact;
                item["z"] = zscore(row);
                item["within_3_std_errors"] = std::abs(zscore(row)) <= 3.0;
            }
            stats.push_back(item);
        }
        json j = {{"claim_id", "mc"},
                  {"params", {{"delta_int", a.delta_int}, {"paths", a.paths}, {"seed", a.seed}, {"grid", grid}}},
                  {"statistics", stats}};
        if (!a.ensemble.empty()) {
            j["ensemble_file"] = a.ensemble;
        }
        stamp(j, g);
        emit(g, dump(j));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integration-by-parts checks for Bessel bridges"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", g.output, "Write the report here instead of stdout");
    app.add_flag("--no-timestamp", g.no_timestamp, "Leave out generated_at and runtime_ms");
    app.add_option("--threads", g.threads, "Worker threads (default: BBRIDGE_THREADS, then all cores)")
        ->check(CLI::NonNegativeNumber);

    CheckSpecfunArgs cs;
    auto* check = app.add_subcommand("check-specfun", "Special-function self-test battery");
    check->add_flag("--quick", cs.quick, "Reduced battery");
    check->add_option("--rel-tol", cs.rel_tol, "Series stop tolerance")->check(CLI::PositiveNumber);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run one verification");
    verify->add_option("--claim", va.claim, "identity | ibpf | vanishing | jump | chain | regularity")
        ->required()
        ->check(CLI::IsMember({"identity", "ibpf", "vanishing", "jump", "chain", "regularity"}));
    verify->add_option("--delta", va.delta, "Bessel dimension")->check(CLI::PositiveNumber);
    verify->add_option("--s", va.s, "First time")->check(kUnitTime);
    verify->add_option("--r", va.r, "Second time")->check(kUnitTime);
    verify->add_option("--phi", va.phi, "phi key: 1, 0, const:c, poly:c0,c1,..., sin, sin:k");
    verify->add_option("--h", va.h, "h key: bump:a,b[,scale], joined with +");

    std::string config_path;
    auto* sweep = app.add_subcommand("sweep", "Run the verification battery");
    sweep->add_option("--config", config_path, "JSON battery description");

    double tab_delta = 0.0;
    int tab_grid = 0;
    auto* tab = app.add_subcommand("tabulate", "E[X_s X_r] on an n x n grid");
    tab->add_option("--delta", tab_delta, "Bessel dimension")->required()->check(CLI::PositiveNumber);
    tab->add_option("--grid", tab_grid, "Grid size n")->required()->check(CLI::Range(1, 2000));

    McArgs ma;
    auto* mc = app.add_subcommand("mc", "Sample integer-dimension bridges");
    mc->add_option("--delta-int", ma.delta_int, "Integer dimension")->required()->check(CLI::Range(1, 1000));
    mc->add_option("--paths", ma.paths, "Number of paths")->required()->check(CLI::Range(1ul, 100000000ul));
    mc->add_option("--grid", ma.grid, "Comma-separated increasing times in (0, 1)")->required();
    mc->add_option("--seed", ma.seed, "64-bit seed");
    mc->add_option("--ensemble", ma.ensemble, "Write the paths here (.csv for CSV, binary otherwise)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*check) {
            return cmd_check_specfun(g, cs);
        }
        if (*verify) {
            return cmd_verify(g, va);
        }
        if (*sweep) {
            return cmd_sweep(g, config_path);
        }
        if (*tab) {
            return cmd_tabulate(g, tab_delta, tab_grid);
        }
        if (*mc) {
            return cmd_mc(g, ma);
        }
    } catch (const UsageError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
