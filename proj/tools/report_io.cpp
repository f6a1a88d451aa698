#include "report_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bbridge/bridge_kernels.hpp"

namespace bbridge::io {

using json = nlohmann::ordered_json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("sweep config: wrong type for '") + key + "'");
    }
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("bad number '" + text + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json report_json(const verifier::VerificationReport& rep, const WriteOptions& opt) {
    const verifier::CellSpec& c = rep.cell;
    json params = {{"delta", c.delta}};
    if (c.claim == "identity" || c.claim == "jump" || c.claim == "vanishing" || c.claim == "chain" ||
        c.claim == "regularity") {
        params["s"] = c.s;
    }
    if (c.claim == "vanishing" || c.claim == "chain" || c.claim == "regularity") {
        params["r"] = c.r;
    }
    if (c.claim == "ibpf") {
        params["phi"] = c.phi;
    }
    if (c.claim == "identity" || c.claim == "ibpf") {
        params["h"] = c.h;
    }
    json j = {{"claim_id", c.claim},
              {"params", params},
              {"lhs", number(rep.lhs)},
              {"rhs", number(rep.rhs)},
              {"abs_residual", number(rep.abs_residual)},
              {"rel_residual", number(rep.rel_residual)},
              {"tolerance", rep.tolerance},
              {"metric", verifier::metric_name(rep.metric)},
              {"passed", rep.passed}};
    if (!opt.no_timestamp) {
        j["runtime_ms"] = rep.runtime_ms;
    }
    json diags = json::array();
    for (const verifier::Diagnostic& d : rep.diagnostics) {
        diags.push_back({{"label", d.label}, {"point", number(d.point)}, {"value", number(d.value)}});
    }
    j["diagnostics"] = diags;
    if (!rep.error.empty()) {
        j["error"] = rep.error;
    }
    return j;
}

void write_reports_csv(const std::vector<verifier::VerificationReport>& reps, std::ostream& out,
                       const WriteOptions& opt) {
    out << "claim_id,delta,s,r,phi,h,lhs,rhs,abs_residual,rel_residual,tolerance,metric,passed";
    out << (opt.no_timestamp ? "" : ",runtime_ms") << ",error\n";
    for (const verifier::VerificationReport& rep : reps) {
        const verifier::CellSpec& c = rep.cell;
        out << c.claim << ',' << format_double(c.delta) << ',' << format_double(c.s) << ',' << format_double(c.r)
            << ',' << csv_field(c.phi) << ',' << csv_field(c.h) << ',' << format_double(rep.lhs) << ','
            << format_double(rep.rhs) << ',' << format_double(rep.abs_residual) << ','
            << format_double(rep.rel_residual) << ',' << format_double(rep.tolerance) << ','
            << verifier::metric_name(rep.metric) << ',' << (rep.passed ? "true" : "false");
        if (!opt.no_timestamp) {
            out << ',' << format_double(rep.runtime_ms);
        }
        out << ',' << csv_field(rep.error) << '\n';
    }
}

verifier::SweepConfig parse_sweep_config(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("sweep config: expected a JSON object");
    }
    static const std::set<std::string> known = {"deltas", "claims", "s_values", "pairs", "phis", "hs", "threads"};
    verifier::SweepConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw std::invalid_argument("sweep config: unknown key '" + key + "'");
        }
    }
    if (j.contains("deltas")) {
        cfg.deltas = get_as<std::vector<double>>(j.at("deltas"), "deltas");
        for (double d : cfg.deltas) {
            if (!(d > 0.0) || !std::isfinite(d)) {
                throw std::invalid_argument("sweep config: deltas must be positive");
            }
        }
    }
    if (j.contains("claims")) {
        cfg.claims = get_as<std::vector<std::string>>(j.at("claims"), "claims");
    }
    if (j.contains("s_values")) {
        cfg.s_values = get_as<std::vector<double>>(j.at("s_values"), "s_values");
    }
    if (j.contains("pairs")) {
        cfg.pairs.clear();
        for (const auto& p : get_as<std::vector<std::vector<double>>>(j.at("pairs"), "pairs")) {
            if (p.size() != 2) {
                throw std::invalid_argument("sweep config: each pair needs exactly two times");
            }
            cfg.pairs.emplace_back(p[0], p[1]);
        }
    }
    if (j.contains("phis")) {
        cfg.phis = get_as<std::vector<std::string>>(j.at("phis"), "phis");
        for (const std::string& k : cfg.phis) {
            verifier::parse_phi(k);
        }
    }
    if (j.contains("hs")) {
        cfg.hs = get_as<std::vector<std::string>>(j.at("hs"), "hs");
        for (const std::string& k : cfg.hs) {
            verifier::parse_h(k);
        }
    }
    if (j.contains("threads")) {
        cfg.threads = get_as<int>(j.at("threads"), "threads");
    }
    auto in_unit = [](double t) { return t > 0.0 && t < 1.0; };
    for (double s : cfg.s_values) {
        if (!in_unit(s)) {
            throw std::invalid_argument("sweep config: s_values must lie in (0, 1)");
        }
    }
    for (auto [s, r] : cfg.pairs) {
        if (!in_unit(s) || !in_unit(r) || s == r) {
            throw std::invalid_argument("sweep config: pairs need distinct times in (0, 1)");
        }
    }
    verifier::sweep_cells(cfg);  // rejects unknown claims
    return cfg;
}

json sweep_config_json(const verifier::SweepConfig& cfg) {
    json pairs = json::array();
    for (auto [s, r] : cfg.pairs) {
        pairs.push_back({s, r});
    }
    return {{"deltas", cfg.deltas}, {"claims", cfg.claims}, {"s_values", cfg.s_values},
            {"pairs", pairs},       {"phis", cfg.phis},     {"hs", cfg.hs}};
}

json check_summary_json(const checks::CheckSummary& s, const WriteOptions& opt) {
    json cells = json::array();
    for (const checks::CheckCell& c : s.cells) {
        json cell = {{"group", c.group},
                     {"label", c.label},
                     {"value", number(c.value)},
                     {"reference", number(c.reference)},
                     {"residual", number(c.residual)},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed}};
        if (!c.error.empty()) {
            cell["error"] = c.error;
        }
        cells.push_back(cell);
    }
    json j = {{"claim_id", "specfun"},
              {"cells", s.cells.size()},
              {"passed_cells", s.passed},
              {"failed_cells", s.failed},
              {"passed", s.all_passed()},
              {"results", cells}};
    if (!opt.no_timestamp) {
        j["runtime_ms"] = s.runtime_ms;
    }
    return j;
}

void write_check_cells_csv(const checks::CheckSummary& s, std::ostream& out) {
    out << "group,label,value,reference,residual,tolerance,passed,error\n";
    for (const checks::CheckCell& c : s.cells) {
        out << c.group << ',' << csv_field(c.label) << ',' << format_double(c.value) << ','
            << format_double(c.reference) << ',' << format_double(c.residual) << ',' << format_double(c.tolerance)
            << ',' << (c.passed ? "true" : "false") << ',' << csv_field(c.error) << '\n';
    }
}

std::vector<TwoPointRow> tabulate_two_point(double delta, int n) {
    if (n < 1) {
        throw std::invalid_argument("tabulate: grid size must be at least 1");
    }
    const kernels::Dimension d(delta);
    std::vector<TwoPointRow> rows;
    rows.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 1; i <= n; ++i) {
        const double s = static_cast<double>(i) / (n + 1);
        for (int k = 1; k <= n; ++k) {
            const double r = static_cast<double>(k) / (n + 1);
            rows.push_back({s, r, kernels::two_point(d, s, r)});
        }
    }
    return rows;
}

void write_table_csv(const std::vector<TwoPointRow>& rows, std::ostream& out) {
    out << "s,r,two_point\n";
    for (const TwoPointRow& row : rows) {
        out << format_double(row.s) << ',' << format_double(row.r) << ',' << format_double(row.value) << '\n';
    }
}

std::vector<TwoPointRow> read_table_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "s,r,two_point") {
        throw std::invalid_argument("table: missing header");
    }
    std::vector<TwoPointRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string a, b, c, extra;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
            std::getline(ss, extra, ',')) {
            throw std::invalid_argument("table: expected three fields in '" + line + "'");
        }
        rows.push_back({parse_double(a), parse_double(b), parse_double(c)});
    }
    return rows;
}

}  // namespace bbridge::io
