#include "bbridge/oracles.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "bbridge/error.hpp"

namespace bbridge::oracles {

using kernels::Dimension;
using kernels::TimePair;

namespace {

QuadResult add(QuadResult a, const QuadResult& b) {
    a.value += b.value;
    a.err_est += b.err_est;
    a.evaluations += b.evaluations;
    return a;
}

void check_time(double t, const char* what) {
    if (!(t > 0.0 && t < 1.0)) {
        throw DomainError(std::string("oracle: ") + what + " must lie in (0, 1)");
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t seed, std::size_t path) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(path)));
}

void sample_path(const PathEnsemble& e, std::size_t path, double* row) {
    std::mt19937_64 gen(path_seed(e.seed, path));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = e.grid.size();
    std::vector<double> sq(n, 0.0);
    for (int i = 0; i < e.delta_int; ++i) {
        // sequential exact bridge: B(t_j) | B(t_{j-1}) is Gaussian
        double prev_t = 0.0;
        double prev_x = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = e.grid[j];
            const double keep = (1.0 - t) / (1.0 - prev_t);
            const double var = (t - prev_t) * keep;
            const double x = prev_x * keep + std::sqrt(var) * normal(gen);
            sq[j] += x * x;
            prev_t = t;
            prev_x = x;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = std::sqrt(sq[j]);
    }
}

std::string shortest(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DomainError("read_csv: bad number '" + s + "'");
    }
    return x;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        out.push_back(cell);
    }
    return out;
}

constexpr char kMagic[8] = {'B', 'B', 'E', 'N', 'S', '1', '\0', '\0'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw DomainError("read_binary: truncated input");
    }
    return v;
}

}  // namespace

QuadResult sigma_quadrature(const Dimension& d, const TimePair& t, double b, const QuadratureConfig& cfg) {
    check_time(t.s, "s");
    check_time(t.r, "r");
    if (t.gap == 0.0) {
        throw DomainError("sigma_quadrature: s and r must differ");
    }
    if (!(b > 0.0) || std::isinf(b)) {
        throw DomainError("sigma_quadrature: b must be positive and finite");
    }
    // reversed times keep the gap exact
    const bool forward = t.gap > 0.0;
    const double s = forward ? t.s : 1.0 - t.s;
    const double r = forward ? t.r : 1.0 - t.r;
    const double gap = std::abs(t.gap);
    auto f = [&](double a) {
        if (!(a > 0.0)) {
            return 0.0;
        }
        return a * kernels::transition_density(d, s, 0.0, a) * kernels::transition_density(d, gap, a, b);
    };
    QuadResult q = add(integrate_1d(f, 0.0, b, cfg), integrate_1d(f, b, kInfinity, cfg));
    const double scale = kernels::end_ratio(d, r, b) / std::pow(b, d.delta() - 1.0);
    q.value *= scale;
    q.err_est *= scale;
    return q;
}

QuadResult two_point_quadrature(const Dimension& d, double s, double r, const QuadratureConfig& cfg) {
    check_time(s, "s");
    check_time(r, "r");
    if (s == r) {
        throw DomainError("two_point_quadrature: s and r must differ");
    }
    if (s > r) {
        std::swap(s, r);
    }
    QuadratureConfig inner = cfg;
    inner.rel_tol = cfg.rel_tol / 10.0;
    inner.abs_tol = cfg.abs_tol / 10.0;
    int evaluations = 0;
    auto outer = [&](double a) {
        if (!(a > 0.0)) {
            return 0.0;
        }
        auto g = [&](double b) {
            if (!(b > 0.0)) {
                return 0.0;
            }
            return b * kernels::transition_density(d, r - s, a, b) * kernels::end_ratio(d, r, b);
        };
        const QuadResult q = add(integrate_1d(g, 0.0, a, inner), integrate_1d(g, a, kInfinity, inner));
        evaluations += q.evaluations;
        return a * kernels::transition_density(d, s, 0.0, a) * q.value;
    };
    QuadResult q = integrate_1d(outer, 0.0, kInfinity, cfg);
    q.evaluations += evaluations;
    return q;
}

std::size_t PathEnsemble::index_of(double t) const {
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (std::abs(grid[j] - t) <= 1e-12) {
            return j;
        }
    }
    throw DomainError("PathEnsemble: time " + shortest(t) + " is not on the grid");
}

int default_thread_count() {
    if (const char* env = std::getenv("BBRIDGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

PathEnsemble mc_bridge(int delta_int, std::vector<double> grid, std::size_t n_paths, std::uint64_t seed,
                       const McOptions& opt) {
    if (delta_int < 1) {
        throw DomainError("mc_bridge: dimension must be a positive integer");
    }
    if (grid.empty()) {
        throw DomainError("mc_bridge: empty grid");
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!(grid[j] > 0.0 && grid[j] < 1.0) || (j > 0 && !(grid[j] > grid[j - 1]))) {
            throw DomainError("mc_bridge: grid must be strictly increasing inside (0, 1)");
        }
    }
    PathEnsemble e;
    e.delta_int = delta_int;
    e.grid = std::move(grid);
    e.n_paths = n_paths;
    e.seed = seed;
    e.values.assign(n_paths * e.grid.size(), 0.0);

    const int threads = opt.threads > 0 ? opt.threads : default_thread_count();
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n_paths));
    const std::size_t n = e.grid.size();
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            sample_path(e, p, e.values.data() + p * n);
        }
    };
    if (workers == 1) {
        work(0, n_paths);
        return e;
    }
    std::vector<std::thread> pool;
    const std::size_t block = (n_paths + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(n_paths, begin + block);
        if (begin < end) {
            pool.emplace_back(work, begin, end);
        }
    }
    for (auto& th : pool) {
        th.join();
    }
    return e;
}

McEstimate mc_two_point(const PathEnsemble& e, double s, double r) {
    const std::size_t i = e.index_of(s);
    const std::size_t j = e.index_of(r);
    if (e.n_paths < 2) {
        throw DomainError("mc_two_point: need at least two paths");
    }
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        const double x = e.at(p, i) * e.at(p, j);
        const double delta = x - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (x - mean);
    }
    const double n = static_cast<double>(e.n_paths);
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

McEstimate mc_mean(const PathEnsemble& e, double t) {
    const std::size_t i = e.index_of(t);
    if (e.n_paths < 2) {
        throw DomainError("mc_mean: need at least two paths");
    }
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        const double x = e.at(p, i);
        const double delta = x - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (x - mean);
    }
    const double n = static_cast<double>(e.n_paths);
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

void write_csv(const PathEnsemble& e, std::ostream& out) {
    out << "path";
    for (double t : e.grid) {
        out << ',' << shortest(t);
    }
    out << '\n';
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        out << p;
        for (std::size_t j = 0; j < e.grid.size(); ++j) {
            out << ',' << shortest(e.at(p, j));
        }
        out << '\n';
    }
}

PathEnsemble read_csv(std::istream& in, int delta_int, std::uint64_t seed) {
    PathEnsemble e;
    e.delta_int = delta_int;
    e.seed = seed;
    std::string line;
    if (!std::getline(in, line)) {
        throw DomainError("read_csv: missing header");
    }
    const auto header = split_commas(line);
    if (header.empty() || header[0] != "path") {
        throw DomainError("read_csv: header must start with 'path'");
    }
    for (std::size_t j = 1; j < header.size(); ++j) {
        e.grid.push_back(parse_double(header[j]));
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            throw DomainError("read_csv: row width differs from header");
        }
        for (std::size_t j = 1; j < cells.size(); ++j) {
            e.values.push_back(parse_double(cells[j]));
        }
        ++e.n_paths;
    }
    return e;
}

void write_binary(const PathEnsemble& e, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    put<std::int64_t>(out, e.delta_int);
    put<std::uint64_t>(out, e.seed);
    put<std::uint64_t>(out, e.grid.size());
    put<std::uint64_t>(out, e.n_paths);
    out.write(reinterpret_cast<const char*>(e.grid.data()),
              static_cast<std::streamsize>(e.grid.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(e.values.data()),
              static_cast<std::streamsize>(e.values.size() * sizeof(double)));
}

PathEnsemble read_binary(std::istream& in) {
    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DomainError("read_binary: not an ensemble file");
    }
    PathEnsemble e;
    e.delta_int = static_cast<int>(get<std::int64_t>(in));
    e.seed = get<std::uint64_t>(in);
    const auto n_grid = get<std::uint64_t>(in);
    e.n_paths = get<std::uint64_t>(in);
    e.grid.resize(n_grid);
    e.values.resize(n_grid * e.n_paths);
    if (!in.read(reinterpret_cast<char*>(e.grid.data()), static_cast<std::streamsize>(n_grid * sizeof(double))) ||
        !in.read(reinterpret_cast<char*>(e.values.data()),
                 static_cast<std::streamsize>(e.values.size() * sizeof(double)))) {
        throw DomainError("read_binary: truncated input");
    }
    return e;
}

}  // namespace bbridge::oracles
