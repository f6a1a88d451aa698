#pragma once

// Independent ground truth for the closed forms: quadrature of the explicit
// bridge densities, and exact-grid Monte Carlo of integer-dimension bridges
// realized as the norm of independent Brownian bridges.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bbridge/bridge_kernels.hpp"
#include "bbridge/quadrature.hpp"

namespace bbridge::oracles {

/// Sigma_r(X_s | b) as int a p_s(0,a) p_{r-s}(a,b) da * end_ratio(r,b) / b^(delta-1)
/// for s < r; s > r goes through time reversal t -> 1 - t. Needs b > 0.
QuadResult sigma_quadrature(const kernels::Dimension& d, const kernels::TimePair& t, double b,
                            const QuadratureConfig& cfg = {});

/// E[X_s X_r] as the iterated integral of a b joint_density(a, b), inner
/// over b split at b = a. Symmetric in (s, r); the diagonal is rejected.
QuadResult two_point_quadrature(const kernels::Dimension& d, double s, double r,
                                const QuadratureConfig& cfg = {});

/// Samples of X on a grid, row-major: values[path * grid.size() + j].
struct PathEnsemble {
    int delta_int = 0;
    std::vector<double> grid;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;

    double at(std::size_t path, std::size_t j) const { return values[path * grid.size() + j]; }
    /// Position of t in the grid (exact match); throws DomainError otherwise.
    std::size_t index_of(double t) const;
};

struct McOptions {
    /// Worker threads; <= 0 reads BBRIDGE_THREADS, then hardware concurrency.
    int threads = 0;
};

/// Thread count used when McOptions::threads <= 0.
int default_thread_count();

/// n_paths bridges of dimension delta_int sampled exactly at the grid times.
/// Path i draws from its own generator seeded from (seed, i), so the ensemble
/// does not depend on the number of threads.
PathEnsemble mc_bridge(int delta_int, std::vector<double> grid, std::size_t n_paths, std::uint64_t seed,
                       const McOptions& opt = {});

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean of X_s X_r and its standard error; s == r gives X_s^2.
McEstimate mc_two_point(const PathEnsemble& e, double s, double r);

/// Sample mean of X_t.
McEstimate mc_mean(const PathEnsemble& e, double t);

/// CSV: header "path,<t_0>,<t_1>,..." then one row per path; values in
/// shortest round-trip form.
void write_csv(const PathEnsemble& e, std::ostream& out);
PathEnsemble read_csv(std::istream& in, int delta_int = 0, std::uint64_t seed = 0);

/// Flat binary in host byte order: magic "BBENS1\0\0", delta (int64), seed,
/// n_grid, n_paths (uint64), grid, values (double).
void write_binary(const PathEnsemble& e, std::ostream& out);
PathEnsemble read_binary(std::istream& in);

}  // namespace bbridge::oracles
