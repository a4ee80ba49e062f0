#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdclt/tail_distributions.hpp"

namespace hdclt {

enum class Normalization { sqrt_n, B_n };

// Empirical CDF of the normalized one-dimensional sum. F(t) counts values
// <= t (right-continuous); F_left(t) counts values < t.
struct EmpiricalCDF {
    std::vector<double> sorted_values;
    std::uint64_t reps = 0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    Normalization normalization = Normalization::sqrt_n;

    double F(double t) const;
    double F_left(double t) const;

    // Binary cache: "HDCLT1", n, reps, seed (u64 LE), normalization (u8),
    // then reps little-endian float64 values, sorted.
    void save(const std::string& path) const;
    static EmpiricalCDF load(const std::string& path);
};

// Chunk of replications handed to one worker; fixed so that the output is
// identical for any worker count.
inline constexpr std::size_t kReplicationChunk = std::size_t{1} << 16;

// workers = 0 uses std::thread::hardware_concurrency().
EmpiricalCDF simulate_marginal(const StandardizedDist& d, std::uint64_t n, std::uint64_t reps,
                               std::uint64_t seed, unsigned workers = 0);

enum class SetClass { max, dist, rect_bound };

struct DiscrepancyEstimate {
    SetClass set_class = SetClass::max;
    double rho_hat = 0.0;
    double mc_se = 0.0;
    double log_p = 0.0;
    double argmax = 0.0;  // t attaining the sup (max); +inf when not applicable
    std::uint64_t n = 0, reps = 0, seed = 0;
};

// sup_t |F(t)^p - Phi(t)^p|, exact over the step structure of F.
DiscrepancyEstimate rho_max(const EmpiricalCDF& F, double log_p);

// Feasible-point maximum of |prod F(a_j) - prod Phi(a_j)| over endpoints drawn
// from grid_size quantile-spaced sample points (plus +inf), p up to 256
// distinct slots; larger p is grouped into 256 equal blocks. Never below rho_max.
DiscrepancyEstimate rho_dist(const EmpiricalCDF& F, double log_p, int grid_size = 64);

// The same grid search given explicit candidate pairs (F value, Phi value) and
// an integer p; exact for small p. Exposed for oracle tests.
double rho_dist_grid(const std::vector<double>& f, const std::vector<double>& g, std::uint64_t p);

struct BCoeffEstimate {
    double value = 0.0;
    double mc_se = 0.0;  // binomial error of F at the argmax, divided by the normalizer
    double argmax = 0.0;
};

// sup over sample points t with |t| <= zone_edge of |F(t) - Phi(t)| / min(1/2, phi(t)/|t|).
BCoeffEstimate estimate_b_coeff_detail(const EmpiricalCDF& F, double zone_edge);
double estimate_b_coeff(const EmpiricalCDF& F, double zone_edge);

// Minimum expected tail count for zone_ratio.
inline constexpr double kZoneRatioMinHits = 50.0;

// #(values > u) / (reps (1 - Phi(u))) at u = zone_ratio_threshold(log_p).
double zone_ratio(const EmpiricalCDF& F, double log_p);

}  // namespace hdclt
