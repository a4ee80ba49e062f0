#include "hdclt/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "hdclt/analytic_bounds.hpp"
#include "hdclt/errors.hpp"
#include "hdclt/gaussian.hpp"
#include "hdclt/scaling_solvers.hpp"
#include "hdclt/simd_kernels.hpp"

namespace hdclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x^p with p = e^{log_p}, for x in [0,1]; log(-log x) is passed in.
double pow_p_from_lnl(double lnl, double log_p) { return std::exp(-std::exp(log_p + lnl)); }

double pow_p(double x, double log_p) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return pow_p_from_lnl(std::log(-std::log(x)), log_p);
}

// Phi(t)^p without losing the upper tail to rounding.
double gauss_pow_p(double t, double log_p) {
    const double lnl = t > 0.0 ? log_neg_log1m_exp(log_normal_sf(t)) : std::log(-log_normal_cdf(t));
    return pow_p_from_lnl(lnl, log_p);
}

struct Steps {
    std::vector<double> u;  // distinct sample values
    std::vector<double> c;  // F(u_k)
};

Steps distinct_steps(const EmpiricalCDF& F) {
    Steps s;
    const auto& v = F.sorted_values;
    const double reps = static_cast<double>(F.reps);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        s.u.push_back(v[i]);
        s.c.push_back(static_cast<double>(i + 1) / reps);
    }
    return s;
}

void check_cdf(const EmpiricalCDF& F) {
    if (F.reps == 0 || F.sorted_values.size() != F.reps)
        throw EstimationError("empirical CDF is empty or inconsistent with reps");
}

}  // namespace

EmpiricalCDF simulate_marginal(const StandardizedDist& d, std::uint64_t n, std::uint64_t reps,
                               std::uint64_t seed, unsigned workers) {
    if (reps < 100) throw SpecificationError("simulate_marginal needs reps >= 100");
    if (n < 1) throw SpecificationError("simulate_marginal needs n >= 1");
    EmpiricalCDF F;
    F.reps = reps;
    F.n = n;
    F.seed = seed;
    double scale;
    if (d.spec().class_id == TailClass::IV) {
        F.normalization = Normalization::B_n;
        scale = 1.0 / solve_bn(d, static_cast<double>(n)).value;
    } else {
        scale = 1.0 / std::sqrt(static_cast<double>(n));
    }
    F.sorted_values.resize(reps);
    const DrawMap map = d.draw_map();
    const std::uint64_t chunks = (reps + kReplicationChunk - 1) / kReplicationChunk;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
            const std::uint64_t first = c * kReplicationChunk;
            const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kReplicationChunk, reps - first));
            sum_replications(map, seed, first, count, n, scale, F.sorted_values.data() + first);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::sort(F.sorted_values.begin(), F.sorted_values.end());
    return F;
}

DiscrepancyEstimate rho_max(const EmpiricalCDF& F, double log_p) {
    check_cdf(F);
    if (!(log_p >= 0.0)) throw DomainError("rho_max: log_p must be >= 0");
    const Steps s = distinct_steps(F);
    const std::size_t K = s.u.size();
    // Interval k covers [u_{k-1}, u_k) with F = c_{k-1}; interval 0 is (-inf, u_0).
    std::vector<double> lo(K + 1), hi(K + 1), ref(K + 1);
    std::vector<double> G(K);
    for (std::size_t k = 0; k < K; ++k) G[k] = gauss_pow_p(s.u[k], log_p);
    lo[0] = 0.0;
    hi[0] = G[0];
    ref[0] = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        lo[k] = G[k - 1];
        hi[k] = k < K ? G[k] : 1.0;
        ref[k] = pow_p(s.c[k - 1], log_p);
    }
    DiscrepancyEstimate r;
    r.set_class = SetClass::max;
    r.log_p = log_p;
    r.n = F.n;
    r.reps = F.reps;
    r.seed = F.seed;
    r.rho_hat = max_gap(lo.data(), hi.data(), ref.data(), nullptr, K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const double g_lo = std::fabs(lo[k] - ref[k]), g_hi = std::fabs(hi[k] - ref[k]);
        if (std::max(g_hi, g_lo) != r.rho_hat) continue;
        r.argmax = g_lo >= g_hi ? (k == 0 ? -kInf : s.u[k - 1]) : (k < K ? s.u[k] : kInf);
        const double c = k == 0 ? 0.0 : s.c[k - 1];
        if (c > 0.0 && c < 1.0) {
            const double p_cpm1 = std::exp(log_p + (std::exp(log_p) - 1.0) * std::log(c));
            r.mc_se = p_cpm1 * std::sqrt(c * (1.0 - c) / static_cast<double>(F.reps));
        }
        break;
    }
    return r;
}

namespace {

struct Pt {
    double lf, lg;
};

// Keeps points not dominated by one with larger lf and smaller lg, sorted by lf
// descending; thins to at most cap points.
void prune(std::vector<Pt>& v, std::size_t cap) {
    std::sort(v.begin(), v.end(), [](const Pt& a, const Pt& b) {
        return a.lf != b.lf ? a.lf > b.lf : a.lg < b.lg;
    });
    std::vector<Pt> out;
    double best = kInf;
    for (const Pt& q : v)
        if (q.lg < best) {
            out.push_back(q);
            best = q.lg;
        }
    if (out.size() > cap) {
        std::vector<Pt> thin;
        for (std::size_t i = 0; i < cap; ++i) thin.push_back(out[i * (out.size() - 1) / (cap - 1)]);
        out.swap(thin);
    }
    v.swap(out);
}

// max over multisets of `units` candidates (each used with weight `block`)
// of prod f - prod g.
double one_sided_dp(const std::vector<double>& lf, const std::vector<double>& lg, std::uint64_t units,
                    double block) {
    constexpr std::size_t kCap = 512;
    std::vector<std::vector<Pt>> front(units + 1);
    front[0] = {{0.0, 0.0}};
    for (std::size_t i = 0; i < lf.size(); ++i) {
        const double df = block * lf[i], dg = block * lg[i];
        for (std::uint64_t j = 1; j <= units; ++j) {
            if (front[j - 1].empty()) continue;
            auto& cur = front[j];
            for (const Pt& q : front[j - 1]) cur.push_back({q.lf + df, q.lg + dg});
            prune(cur, kCap);
        }
    }
    double best = -kInf;
    for (const Pt& q : front[units]) best = std::max(best, std::exp(q.lf) - std::exp(q.lg));
    return best;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

}  // namespace

double rho_dist_grid(const std::vector<double>& f, const std::vector<double>& g, std::uint64_t p) {
    if (f.empty() || f.size() != g.size()) throw SpecificationError("rho_dist: empty or mismatched grid");
    if (p == 0) return 0.0;
    std::uint64_t units = p;
    double block = 1.0;
    if (p > 256) {
        units = 256;
        block = std::floor(static_cast<double>(p) / 256.0);  // remainder sits at +inf
    }
    std::vector<double> lf(f.size()), lg(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        lf[i] = safe_log(f[i]);
        lg[i] = safe_log(g[i]);
    }
    const double a = one_sided_dp(lf, lg, units, block);
    const double b = one_sided_dp(lg, lf, units, block);
    return std::max({0.0, a, b});
}

DiscrepancyEstimate rho_dist(const EmpiricalCDF& F, double log_p, int grid_size) {
    check_cdf(F);
    if (grid_size < 1) throw SpecificationError("rho_dist: grid_size must be >= 1");
    if (!(log_p >= 0.0 && log_p <= std::log(1e15))) throw DomainError("rho_dist: log_p outside [0, log 1e15]");
    const auto p = static_cast<std::uint64_t>(std::llround(std::exp(log_p)));
    std::vector<double> f, g;
    for (int i = 0; i < grid_size; ++i) {
        const auto idx = static_cast<std::size_t>((i + 0.5) / grid_size * static_cast<double>(F.reps));
        const double t = F.sorted_values[std::min<std::size_t>(idx, F.reps - 1)];
        const double phi = normal_cdf(t);
        f.push_back(F.F(t));
        g.push_back(phi);
        f.push_back(F.F_left(t));
        g.push_back(phi);
    }
    f.push_back(1.0);
    g.push_back(1.0);
    DiscrepancyEstimate r = rho_max(F, log_p);
    r.set_class = SetClass::dist;
    const double dp = rho_dist_grid(f, g, p);
    if (dp > r.rho_hat) {
        r.rho_hat = dp;
        r.argmax = kInf;
        r.mc_se = 0.0;
    }
    return r;
}

BCoeffEstimate estimate_b_coeff_detail(const EmpiricalCDF& F, double zone_edge) {
    check_cdf(F);
    if (!(zone_edge > 0.0)) throw DomainError("estimate_b_coeff: zone_edge must be positive");
    const auto& v = F.sorted_values;
    const auto first = std::lower_bound(v.begin(), v.end(), -zone_edge);
    const auto last = std::upper_bound(v.begin(), v.end(), zone_edge);
    if (first == last) throw EstimationError("estimate_b_coeff: no sample points within the zone edge");
    const double reps = static_cast<double>(F.reps);
    BCoeffEstimate r;
    bool any = false;
    for (auto it = first; it != last; ++it) {
        const double t = *it;
        if (it + 1 != last && *(it + 1) == t) continue;
        const double at = std::fabs(t);
        const double norm = at == 0.0 ? 0.5 : std::min(0.5, normal_pdf(at) / at);
        const double phi = normal_cdf(t);
        const double right = static_cast<double>(it - v.begin() + 1) / reps;
        const double left = static_cast<double>(std::lower_bound(v.begin(), it, t) - v.begin()) / reps;
        for (double c : {right, left}) {
            const double val = std::fabs(c - phi) / norm;
            if (!any || val > r.value) {
                any = true;
                r.value = val;
                r.argmax = t;
                r.mc_se = std::sqrt(c * (1.0 - c) / reps) / norm;
            }
        }
    }
    return r;
}

double estimate_b_coeff(const EmpiricalCDF& F, double zone_edge) {
    return estimate_b_coeff_detail(F, zone_edge).value;
}

double zone_ratio(const EmpiricalCDF& F, double log_p) {
    check_cdf(F);
    const double u = zone_ratio_threshold(log_p);
    const double sf = normal_sf(u);
    const double reps = static_cast<double>(F.reps);
    if (reps * sf < kZoneRatioMinHits)
        throw EstimationError("zone_ratio: expected tail count " + std::to_string(reps * sf) +
                              " below " + std::to_string(kZoneRatioMinHits) + "; needs reps >= " +
                              std::to_string(static_cast<std::uint64_t>(std::ceil(kZoneRatioMinHits / sf))));
    const double above = reps - static_cast<double>(
        std::upper_bound(F.sorted_values.begin(), F.sorted_values.end(), u) - F.sorted_values.begin());
    return above / (reps * sf);
}

}  // namespace hdclt
