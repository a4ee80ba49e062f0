// Acceptance run: one PASS/FAIL line per criterion. Tolerances and instances
// are pinned here; exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "hdclt/analytic_bounds.hpp"
#include "hdclt/errors.hpp"
#include "hdclt/experiment.hpp"
#include "hdclt/gaussian.hpp"
#include "hdclt/monte_carlo.hpp"
#include "hdclt/scaling_solvers.hpp"
#include "hdclt/tail_distributions.hpp"

using namespace hdclt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE = std::exp(1.0);

struct Outcome {
    bool pass = true;
    std::string detail, info;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < budget_s, fmt("runtime %.1f s over budget %.0f s", secs, budget_s));
    if (!o.pass) ++failures;
    std::printf("%s %2d %-26s %8.2fs  %s%s%s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.info.c_str(),
                o.detail.empty() ? "" : " | failed: ", o.detail.c_str());
    std::fflush(stdout);
}

TailSpec pareto(double m, double l, double cutoff) {
    TailSpec s;
    s.class_id = TailClass::II;
    s.form = TailForm::pareto;
    s.m = m;
    s.l = l;
    s.cutoff = cutoff;
    return s;
}

TailSpec example(double eta, double kappa) {
    TailSpec s;
    s.class_id = TailClass::IV;
    s.form = TailForm::example;
    s.eta = eta;
    s.kappa = kappa;
    return s;
}

// root of an increasing function on [lo, hi] by plain bisection
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Outcome mills() {
    Outcome o;
    int violations = 0;
    const double a = std::log(1e-3), b = std::log(37.0);
    for (int i = 1; i <= 400; ++i) {
        const double t = std::exp(a + (b - a) * i / 400.0);
        const double r = mills_ratio(t);
        if (!(2.0 / (std::sqrt(t * t + 4.0) + t) < r && r < 1.0 / t)) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " of 400 points outside the envelope");
    o.info = "400 points strictly inside";
    return o;
}

Outcome lambda_solver() {
    Outcome o;
    double worst = 0.0;
    for (double gamma : {0.1, 0.25, 0.4, 0.499})
        for (int k = 2; k <= 8; ++k) {
            const double n = std::pow(10.0, k);
            const double closed = std::pow(n, gamma / (2.0 * (2.0 - gamma)));
            worst = std::max(worst, std::fabs(solve_lambda(TailFunction::power(gamma), n).value / closed - 1.0));
        }
    o.require(worst <= 1e-10, fmt("max rel error %.3g", worst));
    TailSpec half;
    half.class_id = TailClass::I;
    half.form = TailForm::power;
    half.gamma = 0.5;
    bool rejected = false;
    try {
        validate(half);
    } catch (const SpecificationError&) {
        rejected = true;
    }
    o.require(rejected, "gamma = 1/2 accepted");
    o.info = fmt("max rel error %.3g; gamma = 1/2 rejected", worst);
    return o;
}

Outcome case3_moment() {
    Outcome o;
    const StandardizedDist d(example(1.0, 1.0));
    // eta = kappa = 1: D(x) = e^{2e} (1 - e^{1 - loglog x} + 2e (loglog x - 1)) for x >= e^e
    auto closed = [](double x) {
        const double ll = std::log(std::log(x));
        return std::exp(2 * kE) * (1.0 - std::exp(1.0 - ll) + 2 * kE * (ll - 1.0));
    };
    double worst_quad = 0.0, worst_lib = 0.0;
    for (double x : {std::exp(kE) + 1.0, std::exp(3.0), std::exp(5.0), std::exp(10.0)}) {
        worst_quad = std::max(worst_quad, std::fabs(closed(x) / d.truncated_second_moment_quadrature(x) - 1.0));
        worst_lib = std::max(worst_lib, std::fabs(d.truncated_second_moment(x) / closed(x) - 1.0));
    }
    o.require(worst_quad <= 1e-6, fmt("formula vs quadrature rel gap %.3g", worst_quad));
    o.require(worst_lib <= 1e-6, fmt("library D vs formula rel gap %.3g", worst_lib));
    const double at_edge = d.truncated_second_moment(std::exp(kE));
    o.require(at_edge == 0.0, fmt("D(e^e) = %.3g", at_edge));
    o.info = fmt("formula vs quadrature %.3g, library vs formula %.3g; D(e^e) = 0", worst_quad, worst_lib);
    return o;
}

Outcome example_classification() {
    Outcome o;
    ExperimentConfig c;
    c.experiment = ExperimentKind::example_cases;
    c.spec = example(1.0, 1.0);
    c.log_n_grid = {std::log(1e4), std::log(1e6)};
    const ExperimentResult r = run_example_cases(c);
    o.require(r.verdict == "PASS", "case classification or B_n sandwich failed");
    for (const auto& row : r.rows) {
        const int cs = static_cast<int>(row.extras.at("case"));
        o.require((row.extras.at("variance_finite") == 1.0) == (cs <= 2), "case " + std::to_string(cs) + " misclassified");
    }
    // Case 5 envelopes of D give fixed points bracketing B_n
    const double eta = 0.5, kappa = 1.0;
    const StandardizedDist d(example(eta, kappa));
    auto log_d_lo = [&](double lx) {
        const double L = lx, ll = std::log(L);
        const double base = std::exp(2 * kE) * (1.0 - std::exp(kappa - kappa * std::pow(ll, eta)));
        return std::log(base + 2.0 * std::exp(2 * kE + kappa) * std::exp(-kappa * std::pow(ll, eta)) * (L - kE));
    };
    auto log_d_hi = [&](double lx) {
        const double L = lx, ll = std::log(L);
        const double base = std::exp(2 * kE) * (1.0 - std::exp(kappa - kappa * std::pow(ll, eta)));
        return std::log(base + 2.0 * std::exp(2 * kE) * (L - kE));
    };
    for (double n : {1e4, 1e6}) {
        const double log_n = std::log(n);
        const double b = solve_bn(d, n).log_value;
        const double lo = bisect([&](double lb) { return 2.0 * lb - log_n - log_d_lo(lb); }, kE + 1e-9, 60.0);
        const double hi = bisect([&](double lb) { return 2.0 * lb - log_n - log_d_hi(lb); }, kE + 1e-9, 60.0);
        o.require(lo <= b && b <= hi, fmt("n=%.0e: log B_n %.6g outside [%.6g, ...]", n, b, lo));
        o.info += fmt("n=%.0e: %.4g <= B_n=%.4g", n, std::exp(lo), std::exp(b)) + fmt(" <= %.4g; ", std::exp(hi));
    }
    return o;
}

Outcome rectangle_oracle() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> unif(-2.5, 2.5), coin(0.0, 1.0);
    int cases = 0, violations = 0, equality_misses = 0;
    double worst_slack = kInf;
    for (const auto* law : {&oracle::rademacher, &oracle::three_point_sym, &oracle::three_point_skew})
        for (int n : {2, 4, 6}) {
            const auto S = oracle::sum_law(*law, n);
            const MarginalLaw m{[&](double x) { return oracle::cdf(S, x); },
                                [&](double x) { return oracle::cdf_left(S, x); }};
            auto endpoint = [&] {
                if (coin(rng) < 0.5) return S[static_cast<std::size_t>(coin(rng) * S.size()) % S.size()].value;
                return unif(rng);
            };
            for (int p : {1, 2, 3})
                for (int r = 0; r < 50; ++r) {
                    std::vector<double> a(p), b(p);
                    double pf = 1.0, pg = 1.0;
                    for (int j = 0; j < p; ++j) {
                        double x = endpoint(), y = endpoint();
                        if (x > y) std::swap(x, y);
                        a[j] = coin(rng) < 0.2 ? -kInf : x;
                        b[j] = coin(rng) < 0.2 ? kInf : y;
                        pf *= (std::isinf(b[j]) ? 1.0 : oracle::cdf(S, b[j])) -
                              (std::isinf(a[j]) ? 0.0 : oracle::cdf_left(S, a[j]));
                        pg *= oracle::gauss(b[j]) - oracle::gauss(a[j]);
                    }
                    const double exact = std::fabs(pf - pg), bound = rectangle_bound(a, b, m);
                    if (exact > bound + 1e-14) ++violations;
                    worst_slack = std::min(worst_slack, bound - exact);
                    ++cases;
                }
            for (int r = 0; r < 20; ++r) {
                const double x = endpoint();
                const double exact = std::fabs(oracle::cdf(S, x) - oracle::gauss(x));
                if (std::fabs(rectangle_bound({-kInf}, {x}, m) - exact) > 1e-14 * std::max(1.0, exact)) ++equality_misses;
            }
        }
    o.require(cases == 1350, "case count " + std::to_string(cases));
    o.require(violations == 0, std::to_string(violations) + " rectangles above the bound");
    o.require(equality_misses == 0, std::to_string(equality_misses) + " one-sided p = 1 mismatches");
    o.info = fmt("%.0f rectangles, min slack %.3g, p = 1 equality holds", cases, worst_slack);
    return o;
}

ExperimentConfig class2_sufficiency() {
    ExperimentConfig c;
    c.experiment = ExperimentKind::sufficiency;
    c.spec = pareto(4.0, 11.25, 5.0);
    c.n_grid = {250, 1000, 4000};
    c.epsilon = 0.5;
    c.reps = 1000000;
    c.seed = 20240601;
    c.workers = 1;
    c.thresholds.rho_final_max = 0.05;
    c.thresholds.rho_ratio_max = 0.5;
    c.thresholds.b_band = 2.0;
    return c;
}

std::string class2_csv;

Outcome sufficiency_class2() {
    Outcome o;
    const ExperimentConfig c = class2_sufficiency();
    const ExperimentResult r = run_sufficiency(c);
    class2_csv = to_csv(r);
    const auto& rows = r.rows;
    for (const auto& row : rows)
        o.require(std::fabs(row.log_p - 0.5 * row.log_n) <= 1e-12 * row.log_n, "log p is not 0.5 log n");
    const double first = rows.front().rho_max_hat, last = rows.back().rho_max_hat;
    o.require(last < 0.5 * first, fmt("rho(4000) %.4g not below half of rho(250) %.4g", last, first));
    o.require(last < 0.05, fmt("rho(4000) %.4g not below 0.05", last));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double band = 2.0 * std::hypot(rows[i].extras.at("b_mc_se"), rows[i - 1].extras.at("b_mc_se"));
        o.require(rows[i].b_hat <= rows[i - 1].b_hat + band, fmt("b_hat rises %.4g -> %.4g", rows[i - 1].b_hat, rows[i].b_hat));
    }
    o.require(r.verdict == "PASS", "runner verdict " + r.verdict);
    o.info += fmt("rho %.4g -> %.4g", first, rows[1].rho_max_hat) + fmt(" -> %.4g; b_hat %.3g", last, rows[0].b_hat) +
                fmt(" -> %.3g -> %.3g", rows[1].b_hat, rows[2].b_hat);
    return o;
}

Outcome sufficiency_class1() {
    Outcome o;
    ExperimentConfig c;
    c.experiment = ExperimentKind::sufficiency;
    c.spec.class_id = TailClass::I;
    c.spec.form = TailForm::power;
    c.spec.gamma = 1.0 / 3.0;
    c.spec.rate = 4.0;
    c.spec.cutoff = 3.0;
    c.spec.tail_share = 0.9;
    c.n_grid = {1000, 10000};
    c.reps = 2000000;
    c.seed = 20240601;
    c.workers = 1;
    const ExperimentResult r = run_sufficiency(c);
    const auto& a = r.rows[0];
    const auto& b = r.rows[1];
    o.require(b.rho_max_hat < a.rho_max_hat, fmt("rho %.4g -> %.4g not decreasing", a.rho_max_hat, b.rho_max_hat));
    o.require(b.A < a.A, fmt("A %.4g -> %.4g not decreasing", a.A, b.A));
    double worst = 0.0;
    for (const auto& row : r.rows) {
        o.require(std::fabs(row.log_p - 0.5 * row.scaling * row.scaling) <= 1e-12 * row.log_p, "log p is not Lambda^2/2");
        worst = std::max(worst, std::fabs(row.A1 * row.scaling - 1.0));
    }
    o.require(worst <= 1e-12, fmt("A1 Lambda - 1 = %.3g", worst));
    o.info += fmt("rho %.4g -> %.4g; ", a.rho_max_hat, b.rho_max_hat) + fmt("A %.4g -> %.4g; ", a.A, b.A) +
                fmt("|A1 Lambda - 1| <= %.2g", worst);
    return o;
}

ExperimentConfig necessity_scan(const TailSpec& s) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::necessity;
    c.spec = s;
    c.epsilon = 0.25;
    c.reps = 0;
    for (int i = 0; i <= 24; ++i) c.log_n_grid.push_back(4.0 * std::pow(100.0, i / 24.0));  // log n in [4, 400]
    return c;
}

std::string class2_necessity_csv;

Outcome necessity() {
    Outcome o;
    TailSpec class3;
    class3.class_id = TailClass::III;
    class3.form = TailForm::loglog;
    class3.beta = 8.0;
    const TailSpec class2 = pareto(3.0, 10.0, std::nan(""));
    double worst_phi = 0.0;
    for (const auto& [name, spec] : std::vector<std::pair<std::string, TailSpec>>{
             {"II", class2}, {"III", class3}, {"IV", example(2.0, 4.0)}}) {
        const ExperimentResult r = run_necessity(necessity_scan(spec));
        for (const auto& row : r.rows) worst_phi = std::max(worst_phi, std::fabs(row.extras.at("p_log_phi") + 1.0));
        o.require(r.verdict == "PASS", "class " + name + " has no N0 on the scan");
        o.info += name + ": N0 log n " + r.metadata.at("N0_log_n").substr(0, 6) + "; ";
    }
    o.require(worst_phi <= 1e-9, fmt("|p log Phi(x_n) + 1| up to %.3g", worst_phi));
    ExperimentConfig c;
    c.experiment = ExperimentKind::necessity;
    c.spec = class2;
    c.epsilon = 0.25;
    c.n_grid = {10000};
    c.reps = 10000000;
    c.seed = 20240601;
    c.workers = 1;
    const ExperimentResult r = run_necessity(c);
    class2_necessity_csv = to_csv(r);
    const auto& row = r.rows.front();
    const double p = std::exp(row.log_p);
    o.require(p <= 1e4, fmt("p = %.4g above 1e4", p));
    const auto it = row.extras.find("p_hat_max");
    o.require(it != row.extras.end(), "no simulated probability");
    if (it != row.extras.end()) {
        const double p_hat = it->second, gap = std::exp(-1.0) - p_hat;
        o.require(p_hat < 0.2, fmt("P_hat %.4g not below 0.2", p_hat));
        o.require(gap >= 0.15, fmt("gap to e^-1 only %.4g", gap));
        o.info += fmt("p = %.4g, P_hat(max <= x_n) = %.4g, gap %.4g; ", p, p_hat, gap);
    }
    o.info += fmt("phi check <= %.2g", worst_phi);
    return o;
}

Outcome zone_ratio_normal() {
    Outcome o;
    TailSpec g;
    g.class_id = TailClass::I;
    g.form = TailForm::gaussian;
    const std::uint64_t reps = 1000000;
    const EmpiricalCDF F = simulate_marginal(StandardizedDist(g), 4, reps, 20240601, 1);
    const double log_p = std::log(16.0);
    const double u = zone_ratio_threshold(log_p);
    const double q = 0.5 * std::erfc(u / std::sqrt(2.0));
    const auto hits = std::count_if(F.sorted_values.begin(), F.sorted_values.end(), [&](double v) { return v > u; });
    const double direct = static_cast<double>(hits) / (static_cast<double>(reps) * q);
    const double ratio = zone_ratio(F, log_p);
    const double se = std::sqrt((1.0 - q) / (static_cast<double>(reps) * q));
    o.require(std::fabs(ratio - direct) <= 1e-9 * direct, fmt("library ratio %.6g vs direct count %.6g", ratio, direct));
    o.require(std::fabs(ratio - 1.0) <= 3.0 * se, fmt("ratio %.4g, %.2f se from 1", ratio, std::fabs(ratio - 1.0) / se));
    o.info = fmt("u = %.4g, ratio %.4g, %.2f se from 1", u, ratio, std::fabs(ratio - 1.0) / se);
    return o;
}

Outcome determinism() {
    Outcome o;
    ExperimentConfig c = class2_sufficiency();
    c.workers = 4;
    const std::string again = to_csv(run_sufficiency(c));
    o.require(!class2_csv.empty() && again == class2_csv, "sufficiency CSV differs between 1 and 4 workers");
    ExperimentConfig nc;
    nc.experiment = ExperimentKind::necessity;
    nc.spec = pareto(3.0, 10.0, std::nan(""));
    nc.epsilon = 0.25;
    nc.n_grid = {10000};
    nc.reps = 10000000;
    nc.seed = 20240601;
    nc.workers = 3;
    o.require(!class2_necessity_csv.empty() && to_csv(run_necessity(nc)) == class2_necessity_csv,
              "necessity CSV differs between 1 and 3 workers");
    const ExperimentConfig a = necessity_scan(example(2.0, 4.0));
    o.require(to_csv(run_necessity(a)) == to_csv(run_necessity(a)), "analytic necessity CSV differs on re-run");
    o.info = "sufficiency and necessity CSV byte-identical across reruns and worker counts";
    return o;
}

}  // namespace

int main() {
    criterion(1, "mills_envelope", 1.0, mills);
    criterion(2, "lambda_solver", 1.0, lambda_solver);
    criterion(3, "case3_truncated_moment", 5.0, case3_moment);
    criterion(4, "example_classification", 30.0, example_classification);
    criterion(5, "rectangle_oracle", 60.0, rectangle_oracle);
    criterion(6, "sufficiency_class2", 600.0, sufficiency_class2);
    criterion(7, "sufficiency_class1", 900.0, sufficiency_class1);
    criterion(8, "necessity_certification", 1200.0, necessity);
    criterion(9, "zone_ratio_normal", 120.0, zone_ratio_normal);
    criterion(10, "determinism", 1800.0, determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
