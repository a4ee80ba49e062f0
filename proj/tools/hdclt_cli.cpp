#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hdclt/errors.hpp"
#include "hdclt/experiment.hpp"
#include "hdclt/gaussian.hpp"
#include "hdclt/monte_carlo.hpp"
#include "hdclt/scaling_solvers.hpp"
#include "hdclt/simd_kernels.hpp"

using namespace hdclt;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::optional<unsigned> workers;
};

std::vector<double> log_grid(const std::vector<double>& ns, const std::vector<double>& log_ns) {
    std::vector<double> out = log_ns;
    for (double n : ns) out.push_back(std::log(n));
    if (out.empty()) throw SpecificationError("give --n or --log-n");
    return out;
}

ExperimentConfig experiment_config(const Globals& g, ExperimentKind kind) {
    if (g.config.empty()) throw SpecificationError("--config is required");
    ExperimentConfig c = load_config(g.config);
    if (c.experiment != kind)
        throw SpecificationError(std::string("config describes experiment '") + to_string(c.experiment) +
                                 "', not '" + to_string(kind) + "'");
    if (g.seed) c.seed = *g.seed;
    if (!g.out.empty()) c.output_dir = g.out;
    if (g.format == "csv") c.format = OutputFormat::csv;
    else if (g.format == "json") c.format = OutputFormat::json;
    if (g.workers) c.workers = *g.workers;
    return c;
}

int run_and_report(const Globals& g, ExperimentKind kind) {
    const ExperimentConfig c = experiment_config(g, kind);
    const ExperimentResult r = run_experiment(c);
    std::cout << to_csv(r);
    for (const auto& path : emit_report(r, c.format)) std::cout << "wrote " << path << "\n";
    std::cout << "verdict " << r.verdict << "\n";
    return 0;
}

TailSpec spec_for(const Globals& g) {
    if (g.config.empty()) throw SpecificationError("--config is required");
    return load_config(g.config).spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-dimensional CLT experiments: scaling solvers, tail laws, Monte Carlo discrepancies"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "experiment config file");
    app.add_option("--seed", g.seed, "override the config seed");
    app.add_option("--out", g.out, "output directory (or file for simulate)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", g.workers, "simulation threads (0 = all cores)");
    app.fallthrough();

    std::string form = "power";
    double gamma = 1.0 / 3.0;
    std::vector<double> ns, log_ns;
    auto* lam = app.add_subcommand("solve-lambda", "solve h(sqrt(n) L) = L^2");
    lam->add_option("--form", form, "power or polylog")->check(CLI::IsMember({"power", "polylog"}));
    lam->add_option("--gamma", gamma, "exponent of h");
    lam->add_option("--n", ns, "sample sizes");
    lam->add_option("--log-n", log_ns, "log sample sizes");

    std::optional<double> eta, kappa;
    auto* bn = app.add_subcommand("solve-bn", "solve B^2 = n D(B)");
    bn->add_option("--eta", eta, "Example law eta (instead of --config)");
    bn->add_option("--kappa", kappa, "Example law kappa (instead of --config)");
    bn->add_option("--n", ns, "sample sizes");
    bn->add_option("--log-n", log_ns, "log sample sizes");

    std::uint64_t sim_n = 0, reps = 0;
    auto* sim = app.add_subcommand("simulate", "simulate the normalized sum and write an EmpiricalCDF file");
    sim->add_option("--n", sim_n, "sample size")->required();
    sim->add_option("--reps", reps, "replications (default: config reps)");

    auto* suff = app.add_subcommand("sufficiency", "sufficiency trend experiment");
    auto* nec = app.add_subcommand("necessity", "necessity certification experiment");
    auto* ex = app.add_subcommand("example-cases", "Example law case analysis");
    auto* zone = app.add_subcommand("zone-diagnostics", "moderate-deviation zone ratio");
    auto* bounds = app.add_subcommand("bounds-report", "analytic partition and necessity bounds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*lam) {
            const TailFunction h = form == "power" ? TailFunction::power(gamma) : TailFunction::polylog(gamma);
            std::printf("log_n,Lambda,log_Lambda,residual,closed_form\n");
            for (double l : log_grid(ns, log_ns)) {
                const ScalingSolution s = solve_lambda_log(h, l);
                std::printf("%.17g,%.17g,%.17g,%.3g,%s\n", l, s.value, s.log_value, s.residual,
                            s.closed_form ? std::to_string(*s.closed_form).c_str() : "NA");
            }
        } else if (*bn) {
            TailSpec spec;
            if (eta || kappa) {
                spec.class_id = TailClass::IV;
                spec.form = TailForm::example;
                spec.eta = eta.value_or(1.0);
                spec.kappa = kappa.value_or(1.0);
            } else {
                spec = spec_for(g);
            }
            const StandardizedDist d(spec);
            std::printf("log_n,B_n,log_B_n,residual,iterations\n");
            for (double l : log_grid(ns, log_ns)) {
                const ScalingSolution s = solve_bn_log(d, l);
                std::printf("%.17g,%.17g,%.17g,%.3g,%d\n", l, s.value, s.log_value, s.residual, s.iterations);
            }
        } else if (*sim) {
            if (g.config.empty()) throw SpecificationError("--config is required");
            ExperimentConfig c = load_config(g.config);
            if (g.seed) c.seed = *g.seed;
            if (g.workers) c.workers = *g.workers;
            const StandardizedDist d(c.spec);
            const EmpiricalCDF F = simulate_marginal(d, sim_n, reps ? reps : c.reps, c.seed, c.workers);
            const DiscrepancyEstimate ks = rho_max(F, 0.0);
            std::printf("n=%llu reps=%llu seed=%llu simd=%s ks_distance=%.6g\n",
                        static_cast<unsigned long long>(F.n), static_cast<unsigned long long>(F.reps),
                        static_cast<unsigned long long>(F.seed), simd_level_name(active_simd_level()), ks.rho_hat);
            if (!g.out.empty()) {
                F.save(g.out);
                std::printf("wrote %s\n", g.out.c_str());
            }
        } else if (*suff) {
            return run_and_report(g, ExperimentKind::sufficiency);
        } else if (*nec) {
            return run_and_report(g, ExperimentKind::necessity);
        } else if (*ex) {
            return run_and_report(g, ExperimentKind::example_cases);
        } else if (*zone) {
            return run_and_report(g, ExperimentKind::zone_diagnostics);
        } else if (*bounds) {
            return run_and_report(g, ExperimentKind::bounds_report);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
