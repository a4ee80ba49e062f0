#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdclt/scaling_solvers.hpp"
#include "hdclt/tail_distributions.hpp"

namespace hdclt {

enum class ExperimentKind { sufficiency, necessity, example_cases, zone_diagnostics, bounds_report };
enum class OutputFormat { csv, json };

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

// Verdict thresholds; defaults follow the desk-scale acceptance levels.
struct Thresholds {
    double rho_final_max = 0.05;   // sufficiency: last rho_max_hat below this
    double rho_ratio_max = 1.0;    // sufficiency: last / first below this (1 = only "decreasing")
    double b_band = 2.0;           // sufficiency: b_hat nonincreasing within b_band * mc_se
    double decay_log_max = -4.605170185988091;  // necessity: log 0.01
    double max_sim_prob = 0.2;     // necessity: simulated P(max <= x_n) below this
    double phi_check_tol = 1e-9;   // necessity: |p log Phi(x_n) + 1|
    double simulate_max_p = 1e4;   // necessity: simulate only when p <= this
    double zone_ratio_se = 3.0;    // zone diagnostics: |ratio - 1| within this many binomial se
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::sufficiency;
    TailSpec spec;
    std::optional<Theorem> theorem;   // default: the spec class on the experiment's side
    std::vector<std::uint64_t> n_grid;
    std::vector<double> log_n_grid;   // analytic experiments may use n beyond integer range
    double epsilon = 0.5;
    std::uint64_t reps = 100000;
    std::uint64_t seed = 20240601;
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::csv;
    unsigned workers = 0;
    int grid_size = 64;
    std::optional<double> b_coeff;    // user b_n; unset means the empirical estimate
    std::optional<double> log_p;      // fixed log p in place of the theorem schedule
    std::string cache_dir;            // EmpiricalCDF cache; empty disables
    std::vector<double> etas, kappas; // example_cases; empty selects the five canonical cases
    Thresholds thresholds;

    // log n values of the grid (from n_grid, else log_n_grid).
    std::vector<double> log_ns() const;
    Theorem resolved_theorem() const;
};

// Flat key-value text with [spec] and [thresholds] sections; '#' comments;
// values are numbers, true/false, "strings" or [a, b, ...] lists.
// Unknown keys and invariant violations throw SpecificationError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& c);
std::string to_config_text(const ExperimentConfig& c);

// TailSpec <-> plain mapping, values as text.
std::map<std::string, std::string> spec_to_map(const TailSpec& s);
TailSpec spec_from_map(const std::map<std::string, std::string>& m);
// Stable 64-bit FNV-1a hash of the canonical spec mapping.
std::uint64_t spec_hash(const TailSpec& s);

struct ResultRow {
    double n = 0.0;
    double log_n = 0.0;
    double log_p = 0.0;
    double scaling = 0.0;  // Lambda_n, B_n or sqrt(n)
    double rho_max_hat = std::numeric_limits<double>::quiet_NaN();
    double mc_se = std::numeric_limits<double>::quiet_NaN();
    double b_hat = std::numeric_limits<double>::quiet_NaN();
    double A1 = std::numeric_limits<double>::quiet_NaN();
    double A2 = std::numeric_limits<double>::quiet_NaN();
    double A3 = std::numeric_limits<double>::quiet_NaN();
    double A = std::numeric_limits<double>::quiet_NaN();
    double necessity_log_decay = std::numeric_limits<double>::quiet_NaN();
    std::string verdict;
    std::map<std::string, double> extras;

    bool operator==(const ResultRow&) const;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    std::string verdict;
    std::map<std::string, std::string> metadata;
    double wall_time = 0.0;
    std::string version;
};

inline constexpr const char* kArtifactVersion = "1.0.0";

ExperimentResult run_sufficiency(const ExperimentConfig& c);
ExperimentResult run_necessity(const ExperimentConfig& c);
ExperimentResult run_example_cases(const ExperimentConfig& c);
ExperimentResult run_zone_diagnostics(const ExperimentConfig& c);
ExperimentResult run_bounds_report(const ExperimentConfig& c);
ExperimentResult run_experiment(const ExperimentConfig& c);

// Example law case (1-5) by (eta, kappa).
int example_case(double eta, double kappa);

inline constexpr int kCsvColumns = 12;
std::string to_csv(const ExperimentResult& r);
std::string to_json(const ExperimentResult& r);
ExperimentResult result_from_json(const std::string& text);
std::string to_plot_data(const ExperimentResult& r);
// Writes <output_dir>/<experiment>.{csv|json} and <experiment>_plot.dat;
// returns the paths written.
std::vector<std::string> emit_report(const ExperimentResult& r, OutputFormat format);

}  // namespace hdclt
