#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "hdclt/errors.hpp"
#include "hdclt/experiment.hpp"

namespace hdclt {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || errno == ERANGE)
        throw SpecificationError("config key '" + key + "': expected a number, got '" + v + "'");
    return x;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
    const double x = to_number(key, v);
    if (!(x >= 0.0 && x == std::floor(x) && x < 1.8e19))
        throw SpecificationError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw SpecificationError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::string to_text(const std::string& key, const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    throw SpecificationError("config key '" + key + "': expected a quoted string, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& key, const std::string& v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw SpecificationError("config key '" + key + "': expected a [list], got '" + v + "'");
    std::vector<std::string> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string list_text(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(static_cast<double>(v[i]));
    return s + "]";
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::sufficiency: return "sufficiency";
        case ExperimentKind::necessity: return "necessity";
        case ExperimentKind::example_cases: return "example_cases";
        case ExperimentKind::zone_diagnostics: return "zone_diagnostics";
        case ExperimentKind::bounds_report: return "bounds_report";
    }
    return "?";
}

ExperimentKind parse_experiment(const std::string& s) {
    for (auto k : {ExperimentKind::sufficiency, ExperimentKind::necessity, ExperimentKind::example_cases,
                   ExperimentKind::zone_diagnostics, ExperimentKind::bounds_report})
        if (s == to_string(k)) return k;
    throw SpecificationError("unknown experiment '" + s + "'");
}

std::map<std::string, std::string> spec_to_map(const TailSpec& s) {
    std::map<std::string, std::string> m;
    m["class"] = to_string(s.class_id);
    m["form"] = to_string(s.form);
    m["gamma"] = fmt(s.gamma);
    m["rate"] = fmt(s.rate);
    m["m"] = fmt(s.m);
    m["l"] = fmt(s.l);
    m["beta"] = fmt(s.beta);
    m["eta"] = fmt(s.eta);
    m["kappa"] = fmt(s.kappa);
    if (!std::isnan(s.cutoff)) m["cutoff"] = fmt(s.cutoff);
    m["tail_share"] = fmt(s.tail_share);
    m["symmetrize"] = s.symmetrize ? "true" : "false";
    return m;
}

TailSpec spec_from_map(const std::map<std::string, std::string>& m) {
    TailSpec s;
    bool class_given = false;
    for (const auto& [k, v] : m) {
        if (k == "class") {
            s.class_id = parse_tail_class(v);
            class_given = true;
        } else if (k == "form") s.form = parse_tail_form(v);
        else if (k == "gamma") s.gamma = to_number(k, v);
        else if (k == "rate") s.rate = to_number(k, v);
        else if (k == "m") s.m = to_number(k, v);
        else if (k == "l") s.l = to_number(k, v);
        else if (k == "beta") s.beta = to_number(k, v);
        else if (k == "eta") s.eta = to_number(k, v);
        else if (k == "kappa") s.kappa = to_number(k, v);
        else if (k == "cutoff") s.cutoff = to_number(k, v);
        else if (k == "tail_share") s.tail_share = to_number(k, v);
        else if (k == "symmetrize") s.symmetrize = to_bool(k, v);
        else throw SpecificationError("unknown spec key '" + k + "'");
    }
    if (!class_given) s.class_id = default_class(s.form);
    validate(s);
    return s;
}

std::uint64_t spec_hash(const TailSpec& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [k, v] : spec_to_map(s))
        for (char ch : k + "=" + v + ";") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
    return h;
}

std::vector<double> ExperimentConfig::log_ns() const {
    std::vector<double> out;
    if (!n_grid.empty())
        for (auto n : n_grid) out.push_back(std::log(static_cast<double>(n)));
    else
        out = log_n_grid;
    return out;
}

Theorem ExperimentConfig::resolved_theorem() const {
    if (theorem) return *theorem;
    const bool suff = experiment != ExperimentKind::necessity;
    switch (spec.class_id) {
        case TailClass::I: return suff ? Theorem::T1_suff : Theorem::T1_nec;
        case TailClass::II: return suff ? Theorem::T2_suff : Theorem::T2_nec;
        case TailClass::III: return suff ? Theorem::T3_suff : Theorem::T3_nec;
        case TailClass::IV: return suff ? Theorem::T4_suff : Theorem::T4_nec;
    }
    return Theorem::T1_suff;
}

void validate(const ExperimentConfig& c) {
    validate(c.spec);
    if (c.n_grid.empty() && c.log_n_grid.empty()) throw SpecificationError("n_grid (or log_n_grid) must not be empty");
    if (!c.n_grid.empty() && !c.log_n_grid.empty())
        throw SpecificationError("give either n_grid or log_n_grid, not both");
    for (std::size_t i = 1; i < c.n_grid.size(); ++i)
        if (!(c.n_grid[i] > c.n_grid[i - 1])) throw SpecificationError("n_grid must be strictly increasing");
    for (std::size_t i = 1; i < c.log_n_grid.size(); ++i)
        if (!(c.log_n_grid[i] > c.log_n_grid[i - 1])) throw SpecificationError("log_n_grid must be strictly increasing");
    for (auto n : c.n_grid)
        if (n < 2) throw SpecificationError("n_grid entries must be >= 2");
    for (auto l : c.log_n_grid)
        if (!(l >= std::log(2.0) && std::isfinite(l))) throw SpecificationError("log_n_grid entries must be >= log 2");
    const bool simulates = c.experiment == ExperimentKind::sufficiency ||
                           c.experiment == ExperimentKind::zone_diagnostics ||
                           (c.experiment == ExperimentKind::necessity && c.reps > 0);
    if (simulates) {
        if (c.reps < 1000) throw SpecificationError("reps must be >= 1000 for simulation experiments");
        if (c.n_grid.empty()) throw SpecificationError("simulation experiments need an integer n_grid");
    }
    if (c.theorem && theorem_class(*c.theorem) != c.spec.class_id)
        throw SpecificationError(std::string("theorem ") + to_string(*c.theorem) + " does not match spec class " +
                                 to_string(c.spec.class_id));
    if (c.experiment == ExperimentKind::example_cases) {
        if (c.spec.form != TailForm::example) throw SpecificationError("example_cases needs spec form 'example'");
        if (c.etas.size() != c.kappas.size()) throw SpecificationError("etas and kappas must have equal length");
    }
    if (c.grid_size < 1) throw SpecificationError("grid_size must be >= 1");
    if (c.b_coeff && !(*c.b_coeff >= 0.0)) throw SpecificationError("b_coeff must be >= 0");
    if (c.log_p && !(*c.log_p >= 0.0)) throw SpecificationError("log_p must be >= 0");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::map<std::string, std::string> spec_kv;
    std::string section;
    std::set<std::string> seen;
    std::istringstream in(text);
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        // '#' starts a comment unless inside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "config line " + std::to_string(lineno) + ": ";
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            if (section != "spec" && section != "thresholds")
                throw SpecificationError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SpecificationError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        if (!seen.insert(full).second) throw SpecificationError(where + "duplicate key '" + full + "'");
        if (section == "spec") {
            spec_kv[key] = (val.size() >= 2 && val.front() == '"') ? to_text(key, val) : val;
            continue;
        }
        if (section == "thresholds") {
            Thresholds& t = c.thresholds;
            double* slot = key == "rho_final_max"    ? &t.rho_final_max
                           : key == "rho_ratio_max"  ? &t.rho_ratio_max
                           : key == "b_band"         ? &t.b_band
                           : key == "decay_log_max"  ? &t.decay_log_max
                           : key == "max_sim_prob"   ? &t.max_sim_prob
                           : key == "phi_check_tol"  ? &t.phi_check_tol
                           : key == "simulate_max_p" ? &t.simulate_max_p
                           : key == "zone_ratio_se"  ? &t.zone_ratio_se
                                                     : nullptr;
            if (!slot) throw SpecificationError(where + "unknown key 'thresholds." + key + "'");
            *slot = to_number(key, val);
            continue;
        }
        if (key == "experiment") c.experiment = parse_experiment(to_text(key, val));
        else if (key == "theorem") c.theorem = parse_theorem(to_text(key, val));
        else if (key == "n_grid") {
            for (const auto& s : to_list(key, val)) c.n_grid.push_back(to_count(key, s));
        } else if (key == "log_n_grid") {
            for (const auto& s : to_list(key, val)) c.log_n_grid.push_back(to_number(key, s));
        } else if (key == "epsilon") c.epsilon = to_number(key, val);
        else if (key == "reps") c.reps = to_count(key, val);
        else if (key == "seed") c.seed = to_count(key, val);
        else if (key == "output_dir") c.output_dir = to_text(key, val);
        else if (key == "format") {
            const std::string f = to_text(key, val);
            if (f == "csv") c.format = OutputFormat::csv;
            else if (f == "json") c.format = OutputFormat::json;
            else throw SpecificationError(where + "format must be \"csv\" or \"json\"");
        } else if (key == "workers") c.workers = static_cast<unsigned>(to_count(key, val));
        else if (key == "grid_size") c.grid_size = static_cast<int>(to_count(key, val));
        else if (key == "b_coeff") c.b_coeff = to_number(key, val);
        else if (key == "log_p") c.log_p = to_number(key, val);
        else if (key == "cache_dir") c.cache_dir = to_text(key, val);
        else if (key == "etas") {
            for (const auto& s : to_list(key, val)) c.etas.push_back(to_number(key, s));
        } else if (key == "kappas") {
            for (const auto& s : to_list(key, val)) c.kappas.push_back(to_number(key, s));
        } else throw SpecificationError(where + "unknown key '" + key + "'");
    }
    c.spec = spec_from_map(spec_kv);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "experiment = " << quote(to_string(c.experiment)) << "\n";
    if (c.theorem) os << "theorem = " << quote(to_string(*c.theorem)) << "\n";
    if (!c.n_grid.empty()) os << "n_grid = " << list_text(c.n_grid) << "\n";
    if (!c.log_n_grid.empty()) os << "log_n_grid = " << list_text(c.log_n_grid) << "\n";
    os << "epsilon = " << fmt(c.epsilon) << "\n";
    os << "reps = " << c.reps << "\n";
    os << "seed = " << c.seed << "\n";
    os << "output_dir = " << quote(c.output_dir) << "\n";
    os << "format = " << quote(c.format == OutputFormat::csv ? "csv" : "json") << "\n";
    os << "workers = " << c.workers << "\n";
    os << "grid_size = " << c.grid_size << "\n";
    if (c.b_coeff) os << "b_coeff = " << fmt(*c.b_coeff) << "\n";
    if (c.log_p) os << "log_p = " << fmt(*c.log_p) << "\n";
    if (!c.cache_dir.empty()) os << "cache_dir = " << quote(c.cache_dir) << "\n";
    if (!c.etas.empty()) os << "etas = " << list_text(c.etas) << "\nkappas = " << list_text(c.kappas) << "\n";
    os << "\n[spec]\n";
    for (const auto& [k, v] : spec_to_map(c.spec))
        os << k << " = " << (k == "class" || k == "form" ? quote(v) : v) << "\n";
    const Thresholds& t = c.thresholds;
    os << "\n[thresholds]\n"
       << "rho_final_max = " << fmt(t.rho_final_max) << "\n"
       << "rho_ratio_max = " << fmt(t.rho_ratio_max) << "\n"
       << "b_band = " << fmt(t.b_band) << "\n"
       << "decay_log_max = " << fmt(t.decay_log_max) << "\n"
       << "max_sim_prob = " << fmt(t.max_sim_prob) << "\n"
       << "phi_check_tol = " << fmt(t.phi_check_tol) << "\n"
       << "simulate_max_p = " << fmt(t.simulate_max_p) << "\n"
       << "zone_ratio_se = " << fmt(t.zone_ratio_se) << "\n";
    return os.str();
}

}  // namespace hdclt
