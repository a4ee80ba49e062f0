#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hdclt/errors.hpp"
#include "hdclt/experiment.hpp"

namespace hdclt {

namespace {

using nlohmann::json;

std::string num(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Non-finite values become strings so that the JSON stays standard.
json jnum(double v) {
    if (std::isfinite(v)) return v;
    return num(v);
}

double from_jnum(const json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw SpecificationError("bad number '" + s + "' in result JSON");
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
    if (extras.size() != o.extras.size()) return false;
    for (const auto& [k, v] : extras) {
        const auto it = o.extras.find(k);
        if (it == o.extras.end() || !same(v, it->second)) return false;
    }
    return same(n, o.n) && same(log_n, o.log_n) && same(log_p, o.log_p) && same(scaling, o.scaling) &&
           same(rho_max_hat, o.rho_max_hat) && same(mc_se, o.mc_se) && same(b_hat, o.b_hat) &&
           same(A1, o.A1) && same(A2, o.A2) && same(A3, o.A3) && same(A, o.A) &&
           same(necessity_log_decay, o.necessity_log_decay) && verdict == o.verdict;
}

std::string to_csv(const ExperimentResult& r) {
    std::string s = "n,log_p,scaling,rho_max_hat,mc_se,b_hat,A1,A2,A3,A,necessity_log_decay,verdict\n";
    for (const ResultRow& w : r.rows) {
        for (double v : {w.n, w.log_p, w.scaling, w.rho_max_hat, w.mc_se, w.b_hat, w.A1, w.A2, w.A3, w.A,
                         w.necessity_log_decay})
            s += num(v) + ",";
        s += w.verdict + "\n";
    }
    return s;
}

std::string to_json(const ExperimentResult& r) {
    json j;
    j["version"] = r.version;
    j["config"] = to_config_text(r.config);
    j["verdict"] = r.verdict;
    j["wall_time"] = r.wall_time;
    j["metadata"] = r.metadata;
    json rows = json::array();
    for (const ResultRow& w : r.rows) {
        json o;
        o["n"] = jnum(w.n);
        o["log_n"] = jnum(w.log_n);
        o["log_p"] = jnum(w.log_p);
        o["scaling"] = jnum(w.scaling);
        o["rho_max_hat"] = jnum(w.rho_max_hat);
        o["mc_se"] = jnum(w.mc_se);
        o["b_hat"] = jnum(w.b_hat);
        o["A1"] = jnum(w.A1);
        o["A2"] = jnum(w.A2);
        o["A3"] = jnum(w.A3);
        o["A"] = jnum(w.A);
        o["necessity_log_decay"] = jnum(w.necessity_log_decay);
        o["verdict"] = w.verdict;
        json ex = json::object();
        for (const auto& [k, v] : w.extras) ex[k] = jnum(v);
        o["extras"] = ex;
        rows.push_back(o);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

ExperimentResult result_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentResult r;
    r.version = j.at("version").get<std::string>();
    r.config = parse_config(j.at("config").get<std::string>());
    r.verdict = j.at("verdict").get<std::string>();
    r.wall_time = j.at("wall_time").get<double>();
    r.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    for (const json& o : j.at("rows")) {
        ResultRow w;
        w.n = from_jnum(o.at("n"));
        w.log_n = from_jnum(o.at("log_n"));
        w.log_p = from_jnum(o.at("log_p"));
        w.scaling = from_jnum(o.at("scaling"));
        w.rho_max_hat = from_jnum(o.at("rho_max_hat"));
        w.mc_se = from_jnum(o.at("mc_se"));
        w.b_hat = from_jnum(o.at("b_hat"));
        w.A1 = from_jnum(o.at("A1"));
        w.A2 = from_jnum(o.at("A2"));
        w.A3 = from_jnum(o.at("A3"));
        w.A = from_jnum(o.at("A"));
        w.necessity_log_decay = from_jnum(o.at("necessity_log_decay"));
        w.verdict = o.at("verdict").get<std::string>();
        for (const auto& [k, v] : o.at("extras").items()) w.extras[k] = from_jnum(v);
        r.rows.push_back(w);
    }
    return r;
}

std::string to_plot_data(const ExperimentResult& r) {
    std::string s = "# n rho_max_hat\n";
    for (const ResultRow& w : r.rows) s += num(w.n) + " " + num(w.rho_max_hat) + "\n";
    return s;
}

std::vector<std::string> emit_report(const ExperimentResult& r, OutputFormat format) {
    namespace fs = std::filesystem;
    const fs::path dir = r.config.output_dir.empty() ? fs::path(".") : fs::path(r.config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    const std::string stem = to_string(r.config.experiment);
    const fs::path main = dir / (stem + (format == OutputFormat::csv ? ".csv" : ".json"));
    const fs::path plot = dir / (stem + "_plot.dat");
    write_file(main.string(), format == OutputFormat::csv ? to_csv(r) : to_json(r));
    write_file(plot.string(), to_plot_data(r));
    return {main.string(), plot.string()};
}

}  // namespace hdclt
