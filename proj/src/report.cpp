#include "spdelab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace spdelab {

namespace {

using nlohmann::json;

bool wants(const std::vector<std::string>& formats, std::string_view f) {
    for (const auto& s : formats)
        if (s == f) return true;
    return false;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

json series_to_json(const Series& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"epsilon", r.epsilon},
                        {"lambda", r.lambda},
                        {"estimate", r.estimate},
                        {"std_error", r.std_error},
                        {"n_effective", r.n_effective}});
    return {{"name", s.name},      {"rows", rows},
            {"slope", s.slope},    {"intercept", s.intercept},
            {"r_squared", s.r_squared}, {"fit_valid", s.fit_valid}};
}

// Study parameters embedded in reports; deliberately excludes the thread
// count so outputs are identical for any worker count.
json study_config_to_json(const StudyConfig& cfg) {
    return {{"preset", cfg.preset},
            {"initial", cfg.initial},
            {"grid", {{"nx", cfg.nx}, {"nt", cfg.nt}, {"T", cfg.horizon_T}}},
            {"epsilon_grid", cfg.epsilon_grid},
            {"lambda_exponent_a", cfg.lambda_exponent_a},
            {"replicas", cfg.replicas},
            {"delta", cfg.delta_threshold},
            {"p", cfg.moment_p},
            {"r", cfg.radius_r},
            {"base_seed", cfg.base_seed}};
}

}  // namespace

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::filesystem::path> emit_report(const ScalingReport& report,
                                               const std::filesystem::path& directory,
                                               const std::vector<std::string>& formats) {
    std::vector<std::filesystem::path> written;
    if (wants(formats, "csv")) {
        for (const auto& s : report.series) {
            std::ostringstream csv;
            csv << "epsilon,lambda,estimate,std_error,n_effective\n";
            for (const auto& r : s.rows)
                csv << format_double(r.epsilon) << ',' << format_double(r.lambda) << ','
                    << format_double(r.estimate) << ',' << format_double(r.std_error) << ','
                    << r.n_effective << '\n';
            csv << "summary," << format_double(s.slope) << ',' << format_double(s.intercept)
                << ',' << format_double(s.r_squared) << ',' << (s.fit_valid ? 1 : 0) << '\n';
            const auto path = directory / (report.study + "_" + s.name + ".csv");
            write_text(path, csv.str());
            written.push_back(path);
        }
    }
    if (wants(formats, "json")) {
        json j;
        j["study"] = report.study;
        j["config"] = study_config_to_json(report.config);
        j["series"] = json::array();
        for (const auto& s : report.series) j["series"].push_back(series_to_json(s));
        json flags = json::object();
        for (const auto& [name, pass] : report.flags) flags[name] = pass;
        j["flags"] = flags;
        j["scalars"] = report.scalars;
        j["divergent_counts"] = report.divergent_counts;
        const auto path = directory / (report.study + ".json");
        write_text(path, j.dump(2) + "\n");
        written.push_back(path);
    }
    return written;
}

std::vector<std::filesystem::path> emit_report(const KernelReport& report,
                                               const std::filesystem::path& directory,
                                               const std::vector<std::string>& formats) {
    std::vector<std::filesystem::path> written;
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        csv << "name,measured,reference,defect,pass\n";
        for (const auto& c : report.checks)
            csv << c.name << ',' << format_double(c.measured) << ',' << format_double(c.reference)
                << ',' << format_double(c.defect) << ',' << (c.pass ? 1 : 0) << '\n';
        const auto path = directory / "kernel_report.csv";
        write_text(path, csv.str());
        written.push_back(path);
    }
    if (wants(formats, "json")) {
        json j;
        j["mass_defect"] = report.mass_defect;
        j["l2_mass_ratio"] = report.l2_mass_ratio;
        j["semigroup_defect"] = report.semigroup_defect;
        j["derivative_bound_margin"] = report.derivative_bound_margin;
        j["lp_moment_defects"] = report.lp_moment_defects;
        j["checks"] = json::array();
        for (const auto& c : report.checks)
            j["checks"].push_back({{"name", c.name},
                                   {"measured", c.measured},
                                   {"reference", c.reference},
                                   {"defect", c.defect},
                                   {"pass", c.pass}});
        const auto path = directory / "kernel_report.json";
        write_text(path, j.dump(2) + "\n");
        written.push_back(path);
    }
    return written;
}

std::vector<std::filesystem::path> emit_report(const RateResult& result,
                                               const std::filesystem::path& directory,
                                               const std::vector<std::string>& formats) {
    std::vector<std::filesystem::path> written;
    const auto& grid = result.control_star.grid;
    if (wants(formats, "csv")) {
        std::ostringstream csv;
        csv << "rate_value,forward_residual,cg_iterations,control_energy\n";
        csv << format_double(result.rate_value) << ',' << format_double(result.forward_residual)
            << ',' << result.cg_iterations << ','
            << format_double(result.control_star.energy()) << '\n';
        const auto path = directory / "rate_result.csv";
        write_text(path, csv.str());
        written.push_back(path);

        std::ostringstream ctl;
        for (int n = 0; n < grid.nt; ++n) {
            for (int i = 0; i < grid.nx; ++i) {
                if (i) ctl << ',';
                ctl << format_double(result.control_star.at(n, i));
            }
            ctl << '\n';
        }
        const auto cpath = directory / "rate_control.csv";
        write_text(cpath, ctl.str());
        written.push_back(cpath);
    }
    if (wants(formats, "json")) {
        json j;
        j["rate_value"] = result.rate_value;
        j["forward_residual"] = result.forward_residual;
        j["cg_iterations"] = result.cg_iterations;
        j["residual_history"] = result.residual_history;
        j["control"] = {{"nt", grid.nt}, {"nx", grid.nx}, {"values", result.control_star.values}};
        const auto path = directory / "rate_result.json";
        write_text(path, j.dump(2) + "\n");
        written.push_back(path);
    }
    return written;
}

Series parse_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    Series s;
    s.name = path.stem().string();
    std::string line;
    if (!std::getline(in, line) || line != "epsilon,lambda,estimate,std_error,n_effective")
        throw std::runtime_error("unexpected CSV header in '" + path.string() + "'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw std::runtime_error("malformed CSV row: " + line);
        if (cells[0] == "summary") {
            s.slope = std::stod(cells[1]);
            s.intercept = std::stod(cells[2]);
            s.r_squared = std::stod(cells[3]);
            s.fit_valid = cells[4] == "1";
            break;
        }
        SeriesRow r;
        r.epsilon = std::stod(cells[0]);
        r.lambda = std::stod(cells[1]);
        r.estimate = std::stod(cells[2]);
        r.std_error = std::stod(cells[3]);
        r.n_effective = std::stol(cells[4]);
        s.rows.push_back(r);
    }
    return s;
}

}  // namespace spdelab
