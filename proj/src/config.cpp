#include "spdelab/config.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "spdelab/errors.hpp"
#include "spdelab/report.hpp"
#include "spdelab/solver.hpp"

namespace spdelab {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::clt: return "clt";
        case ExperimentKind::moment_scaling: return "moment_scaling";
        case ExperimentKind::mdp: return "mdp";
        case ExperimentKind::controlled: return "controlled";
        case ExperimentKind::weak_continuity: return "weak_continuity";
        case ExperimentKind::kernel_report: return "kernel_report";
        case ExperimentKind::rate_eval: return "rate_eval";
    }
    return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
    if (name == "clt") return ExperimentKind::clt;
    if (name == "moment_scaling") return ExperimentKind::moment_scaling;
    if (name == "mdp") return ExperimentKind::mdp;
    if (name == "controlled") return ExperimentKind::controlled;
    if (name == "weak_continuity") return ExperimentKind::weak_continuity;
    if (name == "kernel_report") return ExperimentKind::kernel_report;
    if (name == "rate_eval") return ExperimentKind::rate_eval;
    throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(key, "missing");
    return j.at(key);
}

double get_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(key, "must be a number");
    return j.at(key).get<double>();
}

long get_integer(const json& j, const std::string& key, long fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(key, "must be an integer");
    return j.at(key).get<long>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError(key, "must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> get_number_array(const json& j, const std::string& key) {
    const json& arr = require(j, key);
    if (!arr.is_array() || arr.empty()) throw ConfigError(key, "must be a nonempty array");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ConfigError(key, "entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

bool needs_epsilon_grid(ExperimentKind kind) {
    return kind == ExperimentKind::clt || kind == ExperimentKind::moment_scaling ||
           kind == ExperimentKind::mdp || kind == ExperimentKind::controlled;
}

bool is_study(ExperimentKind kind) {
    return kind != ExperimentKind::kernel_report;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
    RunConfig cfg;
    cfg.experiment = experiment_from_string(
        require(j, "experiment").is_string() ? j.at("experiment").get<std::string>()
                                             : throw ConfigError("experiment", "must be a string"));

    if (is_study(cfg.experiment)) {
        cfg.study.preset = get_string(j, "preset", cfg.study.preset);
        cfg.study.initial = get_string(j, "initial", cfg.study.initial);
        const json& grid = require(j, "grid");
        if (!grid.is_object()) throw ConfigError("grid", "must be an object {nx, nt, T}");
        cfg.study.nx = static_cast<int>(get_integer(grid, "nx", 0));
        if (cfg.study.nx == 0) throw ConfigError("grid.nx", "missing");
        cfg.study.nt = static_cast<int>(get_integer(grid, "nt", 0));
        if (cfg.study.nt == 0) throw ConfigError("grid.nt", "missing");
        cfg.study.horizon_T = get_number(grid, "T", 0.0);
        if (cfg.study.horizon_T == 0.0) throw ConfigError("grid.T", "missing");

        if (needs_epsilon_grid(cfg.experiment) || j.contains("epsilon_grid"))
            cfg.study.epsilon_grid = get_number_array(j, "epsilon_grid");
        else
            cfg.study.epsilon_grid = {1e-2};  // unused by this experiment

        cfg.study.lambda_exponent_a = get_number(j, "lambda_exponent_a", cfg.study.lambda_exponent_a);
        cfg.study.replicas = static_cast<int>(get_integer(j, "replicas", cfg.study.replicas));
        cfg.study.delta_threshold = get_number(j, "delta", cfg.study.delta_threshold);
        cfg.study.moment_p = get_number(j, "p", cfg.study.moment_p);
        cfg.study.radius_r = get_number(j, "r", cfg.study.radius_r);
        cfg.study.base_seed = static_cast<std::uint64_t>(get_integer(j, "base_seed", 0));
        cfg.study.threads = static_cast<int>(get_integer(j, "threads", 0));
        validate_study_config(cfg.study);
    }

    if (j.contains("control")) {
        const json& c = j.at("control");
        if (!c.is_object()) throw ConfigError("control", "must be an object");
        cfg.control_amplitude = get_number(c, "amplitude", cfg.control_amplitude);
        if (c.contains("normalize")) {
            if (!c.at("normalize").is_boolean()) throw ConfigError("control.normalize", "must be a bool");
            cfg.control_normalize = c.at("normalize").get<bool>();
        }
    }

    if (j.contains("probe")) {
        const json& p = j.at("probe");
        if (!p.is_object()) throw ConfigError("probe", "must be an object");
        cfg.probe_n_max = static_cast<int>(get_integer(p, "n_max", cfg.probe_n_max));
        cfg.probe_axis = get_string(p, "axis", cfg.probe_axis);
        if (cfg.probe_axis != "time" && cfg.probe_axis != "space")
            throw ConfigError("probe.axis", "must be 'time' or 'space'");
        cfg.probe_amplitude = get_number(p, "amplitude", cfg.probe_amplitude);
        if (cfg.probe_n_max < 1) throw ConfigError("probe.n_max", "must be >= 1");
    }

    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        if (!k.is_object()) throw ConfigError("kernel", "must be an object");
        cfg.kernel_boundary = get_string(k, "boundary", cfg.kernel_boundary);
        if (cfg.kernel_boundary != "dirichlet" && cfg.kernel_boundary != "free_space")
            throw ConfigError("kernel.boundary", "must be 'dirichlet' or 'free_space'");
        cfg.kernel_truncation = static_cast<int>(get_integer(k, "truncation", cfg.kernel_truncation));
        if (cfg.kernel_truncation < 1) throw ConfigError("kernel.truncation", "must be >= 1");
        if (k.contains("t_samples")) cfg.kernel_t_samples = get_number_array(k, "t_samples");
        if (k.contains("x_samples")) cfg.kernel_x_samples = get_number_array(k, "x_samples");
        for (double t : cfg.kernel_t_samples)
            if (!(t > 0.0)) throw ConfigError("kernel.t_samples", "entries must be > 0");
    }

    if (j.contains("rate")) {
        const json& r = j.at("rate");
        if (!r.is_object()) throw ConfigError("rate", "must be an object");
        if (r.contains("target_modes")) {
            cfg.rate_target_modes.clear();
            for (const auto& v : r.at("target_modes")) {
                if (!v.is_number_integer()) throw ConfigError("rate.target_modes", "must be integers");
                cfg.rate_target_modes.push_back(v.get<int>());
            }
        }
        if (r.contains("target_coeffs")) cfg.rate_target_coeffs = get_number_array(r, "target_coeffs");
        if (cfg.rate_target_modes.size() != cfg.rate_target_coeffs.size())
            throw ConfigError("rate.target_coeffs", "must match target_modes in length");
        for (int m : cfg.rate_target_modes)
            if (m < 1) throw ConfigError("rate.target_modes", "modes must be >= 1");
        cfg.rate_tol = get_number(r, "tol", cfg.rate_tol);
        if (!(cfg.rate_tol > 0.0)) throw ConfigError("rate.tol", "must be > 0");
        cfg.rate_max_iter = static_cast<int>(get_integer(r, "max_iter", cfg.rate_max_iter));
        if (cfg.rate_max_iter < 1) throw ConfigError("rate.max_iter", "must be >= 1");
    }

    cfg.out_dir = get_string(j, "out_dir", cfg.out_dir);
    if (j.contains("formats")) {
        cfg.formats.clear();
        for (const auto& v : j.at("formats")) {
            if (!v.is_string()) throw ConfigError("formats", "must be strings");
            const std::string f = v.get<std::string>();
            if (f != "csv" && f != "json") throw ConfigError("formats", "must be 'csv' or 'json'");
            cfg.formats.push_back(f);
        }
        if (cfg.formats.empty()) throw ConfigError("formats", "must be nonempty");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("JSON parse error: ") + e.what());
    }
    return parse_run_config(j);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.experiment);
    j["preset"] = cfg.study.preset;
    j["initial"] = cfg.study.initial;
    j["grid"] = {{"nx", cfg.study.nx}, {"nt", cfg.study.nt}, {"T", cfg.study.horizon_T}};
    j["epsilon_grid"] = cfg.study.epsilon_grid;
    j["lambda_exponent_a"] = cfg.study.lambda_exponent_a;
    j["replicas"] = cfg.study.replicas;
    j["delta"] = cfg.study.delta_threshold;
    j["p"] = cfg.study.moment_p;
    j["r"] = cfg.study.radius_r;
    j["base_seed"] = cfg.study.base_seed;
    j["threads"] = cfg.study.threads;
    j["control"] = {{"amplitude", cfg.control_amplitude}, {"normalize", cfg.control_normalize}};
    j["probe"] = {{"n_max", cfg.probe_n_max},
                  {"axis", cfg.probe_axis},
                  {"amplitude", cfg.probe_amplitude}};
    j["kernel"] = {{"boundary", cfg.kernel_boundary},
                   {"truncation", cfg.kernel_truncation},
                   {"t_samples", cfg.kernel_t_samples},
                   {"x_samples", cfg.kernel_x_samples}};
    j["rate"] = {{"target_modes", cfg.rate_target_modes},
                 {"target_coeffs", cfg.rate_target_coeffs},
                 {"tol", cfg.rate_tol},
                 {"max_iter", cfg.rate_max_iter}};
    j["out_dir"] = cfg.out_dir;
    j["formats"] = cfg.formats;
    return j;
}

namespace {

Control constant_control(const RunConfig& cfg, const SpaceTimeGrid& grid) {
    // normalize against the measured lattice quadrature so the squared
    // L^2 norm comes out as amplitude^2 exactly
    Control h = make_control(grid, [](double, double) { return 1.0; });
    const double scale = cfg.control_normalize
                             ? cfg.control_amplitude / std::sqrt(2.0 * h.energy())
                             : cfg.control_amplitude;
    for (auto& v : h.values) v *= scale;
    return h;
}

}  // namespace

std::vector<std::filesystem::path> execute_run(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    switch (cfg.experiment) {
        case ExperimentKind::clt:
            return emit_report(run_clt_study(cfg.study), dir, cfg.formats);
        case ExperimentKind::moment_scaling:
            return emit_report(run_moment_scaling(cfg.study), dir, cfg.formats);
        case ExperimentKind::mdp:
            return emit_report(run_mdp_study(cfg.study), dir, cfg.formats);
        case ExperimentKind::controlled: {
            const auto grid = make_grid(cfg.study.nx, cfg.study.nt, cfg.study.horizon_T);
            return emit_report(run_controlled_convergence(cfg.study, constant_control(cfg, grid)),
                               dir, cfg.formats);
        }
        case ExperimentKind::weak_continuity: {
            const auto grid = make_grid(cfg.study.nx, cfg.study.nt, cfg.study.horizon_T);
            const auto axis = cfg.probe_axis == "space" ? ProbeAxis::space : ProbeAxis::time;
            return emit_report(run_weak_continuity_probe(cfg.study, constant_control(cfg, grid),
                                                         cfg.probe_n_max, axis, cfg.probe_amplitude),
                               dir, cfg.formats);
        }
        case ExperimentKind::kernel_report: {
            HeatKernel kernel{cfg.kernel_boundary == "free_space" ? KernelBoundary::free_space
                                                                  : KernelBoundary::dirichlet,
                              cfg.kernel_truncation};
            return emit_report(kernel_property_report(kernel, cfg.kernel_t_samples,
                                                      cfg.kernel_x_samples),
                               dir, cfg.formats);
        }
        case ExperimentKind::rate_eval: {
            const auto grid = make_grid(cfg.study.nx, cfg.study.nt, cfg.study.horizon_T);
            const auto coeffs = make_preset(cfg.study.preset);
            const auto f = initial_profile(cfg.study, grid);
            const auto u0 = solve_deterministic(f, coeffs, grid);
            Profile target = zero_profile(grid);
            for (std::size_t k = 0; k < cfg.rate_target_modes.size(); ++k)
                for (int i = 0; i < grid.nx; ++i)
                    target.values[i] += cfg.rate_target_coeffs[k] * std::sqrt(2.0) *
                                        std::sin(cfg.rate_target_modes[k] * std::numbers::pi * grid.x(i));
            const RateResult result =
                min_norm_control(target, u0, coeffs, grid, cfg.rate_tol, cfg.rate_max_iter);
            return emit_report(result, dir, cfg.formats);
        }
    }
    throw std::logic_error("execute_run: unhandled experiment");
}

int run_from_config(const std::filesystem::path& config_path, const std::string& out_override,
                    long seed_override, int threads_override) {
    try {
        RunConfig cfg = load_run_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_override >= 0) cfg.study.base_seed = static_cast<std::uint64_t>(seed_override);
        if (threads_override > 0) cfg.study.threads = threads_override;
        const auto files = execute_run(cfg);
        for (const auto& f : files) std::cout << f.string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergenceError& e) {
        std::cerr << "optimizer did not converge: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace spdelab
