#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "spdelab/experiments.hpp"

namespace spdelab {

enum class ExperimentKind {
    clt,
    moment_scaling,
    mdp,
    controlled,
    weak_continuity,
    kernel_report,
    rate_eval
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);  // throws ConfigError

/// Full run description parsed from a JSON config file. All randomness flows
/// from study.base_seed; nothing reads ambient entropy.
struct RunConfig {
    ExperimentKind experiment = ExperimentKind::clt;
    StudyConfig study;

    // controlled: the fixed control h(s,y) = amplitude (normalized to unit
    // squared L^2 norm when normalize is set)
    double control_amplitude = 1.0;
    bool control_normalize = true;

    // weak_continuity
    int probe_n_max = 8;
    std::string probe_axis = "time";  // "time" or "space"
    double probe_amplitude = 1.0;

    // kernel_report
    std::string kernel_boundary = "dirichlet";
    int kernel_truncation = 64;
    std::vector<double> kernel_t_samples = {1e-3, 1e-2, 1e-1};
    std::vector<double> kernel_x_samples = {0.3, 0.5, 0.71};

    // rate_eval: target = sum_j coeffs[j] * sqrt(2) sin(modes[j] pi x)
    std::vector<int> rate_target_modes = {1};
    std::vector<double> rate_target_coeffs = {1.0};
    double rate_tol = 1e-8;
    int rate_max_iter = 200;

    std::string out_dir = ".";
    std::vector<std::string> formats = {"csv", "json"};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_run_config(const nlohmann::json& j);  // throws ConfigError
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& cfg);

/// Executes the configured experiment, writes reports under cfg.out_dir, and
/// returns the written file paths. Validation and non-convergence errors
/// propagate as exceptions.
std::vector<std::filesystem::path> execute_run(const RunConfig& cfg);

/// CLI entry: load, validate, execute; returns a process exit status.
int run_from_config(const std::filesystem::path& config_path, const std::string& out_override,
                    long seed_override, int threads_override);

}  // namespace spdelab
