#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

/// Shared Monte Carlo study parameters. lambda(eps) = eps^(-a) with
/// 0 < a < 1/2, so the deviation scale grows while sqrt(eps)*lambda(eps)
/// vanishes along the epsilon grid; validated up front.
struct StudyConfig {
    std::string preset = "burgers";
    std::string initial = "sine";  // "sine" -> sin(pi x), or "zero"
    int nx = 63;
    int nt = 4096;
    double horizon_T = 0.1;
    std::vector<double> epsilon_grid;
    double lambda_exponent_a = 0.2;
    int replicas = 200;
    double delta_threshold = 0.01;  // the exceedance level of the CLT study
    double moment_p = 2.0;
    double radius_r = 0.2;  // terminal-norm event radius of the MDP study
    std::uint64_t base_seed = 0;
    int threads = 0;  // <= 0 picks the hardware count; never affects results

    friend bool operator==(const StudyConfig&, const StudyConfig&) = default;
};

void validate_study_config(const StudyConfig& cfg);  // throws ConfigError

double lambda_of_epsilon(double epsilon, double exponent_a);
Profile initial_profile(const StudyConfig& cfg, const SpaceTimeGrid& grid);

struct SeriesRow {
    double epsilon = 0.0;   // index column: epsilon, or n for the probe study
    double lambda = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    long n_effective = 0;

    friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

struct Series {
    std::string name;
    std::vector<SeriesRow> rows;
    double slope = 0.0;      // least-squares fit of log(estimate) vs log(index)
    double intercept = 0.0;
    double r_squared = 0.0;
    bool fit_valid = false;

    friend bool operator==(const Series&, const Series&) = default;
};

struct ScalingReport {
    std::string study;
    StudyConfig config;
    std::vector<Series> series;
    std::vector<std::pair<std::string, bool>> flags;
    std::map<std::string, double> scalars;
    std::vector<long> divergent_counts;  // per epsilon

    const Series* find_series(std::string_view name) const;
    bool flag(std::string_view name) const;

    friend bool operator==(const ScalingReport&, const ScalingReport&) = default;
};

/// Monte Carlo check of the central limit behaviour: with a common noise per
/// replica, solves u^eps, u0, Y and records sup_t ||(u^eps-u0)/sqrt(eps) - Y||_H
/// and the terminal norm ||Z^eps(T)||_H per epsilon. Reports the exceedance
/// probability of delta_threshold and the log-log slope of the mean terminal
/// norm (expected 1/2).
ScalingReport run_clt_study(const StudyConfig& cfg);

/// Scaling of E int |u^eps(T) - u0(T)|^p dx against eps^(p/2).
ScalingReport run_moment_scaling(const StudyConfig& cfg);

/// Moderate-deviation probe: X^eps = (u^eps - u0)/(sqrt(eps) lambda(eps));
/// estimates P(||X^eps(T)||_H >= r) and compares -(1/lambda^2) log P against
/// the Gaussian least-energy value r^2/(2 q_1) for the additive set.
ScalingReport run_mdp_study(const StudyConfig& cfg);

/// Mean sup_t ||Xbar^{eps,h} - X^h||_H per epsilon for a fixed control h;
/// expected to decrease as eps -> 0.
ScalingReport run_controlled_convergence(const StudyConfig& cfg, const Control& h);

enum class ProbeAxis { time, space };

/// Weak-continuity probe of the control-to-state map: perturbs h by
/// amplitude * sin(2 pi n s) (time axis) or amplitude * sin(2 pi n y) (space
/// axis, i.e. heat mode 2n) for n = 1..n_max and reports
/// sup_t ||X^{h_n} - X^h||_H per n. Both families are weakly null; the space
/// axis decays like 1/n^2 through the mode damping, the time axis like 1/n.
ScalingReport run_weak_continuity_probe(const StudyConfig& cfg, const Control& h, int n_max,
                                        ProbeAxis axis = ProbeAxis::time, double amplitude = 1.0);

}  // namespace spdelab
