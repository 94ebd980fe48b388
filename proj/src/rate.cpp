#include "spdelab/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace spdelab {

namespace {

using detail::SkeletonStepper;

// Terminal slice of the skeleton map, stepping in place. Same arithmetic as
// solve_skeleton, which also drives one forward_step per time level.
std::vector<double> forward_terminal(const SkeletonStepper& stepper,
                                     const std::vector<double>& control_values) {
    const auto& grid = stepper.grid();
    std::vector<double> x(grid.nx, 0.0), next(grid.nx);
    for (int n = 0; n < grid.nt; ++n) {
        stepper.forward_step(n, x, &control_values[static_cast<std::size_t>(n) * grid.nx], next);
        x.swap(next);
    }
    return x;
}

std::vector<double> adjoint_control(const SkeletonStepper& stepper,
                                    const std::vector<double>& mu) {
    const auto& grid = stepper.grid();
    const int nx = grid.nx;
    std::vector<double> z(mu), next(nx);
    stepper.solve_mass(z);  // z_N
    std::vector<double> out(grid.cells());
    for (int m = grid.nt - 1; m >= 0; --m) {
        const double* sg = stepper.tables().sigma.data() + static_cast<std::size_t>(m) * nx;
        double* row = out.data() + static_cast<std::size_t>(m) * nx;
        for (int i = 0; i < nx; ++i) row[i] = sg[i] * z[i];
        if (m > 0) {
            stepper.adjoint_step(m, z, next);
            z.swap(next);
        }
    }
    return out;
}

// Diagonal preconditioner in the sine eigenbasis; the basis is exactly
// H-orthonormal on the lattice, and the mode variances q_k are the additive
// normal-equation eigenvalues up to discretization.
class ModePreconditioner {
public:
    ModePreconditioner(const SpaceTimeGrid& grid, bool active) : grid_(grid), active_(active) {
        if (!active_) return;
        const int nx = grid.nx;
        basis_.resize(static_cast<std::size_t>(nx) * nx);
        inv_q_.resize(nx);
        for (int k = 1; k <= nx; ++k) {
            inv_q_[k - 1] = 1.0 / gaussian_mode_variance(grid.horizon_T, k);
            for (int i = 0; i < nx; ++i)
                basis_[static_cast<std::size_t>(k - 1) * nx + i] =
                    std::sqrt(2.0) * std::sin(k * std::numbers::pi * grid.x(i));
        }
    }

    std::vector<double> apply(const std::vector<double>& r) const {
        if (!active_) return r;
        const int nx = grid_.nx;
        std::vector<double> out(nx, 0.0);
        for (int k = 0; k < nx; ++k) {
            const double* e = &basis_[static_cast<std::size_t>(k) * nx];
            double c = 0.0;
            for (int i = 0; i < nx; ++i) c += e[i] * r[i];
            c *= grid_.dx * inv_q_[k];
            for (int i = 0; i < nx; ++i) out[i] += c * e[i];
        }
        return out;
    }

private:
    SpaceTimeGrid grid_;
    bool active_;
    std::vector<double> basis_;
    std::vector<double> inv_q_;
};

}  // namespace

Profile apply_forward(const Control& h, const PathResult& u0_path, const CoefficientSet& coeffs,
                      const SpaceTimeGrid& grid) {
    return solve_skeleton(u0_path, coeffs, grid, h).field.profile(grid.nt);
}

AdjointState compute_adjoint_state(const Profile& mu, const PathResult& u0_path,
                                   const CoefficientSet& coeffs, const SpaceTimeGrid& grid) {
    if (!same_grid(mu.grid, grid)) throw std::invalid_argument("compute_adjoint_state: grid mismatch");
    const SkeletonStepper stepper(grid, detail::evaluate_linearized_coeffs(u0_path, coeffs, grid));
    AdjointState state{mu, Field(grid)};
    std::vector<double> z(mu.values), next(grid.nx);
    stepper.solve_mass(z);
    std::copy(z.begin(), z.end(), state.backward_field.at(grid.nt).begin());
    for (int m = grid.nt - 1; m >= 1; --m) {
        stepper.adjoint_step(m, z, next);
        z.swap(next);
        std::copy(z.begin(), z.end(), state.backward_field.at(m).begin());
    }
    return state;
}

Control apply_adjoint(const Profile& mu, const PathResult& u0_path, const CoefficientSet& coeffs,
                      const SpaceTimeGrid& grid) {
    if (!same_grid(mu.grid, grid)) throw std::invalid_argument("apply_adjoint: grid mismatch");
    const SkeletonStepper stepper(grid, detail::evaluate_linearized_coeffs(u0_path, coeffs, grid));
    return Control(grid, adjoint_control(stepper, mu.values));
}

RateResult min_norm_control(const Profile& target, const PathResult& u0_path,
                            const CoefficientSet& coeffs, const SpaceTimeGrid& grid, double tol,
                            int max_iter) {
    if (!same_grid(target.grid, grid)) throw std::invalid_argument("min_norm_control: grid mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("min_norm_control: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("min_norm_control: max_iter must be >= 1");

    const SkeletonStepper stepper(grid, detail::evaluate_linearized_coeffs(u0_path, coeffs, grid));
    const ModePreconditioner prec(grid, coeffs.label == "additive");

    auto normal_apply = [&](const std::vector<double>& mu) {
        return forward_terminal(stepper, adjoint_control(stepper, mu));
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        return h_inner(grid, a, b);
    };

    auto package = [&](const std::vector<double>& mu, int iterations,
                       std::vector<double> history) {
        Control h_star(grid, adjoint_control(stepper, mu));
        const std::vector<double> reached = forward_terminal(stepper, h_star.values);
        double acc = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            const double d = reached[i] - target.values[i];
            acc += d * d;
        }
        RateResult result{std::move(h_star), 0.0, std::sqrt(acc * grid.dx), iterations,
                          std::move(history)};
        result.rate_value = control_objective(result.control_star);
        return result;
    };

    std::vector<double> mu(grid.nx, 0.0);
    std::vector<double> r(target.values);
    std::vector<double> history{h_norm(grid, r)};
    if (history.back() <= tol) return package(mu, 0, std::move(history));

    // Conjugate residuals on the dual normal equations (L L*) mu = target.
    std::vector<double> z = prec.apply(r);
    std::vector<double> p = z;
    std::vector<double> az = normal_apply(z);
    std::vector<double> ap = az;
    double zaz = dot(z, az);

    for (int iter = 1; iter <= max_iter; ++iter) {
        const std::vector<double> w = prec.apply(ap);
        const double denom = dot(ap, w);
        if (!(denom > 0.0) || !(zaz > 0.0)) break;  // stagnation: numerically singular
        const double alpha = zaz / denom;
        for (int i = 0; i < grid.nx; ++i) {
            mu[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] -= alpha * w[i];
        }
        history.push_back(h_norm(grid, r));
        if (history.back() <= tol) return package(mu, iter, std::move(history));
        az = normal_apply(z);
        const double zaz_next = dot(z, az);
        const double beta = zaz_next / zaz;
        zaz = zaz_next;
        for (int i = 0; i < grid.nx; ++i) {
            p[i] = z[i] + beta * p[i];
            ap[i] = az[i] + beta * ap[i];
        }
    }

    RateResult best = package(mu, static_cast<int>(history.size()) - 1, std::move(history));
    const double final_residual = best.forward_residual;
    throw NonConvergenceError("min_norm_control: residual " + std::to_string(final_residual) +
                                  " above tol " + std::to_string(tol) + " after " +
                                  std::to_string(best.cg_iterations) + " iterations",
                              std::move(best));
}

double gaussian_mode_variance(double horizon_T, int k) {
    const double mu = k * std::numbers::pi * k * std::numbers::pi;
    return (1.0 - std::exp(-2.0 * mu * horizon_T)) / (2.0 * mu);
}

double gaussian_rate_oracle(const CoefficientSet& coeffs, const Profile& target, double horizon_T,
                            int modes) {
    if (coeffs.label != "additive")
        throw std::invalid_argument("gaussian_rate_oracle: requires the additive coefficient set");
    if (modes < 1) throw std::invalid_argument("gaussian_rate_oracle: modes must be >= 1");
    const SpaceTimeGrid& grid = target.grid;
    const int kmax = std::min(modes, grid.nx);
    double rate = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        double phi_k = 0.0;
        for (int i = 0; i < grid.nx; ++i)
            phi_k += target.values[i] * std::sqrt(2.0) * std::sin(k * std::numbers::pi * grid.x(i));
        phi_k *= grid.dx;
        rate += 0.5 * phi_k * phi_k / gaussian_mode_variance(horizon_T, k);
    }
    return rate;
}

}  // namespace spdelab
