#pragma once

#include <stdexcept>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/solver.hpp"

namespace spdelab {

/// Output of the least-norm control recovery for a terminal target profile:
/// the minimizer h*, its cost (1/2)||h*||^2, the achieved forward residual
/// ||X^{h*}(T) - target||_H, and the iteration count of the normal-equation
/// solve.
struct RateResult {
    Control control_star;
    double rate_value = 0.0;
    double forward_residual = 0.0;
    int cg_iterations = 0;
    std::vector<double> residual_history;
};

/// Terminal multiplier and the adjoint trajectory it propagates backwards.
struct AdjointState {
    Profile multiplier;
    Field backward_field;  // level n holds z_n, n = 1..nt; level 0 unused
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::string what, RateResult best)
        : std::runtime_error(std::move(what)), best_(std::move(best)) {}
    const RateResult& best() const noexcept { return best_; }

private:
    RateResult best_;
};

/// Forward map L: h -> X^h(T), the terminal slice of the skeleton solution.
/// Exactly linear in h.
Profile apply_forward(const Control& h, const PathResult& u0_path, const CoefficientSet& coeffs,
                      const SpaceTimeGrid& grid);

/// Backward recursion through the exact transposes of the forward step
/// operators; used by apply_adjoint.
AdjointState compute_adjoint_state(const Profile& mu, const PathResult& u0_path,
                                   const CoefficientSet& coeffs, const SpaceTimeGrid& grid);

/// Adjoint map L*: mu -> sigma(u0) * (adjoint field), a control. Satisfies
/// <L h, mu>_H = <h, L* mu>_{L^2(dt dx)} to rounding for every h, mu.
Control apply_adjoint(const Profile& mu, const PathResult& u0_path, const CoefficientSet& coeffs,
                      const SpaceTimeGrid& grid);

/// Least-norm control reaching `target` at time T through the skeleton map:
/// solves (L L*) mu = target for the dual variable by a conjugate-residual
/// iteration (residual norm nonincreasing by construction) and returns
/// h* = L* mu, which is the minimal-norm preimage because it lies in the
/// range of the adjoint. A diagonal eigenmode preconditioner is applied for
/// the additive coefficient set. Throws NonConvergenceError (carrying the
/// best iterate) if the residual is still above tol after max_iter steps.
RateResult min_norm_control(const Profile& target, const PathResult& u0_path,
                            const CoefficientSet& coeffs, const SpaceTimeGrid& grid, double tol,
                            int max_iter);

/// Variance accumulated by heat mode k over [0,T] under unit forcing:
/// q_k = (1 - exp(-2 k^2 pi^2 T)) / (2 k^2 pi^2).
double gaussian_mode_variance(double horizon_T, int k);

/// Closed-form rate for the additive set (b = g = 0, sigma = 1):
/// (1/2) sum_k phi_k^2 / q_k with phi_k the sqrt(2) sin(k pi x) coefficients
/// of the target. Independent of the discrete forward map; used as an oracle.
double gaussian_rate_oracle(const CoefficientSet& coeffs, const Profile& target, double horizon_T,
                            int modes);

}  // namespace spdelab
