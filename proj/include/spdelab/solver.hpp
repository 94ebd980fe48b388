#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

enum class FluxForm { centered_conservative, upwind };

/// Shared discretization for every equation solved here: theta-implicit
/// tridiagonal Laplacian (theta = 1 by default, unconditionally stable),
/// explicit reaction/flux/noise terms, lattice white noise read as
/// increment/dx per node. Because all solvers share one scheme and consume
/// noise increments in the same (time, space) order, pathwise couplings
/// between them hold to rounding, not just in distribution.
struct SchemeConfig {
    double theta = 1.0;
    FluxForm flux_form = FluxForm::centered_conservative;
    double epsilon = 0.0;  // noise intensity of the perturbed equation
    double lambda = 1.0;   // deviation scale of the controlled equation
    std::optional<double> stop_radius_R;
};

/// One solved trajectory with its exit-time diagnostic. exit_time_tau is the
/// first lattice time at which the H-norm exceeds stop_radius_R (horizon_T
/// when it never does); paths are recorded in full either way.
struct PathResult {
    Field field;
    double exit_time_tau = 0.0;
    std::vector<double> h_norms;  // nt+1 per-level H-norms
    SchemeConfig scheme;
    std::shared_ptr<const NoiseLattice> noise;  // set for stochastic solves
};

/// u0:  u_t = u_xx + b(t,x,u) + d_x g(t,x,u), u(0) = f, Dirichlet boundary.
PathResult solve_deterministic(const Profile& f, const CoefficientSet& coeffs,
                               const SpaceTimeGrid& grid, const SchemeConfig& scheme = {});

/// u^eps: adds sqrt(eps) * sigma(t,x,u) * dW to the deterministic equation.
PathResult solve_spde(const Profile& f, const CoefficientSet& coeffs, const SpaceTimeGrid& grid,
                      const SchemeConfig& scheme, const NoiseLattice& noise);

/// First-variation equation around u0, driven by the same noise:
///   Y_t = Y_xx + d_r b(u0) Y + d_x(d_r g(u0) Y) + sigma(u0) dW,  Y(0) = 0.
PathResult solve_linearized(const PathResult& u0_path, const CoefficientSet& coeffs,
                            const SpaceTimeGrid& grid, const SchemeConfig& scheme,
                            const NoiseLattice& noise);

/// Skeleton equation: the deterministic controlled linearization
///   X_t = X_xx + d_r b(u0) X + d_x(d_r g(u0) X) + sigma(u0) h,  X(0) = 0.
PathResult solve_skeleton(const PathResult& u0_path, const CoefficientSet& coeffs,
                          const SpaceTimeGrid& grid, const Control& h);

/// Controlled perturbation at deviation scale lambda:
///   Xbar_t = Xbar_xx + (1/lambda) sigma(u0 + a Xbar) dW + sigma(u0 + a Xbar) h
///          + [b(u0 + a Xbar) - b(u0)]/a + d_x([g(u0 + a Xbar) - g(u0)]/a),
/// with a = sqrt(eps)*lambda and Xbar(0) = 0. Recomputes u0 from f; the
/// overload below reuses a precomputed deterministic path.
PathResult solve_controlled(const Profile& f, const CoefficientSet& coeffs,
                            const SpaceTimeGrid& grid, const SchemeConfig& scheme,
                            const NoiseLattice& noise, const Control& h);
PathResult solve_controlled(const PathResult& u0_path, const CoefficientSet& coeffs,
                            const SpaceTimeGrid& grid, const SchemeConfig& scheme,
                            const NoiseLattice& noise, const Control& h);

/// C^2 test function with zero boundary values and analytic derivatives,
/// sampled on the interior nodes.
struct TestFunction {
    int mode = 1;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> d2phi;
};

/// The built-in sin(k pi x) family, k = 1..k_max.
std::vector<TestFunction> sine_test_functions(const SpaceTimeGrid& grid, int k_max);

/// Max over time levels and test functions of the residual of the weak form
///   (u(t),phi) = (u(0),phi) + int (u,phi'') + int (b(u),phi) - int (g(u),phi')
///              + sqrt(eps) int int sigma(u) phi dW.
/// Deterministic integrals use the trapezoidal rule in time; the stochastic
/// term is reconstructed from the stored noise when the path carries one.
double weak_form_residual(const PathResult& path, const CoefficientSet& coeffs,
                          std::span<const TestFunction> test_functions);

/// First lattice time with H-norm > R, else horizon_T.
double exit_time(const PathResult& path, double R);

namespace detail {

/// Constant-coefficient symmetric tridiagonal factorization of
/// M = I - theta*dt*Lap_h (Thomas algorithm, factored once per solve).
class TridiagFactor {
public:
    TridiagFactor() = default;
    TridiagFactor(int n, double diag, double off);
    void solve_in_place(std::span<double> x) const;

private:
    int n_ = 0;
    double off_ = 0.0;
    std::vector<double> upper_;      // eliminated superdiagonal ratios
    std::vector<double> inv_denom_;  // reciprocal pivots
};

/// d_r b, d_r g, sigma evaluated along a deterministic path, one row per time
/// step: the frozen coefficients of the linearized/skeleton equations.
struct LinearizedCoeffs {
    std::vector<double> db;     // nt * nx
    std::vector<double> dg;     // nt * nx
    std::vector<double> sigma;  // nt * nx
};

LinearizedCoeffs evaluate_linearized_coeffs(const PathResult& u0_path,
                                            const CoefficientSet& coeffs,
                                            const SpaceTimeGrid& grid);

/// One shared skeleton time stepper so the control-to-state map used by the
/// optimizer is the same arithmetic as solve_skeleton, and the adjoint step
/// is its exact transpose.
class SkeletonStepper {
public:
    SkeletonStepper(const SpaceTimeGrid& grid, LinearizedCoeffs tables, double theta = 1.0);

    const SpaceTimeGrid& grid() const { return grid_; }
    const LinearizedCoeffs& tables() const { return tables_; }

    /// x_{n+1} = M^{-1}(x_n + (1-theta) dt Lap x_n + dt db_n x_n
    ///                  + dt Dc(dg_n x_n) + dt sigma_n h_n)
    void forward_step(int n, std::span<const double> x, const double* h_row,
                      std::span<double> out) const;

    /// Exact transpose of forward_step's state map:
    /// z_n = M^{-1}(z + (1-theta) dt Lap z + dt db_n z - dt dg_n Dc(z)).
    void adjoint_step(int n, std::span<const double> z, std::span<double> out) const;

    void solve_mass(std::span<double> x) const { factor_.solve_in_place(x); }

private:
    SpaceTimeGrid grid_;
    LinearizedCoeffs tables_;
    double theta_;
    TridiagFactor factor_;
};

}  // namespace detail

}  // namespace spdelab
