#include "spdelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace detail {

TridiagFactor::TridiagFactor(int n, double diag, double off) : n_(n), off_(off) {
    upper_.resize(n);
    inv_denom_.resize(n);
    double denom = diag;
    inv_denom_[0] = 1.0 / denom;
    upper_[0] = off / denom;
    for (int i = 1; i < n; ++i) {
        denom = diag - off * upper_[i - 1];
        inv_denom_[i] = 1.0 / denom;
        upper_[i] = off / denom;
    }
}

void TridiagFactor::solve_in_place(std::span<double> x) const {
    x[0] *= inv_denom_[0];
    for (int i = 1; i < n_; ++i) x[i] = (x[i] - off_ * x[i - 1]) * inv_denom_[i];
    for (int i = n_ - 2; i >= 0; --i) x[i] -= upper_[i] * x[i + 1];
}

LinearizedCoeffs evaluate_linearized_coeffs(const PathResult& u0_path,
                                            const CoefficientSet& coeffs,
                                            const SpaceTimeGrid& grid) {
    if (!same_grid(u0_path.field.grid, grid))
        throw std::invalid_argument("evaluate_linearized_coeffs: path grid mismatch");
    LinearizedCoeffs tables;
    tables.db.resize(grid.cells());
    tables.dg.resize(grid.cells());
    tables.sigma.resize(grid.cells());
    std::size_t idx = 0;
    for (int n = 0; n < grid.nt; ++n) {
        const double t = grid.t(n);
        const auto u0 = u0_path.field.at(n);
        for (int i = 0; i < grid.nx; ++i, ++idx) {
            const double x = grid.x(i);
            tables.db[idx] = coeffs.db_dr(t, x, u0[i]);
            tables.dg[idx] = coeffs.dg_dr(t, x, u0[i]);
            tables.sigma[idx] = coeffs.sigma(t, x, u0[i]);
        }
    }
    return tables;
}

SkeletonStepper::SkeletonStepper(const SpaceTimeGrid& grid, LinearizedCoeffs tables, double theta)
    : grid_(grid), tables_(std::move(tables)), theta_(theta),
      factor_(grid.nx, 1.0 + 2.0 * theta * grid.dt / (grid.dx * grid.dx),
              -theta * grid.dt / (grid.dx * grid.dx)) {}

void SkeletonStepper::forward_step(int n, std::span<const double> x, const double* h_row,
                                   std::span<double> out) const {
    const int nx = grid_.nx;
    const double dt = grid_.dt;
    const double inv_dx2 = 1.0 / (grid_.dx * grid_.dx);
    const double inv_2dx = 0.5 / grid_.dx;
    const std::size_t row = static_cast<std::size_t>(n) * nx;
    const double* db = tables_.db.data() + row;
    const double* dg = tables_.dg.data() + row;
    const double* sg = tables_.sigma.data() + row;

    for (int i = 0; i < nx; ++i) {
        const double xl = i > 0 ? x[i - 1] : 0.0;
        const double xr = i + 1 < nx ? x[i + 1] : 0.0;
        const double ql = i > 0 ? dg[i - 1] * x[i - 1] : 0.0;
        const double qr = i + 1 < nx ? dg[i + 1] * x[i + 1] : 0.0;
        double v = x[i] + dt * db[i] * x[i] + dt * (qr - ql) * inv_2dx;
        if (theta_ < 1.0) v += (1.0 - theta_) * dt * (xl - 2.0 * x[i] + xr) * inv_dx2;
        if (h_row) v += dt * sg[i] * h_row[i];
        out[i] = v;
    }
    factor_.solve_in_place(out);
}

void SkeletonStepper::adjoint_step(int n, std::span<const double> z, std::span<double> out) const {
    const int nx = grid_.nx;
    const double dt = grid_.dt;
    const double inv_dx2 = 1.0 / (grid_.dx * grid_.dx);
    const double inv_2dx = 0.5 / grid_.dx;
    const std::size_t row = static_cast<std::size_t>(n) * nx;
    const double* db = tables_.db.data() + row;
    const double* dg = tables_.dg.data() + row;

    for (int i = 0; i < nx; ++i) {
        const double zl = i > 0 ? z[i - 1] : 0.0;
        const double zr = i + 1 < nx ? z[i + 1] : 0.0;
        double v = z[i] + dt * db[i] * z[i] - dt * dg[i] * (zr - zl) * inv_2dx;
        if (theta_ < 1.0) v += (1.0 - theta_) * dt * (zl - 2.0 * z[i] + zr) * inv_dx2;
        out[i] = v;
    }
    factor_.solve_in_place(out);
}

}  // namespace detail

namespace {

void check_theta(const SchemeConfig& scheme) {
    if (!(scheme.theta >= 0.0 && scheme.theta <= 1.0))
        throw std::invalid_argument("SchemeConfig: theta must lie in [0,1]");
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double exit_time_from_norms(const SpaceTimeGrid& grid, const std::vector<double>& h_norms,
                            double radius) {
    for (int n = 0; n <= grid.nt; ++n)
        if (h_norms[n] > radius) return grid.t(n);
    return grid.horizon_T;
}

/// Primary equation stepper; solves the deterministic equation when `noise`
/// is null or epsilon is zero, so the eps = 0 reduction is exact.
PathResult run_primary(const Profile& f, const CoefficientSet& coeffs, const SpaceTimeGrid& grid,
                       const SchemeConfig& scheme, const NoiseLattice* noise, const char* name) {
    check_theta(scheme);
    if (!same_grid(f.grid, grid)) throw std::invalid_argument("solver: initial profile grid mismatch");
    if (noise && !same_grid(noise->grid, grid))
        throw std::invalid_argument("solver: noise grid mismatch");
    if (scheme.epsilon < 0.0) throw std::invalid_argument("solver: epsilon must be >= 0");

    const int nx = grid.nx;
    const double dt = grid.dt;
    const double dx = grid.dx;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_2dx = 0.5 / dx;
    const bool with_noise = noise != nullptr && scheme.epsilon > 0.0;
    const double noise_gain = with_noise ? std::sqrt(scheme.epsilon) / dx : 0.0;

    detail::TridiagFactor factor(nx, 1.0 + 2.0 * scheme.theta * dt * inv_dx2,
                                 -scheme.theta * dt * inv_dx2);

    PathResult result{Field(grid), grid.horizon_T, {}, scheme, nullptr};
    result.h_norms.resize(grid.nt + 1);
    std::copy(f.values.begin(), f.values.end(), result.field.at(0).begin());
    result.h_norms[0] = h_norm(grid, result.field.at(0));

    std::vector<double> u(f.values);
    std::vector<double> rhs(nx);
    std::vector<double> gv(nx + 2);  // flux values including boundary states

    for (int n = 0; n < grid.nt; ++n) {
        const double t = grid.t(n);
        gv[0] = coeffs.g(t, 0.0, 0.0);
        gv[nx + 1] = coeffs.g(t, 1.0, 0.0);
        for (int i = 0; i < nx; ++i) gv[i + 1] = coeffs.g(t, grid.x(i), u[i]);

        for (int i = 0; i < nx; ++i) {
            const double x = grid.x(i);
            double flux;
            if (scheme.flux_form == FluxForm::centered_conservative) {
                flux = (gv[i + 2] - gv[i]) * inv_2dx;
            } else {
                // upwind by the local wave speed d_r g
                flux = coeffs.dg_dr(t, x, u[i]) >= 0.0 ? (gv[i + 2] - gv[i + 1]) / dx
                                                       : (gv[i + 1] - gv[i]) / dx;
            }
            double v = u[i] + dt * coeffs.b(t, x, u[i]) + dt * flux;
            if (scheme.theta < 1.0) {
                const double ul = i > 0 ? u[i - 1] : 0.0;
                const double ur = i + 1 < nx ? u[i + 1] : 0.0;
                v += (1.0 - scheme.theta) * dt * (ul - 2.0 * u[i] + ur) * inv_dx2;
            }
            if (with_noise) v += noise_gain * coeffs.sigma(t, x, u[i]) * noise->at(n, i);
            rhs[i] = v;
        }
        factor.solve_in_place(rhs);
        if (!all_finite(rhs)) throw DivergenceError(name, n + 1);
        u = rhs;
        std::copy(u.begin(), u.end(), result.field.at(n + 1).begin());
        result.h_norms[n + 1] = h_norm(grid, u);
    }

    result.exit_time_tau = exit_time_from_norms(
        grid, result.h_norms, scheme.stop_radius_R.value_or(std::numeric_limits<double>::infinity()));
    if (noise) result.noise = std::make_shared<NoiseLattice>(*noise);
    return result;
}

}  // namespace

PathResult solve_deterministic(const Profile& f, const CoefficientSet& coeffs,
                               const SpaceTimeGrid& grid, const SchemeConfig& scheme) {
    return run_primary(f, coeffs, grid, scheme, nullptr, "solve_deterministic");
}

PathResult solve_spde(const Profile& f, const CoefficientSet& coeffs, const SpaceTimeGrid& grid,
                      const SchemeConfig& scheme, const NoiseLattice& noise) {
    return run_primary(f, coeffs, grid, scheme, &noise, "solve_spde");
}

PathResult solve_linearized(const PathResult& u0_path, const CoefficientSet& coeffs,
                            const SpaceTimeGrid& grid, const SchemeConfig& scheme,
                            const NoiseLattice& noise) {
    check_theta(scheme);
    if (!same_grid(noise.grid, grid)) throw std::invalid_argument("solve_linearized: noise grid mismatch");
    auto tables = detail::evaluate_linearized_coeffs(u0_path, coeffs, grid);
    const detail::SkeletonStepper stepper(grid, std::move(tables), scheme.theta);

    const int nx = grid.nx;
    const double dt = grid.dt;
    PathResult result{Field(grid), grid.horizon_T, {}, scheme, std::make_shared<NoiseLattice>(noise)};
    result.h_norms.assign(grid.nt + 1, 0.0);

    // The noise forcing sigma(u0) dW enters as a per-cell control density
    // increment/(dt*dx), so the step is the skeleton step with that row.
    std::vector<double> y(nx, 0.0), next(nx), h_row(nx);
    const double inv_cell = 1.0 / (dt * grid.dx);
    for (int n = 0; n < grid.nt; ++n) {
        for (int i = 0; i < nx; ++i) h_row[i] = noise.at(n, i) * inv_cell;
        stepper.forward_step(n, y, h_row.data(), next);
        if (!all_finite(next)) throw DivergenceError("solve_linearized", n + 1);
        y = next;
        std::copy(y.begin(), y.end(), result.field.at(n + 1).begin());
        result.h_norms[n + 1] = h_norm(grid, y);
    }
    result.exit_time_tau = exit_time_from_norms(
        grid, result.h_norms, scheme.stop_radius_R.value_or(std::numeric_limits<double>::infinity()));
    return result;
}

PathResult solve_skeleton(const PathResult& u0_path, const CoefficientSet& coeffs,
                          const SpaceTimeGrid& grid, const Control& h) {
    if (!same_grid(h.grid, grid)) throw std::invalid_argument("solve_skeleton: control grid mismatch");
    auto tables = detail::evaluate_linearized_coeffs(u0_path, coeffs, grid);
    const detail::SkeletonStepper stepper(grid, std::move(tables));

    const int nx = grid.nx;
    PathResult result{Field(grid), grid.horizon_T, {}, SchemeConfig{}, nullptr};
    result.h_norms.assign(grid.nt + 1, 0.0);

    std::vector<double> x(nx, 0.0), next(nx);
    for (int n = 0; n < grid.nt; ++n) {
        stepper.forward_step(n, x, &h.values[static_cast<std::size_t>(n) * nx], next);
        if (!all_finite(next)) throw DivergenceError("solve_skeleton", n + 1);
        x = next;
        std::copy(x.begin(), x.end(), result.field.at(n + 1).begin());
        result.h_norms[n + 1] = h_norm(grid, x);
    }
    result.exit_time_tau = grid.horizon_T;
    return result;
}

PathResult solve_controlled(const PathResult& u0_path, const CoefficientSet& coeffs,
                            const SpaceTimeGrid& grid, const SchemeConfig& scheme,
                            const NoiseLattice& noise, const Control& h) {
    check_theta(scheme);
    if (!(scheme.lambda > 0.0)) throw std::invalid_argument("solve_controlled: lambda must be > 0");
    if (!(scheme.epsilon > 0.0)) throw std::invalid_argument("solve_controlled: epsilon must be > 0");
    if (!same_grid(noise.grid, grid)) throw std::invalid_argument("solve_controlled: noise grid mismatch");
    if (!same_grid(h.grid, grid)) throw std::invalid_argument("solve_controlled: control grid mismatch");
    if (!same_grid(u0_path.field.grid, grid))
        throw std::invalid_argument("solve_controlled: path grid mismatch");

    const int nx = grid.nx;
    const double dt = grid.dt;
    const double dx = grid.dx;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_2dx = 0.5 / dx;
    const double amp = std::sqrt(scheme.epsilon) * scheme.lambda;  // sqrt(eps)*lambda
    const double noise_gain = 1.0 / (scheme.lambda * dx);

    detail::TridiagFactor factor(nx, 1.0 + 2.0 * scheme.theta * dt * inv_dx2,
                                 -scheme.theta * dt * inv_dx2);

    PathResult result{Field(grid), grid.horizon_T, {}, scheme, std::make_shared<NoiseLattice>(noise)};
    result.h_norms.assign(grid.nt + 1, 0.0);

    std::vector<double> xbar(nx, 0.0), rhs(nx), gq(nx + 2, 0.0);
    for (int n = 0; n < grid.nt; ++n) {
        const double t = grid.t(n);
        const auto u0 = u0_path.field.at(n);
        // difference quotients of the flux at the perturbed state; boundary
        // states are zero on both paths so the quotient vanishes there
        for (int i = 0; i < nx; ++i) {
            const double x = grid.x(i);
            gq[i + 1] = (coeffs.g(t, x, u0[i] + amp * xbar[i]) - coeffs.g(t, x, u0[i])) / amp;
        }
        for (int i = 0; i < nx; ++i) {
            const double x = grid.x(i);
            const double arg = u0[i] + amp * xbar[i];
            const double sig = coeffs.sigma(t, x, arg);
            double v = xbar[i];
            v += noise_gain * sig * noise.at(n, i);
            v += dt * sig * h.at(n, i);
            v += dt * (coeffs.b(t, x, arg) - coeffs.b(t, x, u0[i])) / amp;
            v += dt * (gq[i + 2] - gq[i]) * inv_2dx;
            if (scheme.theta < 1.0) {
                const double xl = i > 0 ? xbar[i - 1] : 0.0;
                const double xr = i + 1 < nx ? xbar[i + 1] : 0.0;
                v += (1.0 - scheme.theta) * dt * (xl - 2.0 * xbar[i] + xr) * inv_dx2;
            }
            rhs[i] = v;
        }
        factor.solve_in_place(rhs);
        if (!all_finite(rhs)) throw DivergenceError("solve_controlled", n + 1);
        xbar = rhs;
        std::copy(xbar.begin(), xbar.end(), result.field.at(n + 1).begin());
        result.h_norms[n + 1] = h_norm(grid, xbar);
    }
    result.exit_time_tau = exit_time_from_norms(
        grid, result.h_norms, scheme.stop_radius_R.value_or(std::numeric_limits<double>::infinity()));
    return result;
}

PathResult solve_controlled(const Profile& f, const CoefficientSet& coeffs,
                            const SpaceTimeGrid& grid, const SchemeConfig& scheme,
                            const NoiseLattice& noise, const Control& h) {
    SchemeConfig det = scheme;
    det.epsilon = 0.0;
    const PathResult u0_path = solve_deterministic(f, coeffs, grid, det);
    return solve_controlled(u0_path, coeffs, grid, scheme, noise, h);
}

std::vector<TestFunction> sine_test_functions(const SpaceTimeGrid& grid, int k_max) {
    std::vector<TestFunction> out;
    out.reserve(k_max);
    for (int k = 1; k <= k_max; ++k) {
        TestFunction tf;
        tf.mode = k;
        tf.phi.resize(grid.nx);
        tf.dphi.resize(grid.nx);
        tf.d2phi.resize(grid.nx);
        const double kpi = k * std::numbers::pi;
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            tf.phi[i] = std::sin(kpi * x);
            tf.dphi[i] = kpi * std::cos(kpi * x);
            tf.d2phi[i] = -kpi * kpi * std::sin(kpi * x);
        }
        out.push_back(std::move(tf));
    }
    return out;
}

double weak_form_residual(const PathResult& path, const CoefficientSet& coeffs,
                          std::span<const TestFunction> test_functions) {
    const SpaceTimeGrid& grid = path.field.grid;
    const int nx = grid.nx;
    const double dt = grid.dt;
    const bool with_noise = path.noise != nullptr && path.scheme.epsilon > 0.0;
    const double sqrt_eps = with_noise ? std::sqrt(path.scheme.epsilon) : 0.0;

    // b and g sampled along the path, reused for every test function.
    std::vector<double> b_prev(nx), g_prev(nx), b_curr(nx), g_curr(nx);
    auto eval_row = [&](int n, std::vector<double>& bv, std::vector<double>& gv) {
        const double t = grid.t(n);
        const auto u = path.field.at(n);
        for (int i = 0; i < nx; ++i) {
            bv[i] = coeffs.b(t, grid.x(i), u[i]);
            gv[i] = coeffs.g(t, grid.x(i), u[i]);
        }
    };

    const std::size_t nphi = test_functions.size();
    std::vector<double> acc(nphi, 0.0);
    double worst = 0.0;
    eval_row(0, b_prev, g_prev);
    const auto u_init = path.field.at(0);

    for (int n = 1; n <= grid.nt; ++n) {
        eval_row(n, b_curr, g_curr);
        const auto u_prev = path.field.at(n - 1);
        const auto u_curr = path.field.at(n);
        for (std::size_t p = 0; p < nphi; ++p) {
            const TestFunction& tf = test_functions[p];
            double lap = 0.0, bb = 0.0, gg = 0.0;
            for (int i = 0; i < nx; ++i) {
                lap += 0.5 * (u_prev[i] + u_curr[i]) * tf.d2phi[i];
                bb += 0.5 * (b_prev[i] + b_curr[i]) * tf.phi[i];
                gg += 0.5 * (g_prev[i] + g_curr[i]) * tf.dphi[i];
            }
            acc[p] += dt * grid.dx * (lap + bb - gg);
            if (with_noise) {
                const double t = grid.t(n - 1);
                double sw = 0.0;
                for (int i = 0; i < nx; ++i)
                    sw += coeffs.sigma(t, grid.x(i), u_prev[i]) * tf.phi[i] *
                          path.noise->at(n - 1, i);
                acc[p] += sqrt_eps * sw;
            }
            const double lhs = h_inner(grid, u_curr, tf.phi) - h_inner(grid, u_init, tf.phi);
            worst = std::max(worst, std::abs(lhs - acc[p]));
        }
        b_prev.swap(b_curr);
        g_prev.swap(g_curr);
    }
    return worst;
}

double exit_time(const PathResult& path, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("exit_time: R must be > 0");
    return exit_time_from_norms(path.field.grid, path.h_norms, R);
}

}  // namespace spdelab
