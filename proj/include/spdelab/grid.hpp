#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace spdelab {

/// Uniform lattice on [0,T] x [0,1]. Space is discretized by nx interior
/// nodes x_i = i*dx, dx = 1/(nx+1); the Dirichlet boundary values at x=0,1
/// are identically zero and never stored. Time levels are t_n = n*dt,
/// dt = T/nt, n = 0..nt.
struct SpaceTimeGrid {
    int nx = 0;
    int nt = 0;
    double horizon_T = 0.0;
    double dx = 0.0;
    double dt = 0.0;
    /// Records dt <= dx^2/2, the explicit-diffusion stability bound. The
    /// default solvers are implicit and do not require it; the flag exists so
    /// configurations never violate it silently.
    bool explicit_cfl_ok = false;

    double x(int i) const { return (i + 1) * dx; }
    double t(int n) const { return n * dt; }
    std::size_t cells() const { return static_cast<std::size_t>(nt) * nx; }

    friend bool operator==(const SpaceTimeGrid&, const SpaceTimeGrid&) = default;
};

SpaceTimeGrid make_grid(int nx, int nt, double horizon_T);

/// One spatial slice: values at the nx interior nodes of `grid`.
struct Profile {
    SpaceTimeGrid grid;
    std::vector<double> values;
};

Profile make_profile(const SpaceTimeGrid& grid, const std::function<double(double)>& f);
Profile zero_profile(const SpaceTimeGrid& grid);

/// A trajectory: nt+1 profiles stored contiguously, level 0 = initial data.
struct Field {
    SpaceTimeGrid grid;
    std::vector<double> data;  // (nt+1) * nx

    Field() = default;
    explicit Field(const SpaceTimeGrid& g)
        : grid(g), data(static_cast<std::size_t>(g.nt + 1) * g.nx, 0.0) {}

    std::span<double> at(int n) {
        return {data.data() + static_cast<std::size_t>(n) * grid.nx,
                static_cast<std::size_t>(grid.nx)};
    }
    std::span<const double> at(int n) const {
        return {data.data() + static_cast<std::size_t>(n) * grid.nx,
                static_cast<std::size_t>(grid.nx)};
    }
    Profile profile(int n) const {
        auto s = at(n);
        return Profile{grid, {s.begin(), s.end()}};
    }
};

/// Marker value selecting the sup norm in lp_norm / sup_time_norm.
inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();

/// (integral |u|^p dx)^(1/p) by the interior-node rectangle rule (weight dx
/// per node, zero boundary), or max|u_i| for the sup marker. Requires p >= 1.
double lp_norm(double p, const SpaceTimeGrid& grid, std::span<const double> values);
double lp_norm(double p, const Profile& profile);

/// max over time levels of lp_norm of the slice.
double sup_time_norm(double p, const Field& field);

/// dx-weighted inner product of two profiles (the discrete L^2([0,1]) pairing).
double h_inner(const SpaceTimeGrid& grid, std::span<const double> a, std::span<const double> b);
double h_norm(const SpaceTimeGrid& grid, std::span<const double> values);

bool same_grid(const SpaceTimeGrid& a, const SpaceTimeGrid& b);

}  // namespace spdelab
