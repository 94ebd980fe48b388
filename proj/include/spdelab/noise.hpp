#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

/// Identifies one independent Brownian-sheet realization.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Brownian-sheet increments over the lattice cells: increment(n,i) is the
/// sheet mass of cell [t_n, t_{n+1}) x (x_i - dx/2, x_i + dx/2], distributed
/// N(0, dt*dx) and independent across cells.
struct NoiseLattice {
    SpaceTimeGrid grid;
    StreamKey key;
    std::vector<double> increments;  // nt * nx

    double at(int n, int i) const { return increments[static_cast<std::size_t>(n) * grid.nx + i]; }
};

NoiseLattice sample_sheet(const SpaceTimeGrid& grid, StreamKey key);

/// A deterministic control h in L^2([0,T]x[0,1]), sampled per lattice cell
/// (piecewise constant on [t_n, t_{n+1}) around node x_i). If bound_M is set,
/// construction enforces the energy-ball membership  integral h^2 <= M.
struct Control {
    SpaceTimeGrid grid;
    std::vector<double> values;  // nt * nx
    std::optional<double> bound_M;

    Control(SpaceTimeGrid g, std::vector<double> v, std::optional<double> bound = std::nullopt);

    double at(int n, int i) const { return values[static_cast<std::size_t>(n) * grid.nx + i]; }
    /// (1/2) integral of h^2 over [0,T]x[0,1] by cell quadrature.
    double energy() const;
};

Control make_control(const SpaceTimeGrid& grid, const std::function<double(double, double)>& h,
                     std::optional<double> bound_M = std::nullopt);
Control zero_control(const SpaceTimeGrid& grid);

/// (1/2) integral h^2 -- the cost of the control in the rate function.
double control_objective(const Control& h);

/// Girsanov shift on the lattice: each increment gains lambda*h(n,i)*dt*dx.
NoiseLattice shift_noise(const NoiseLattice& noise, const Control& h, double lambda);

}  // namespace spdelab
