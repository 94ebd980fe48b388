#include "spdelab/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "spdelab/philox.hpp"

namespace spdelab {

NoiseLattice sample_sheet(const SpaceTimeGrid& grid, StreamKey key) {
    NoiseLattice lattice{grid, key, std::vector<double>(grid.cells())};
    const double scale = std::sqrt(grid.dt * grid.dx);
    std::size_t idx = 0;
    for (int n = 0; n < grid.nt; ++n)
        for (int i = 0; i < grid.nx; ++i)
            lattice.increments[idx++] =
                scale * rng::cell_normal(key.seed, key.replica, static_cast<std::uint32_t>(n),
                                         static_cast<std::uint32_t>(i));
    return lattice;
}

Control::Control(SpaceTimeGrid g, std::vector<double> v, std::optional<double> bound)
    : grid(g), values(std::move(v)), bound_M(bound) {
    if (values.size() != grid.cells())
        throw std::invalid_argument("Control: values size does not match grid cells");
    if (bound_M) {
        const double sq = 2.0 * energy();
        if (sq > *bound_M * (1.0 + 1e-12))
            throw std::invalid_argument("Control: energy exceeds bound_M");
    }
}

double Control::energy() const {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return 0.5 * acc * grid.dt * grid.dx;
}

Control make_control(const SpaceTimeGrid& grid, const std::function<double(double, double)>& h,
                     std::optional<double> bound_M) {
    std::vector<double> v(grid.cells());
    std::size_t idx = 0;
    for (int n = 0; n < grid.nt; ++n)
        for (int i = 0; i < grid.nx; ++i) v[idx++] = h(grid.t(n), grid.x(i));
    return Control(grid, std::move(v), bound_M);
}

Control zero_control(const SpaceTimeGrid& grid) {
    return Control(grid, std::vector<double>(grid.cells(), 0.0));
}

double control_objective(const Control& h) { return h.energy(); }

NoiseLattice shift_noise(const NoiseLattice& noise, const Control& h, double lambda) {
    if (!same_grid(noise.grid, h.grid))
        throw std::invalid_argument("shift_noise: noise and control grids differ");
    if (lambda < 0.0) throw std::invalid_argument("shift_noise: lambda must be >= 0");
    NoiseLattice shifted = noise;
    const double cell = noise.grid.dt * noise.grid.dx;
    for (std::size_t k = 0; k < shifted.increments.size(); ++k)
        shifted.increments[k] += lambda * h.values[k] * cell;
    return shifted;
}

}  // namespace spdelab
