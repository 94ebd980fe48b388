#include "spdelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdelab {

SpaceTimeGrid make_grid(int nx, int nt, double horizon_T) {
    if (nx < 1) throw std::invalid_argument("make_grid: nx must be >= 1");
    if (nt < 1) throw std::invalid_argument("make_grid: nt must be >= 1");
    if (!(horizon_T > 0.0)) throw std::invalid_argument("make_grid: horizon_T must be > 0");
    SpaceTimeGrid g;
    g.nx = nx;
    g.nt = nt;
    g.horizon_T = horizon_T;
    g.dx = 1.0 / (nx + 1);
    g.dt = horizon_T / nt;
    g.explicit_cfl_ok = g.dt <= 0.5 * g.dx * g.dx;
    return g;
}

Profile make_profile(const SpaceTimeGrid& grid, const std::function<double(double)>& f) {
    Profile p{grid, std::vector<double>(grid.nx)};
    for (int i = 0; i < grid.nx; ++i) p.values[i] = f(grid.x(i));
    return p;
}

Profile zero_profile(const SpaceTimeGrid& grid) {
    return Profile{grid, std::vector<double>(grid.nx, 0.0)};
}

double lp_norm(double p, const SpaceTimeGrid& grid, std::span<const double> values) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or the sup marker");
    double acc = 0.0;
    if (p == 2.0) {
        for (double v : values) acc += v * v;
        return std::sqrt(acc * grid.dx);
    }
    if (p == 1.0) {
        for (double v : values) acc += std::abs(v);
        return acc * grid.dx;
    }
    for (double v : values) acc += std::pow(std::abs(v), p);
    return std::pow(acc * grid.dx, 1.0 / p);
}

double lp_norm(double p, const Profile& profile) {
    return lp_norm(p, profile.grid, profile.values);
}

double sup_time_norm(double p, const Field& field) {
    double m = 0.0;
    for (int n = 0; n <= field.grid.nt; ++n) m = std::max(m, lp_norm(p, field.grid, field.at(n)));
    return m;
}

double h_inner(const SpaceTimeGrid& grid, std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc * grid.dx;
}

double h_norm(const SpaceTimeGrid& grid, std::span<const double> values) {
    return std::sqrt(h_inner(grid, values, values));
}

bool same_grid(const SpaceTimeGrid& a, const SpaceTimeGrid& b) {
    return a.nx == b.nx && a.nt == b.nt && a.horizon_T == b.horizon_T;
}

}  // namespace spdelab
