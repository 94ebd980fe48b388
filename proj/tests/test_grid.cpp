#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "spdelab/grid.hpp"

using namespace spdelab;

namespace {

// Independent quadrature oracle: composite Simpson on [0,1].
template <class F>
double simpson01(const F& f, int n) {
    const double h = 1.0 / n;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("make_grid arithmetic and stability flag") {
    const auto g = make_grid(4, 4, 1.0);
    CHECK(g.dx == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(g.dt == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_FALSE(g.explicit_cfl_ok);  // 0.25 > 0.02

    // dt <= dx^2/2 is recorded exactly as defined
    const auto fine = make_grid(63, 4096, 0.1);
    CHECK(fine.dt <= 0.5 * fine.dx * fine.dx);
    CHECK(fine.explicit_cfl_ok);
    const auto coarse = make_grid(63, 4096, 1.0);  // dt = dx^2 > dx^2/2
    CHECK_FALSE(coarse.explicit_cfl_ok);

    CHECK(g.dx * (g.nx + 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.dt * g.nt == doctest::Approx(g.horizon_T).epsilon(1e-15));
}

TEST_CASE("make_grid rejects degenerate arguments") {
    CHECK_THROWS_AS(make_grid(0, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 4, -1.0), std::invalid_argument);
}

TEST_CASE("lp_norm of simple profiles") {
    const auto g = make_grid(999, 4, 1.0);

    const auto ones = make_profile(g, [](double) { return 1.0; });
    CHECK(lp_norm(2.0, ones) == doctest::Approx(1.0).epsilon(2.0 * g.dx));

    // sin(pi x): the interior-node rule is exact for sin^2 on a uniform
    // lattice; the oracle checks the continuum value it should reproduce.
    const auto sine = make_profile(g, [](double x) { return std::sin(std::numbers::pi * x); });
    const double oracle = std::sqrt(simpson01(
        [](double x) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * x); },
        4096));
    CHECK(oracle == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(lp_norm(2.0, sine) == doctest::Approx(oracle).epsilon(1e-12));

    CHECK(lp_norm(kSupNorm, sine) <= 1.0);
    CHECK(lp_norm(kSupNorm, sine) == doctest::Approx(1.0).epsilon(1e-4));

    CHECK_THROWS_AS(lp_norm(0.5, sine), std::invalid_argument);
}

TEST_CASE("sup_time_norm") {
    const auto g = make_grid(63, 8, 1.0);
    Field zero(g);
    CHECK(sup_time_norm(2.0, zero) == 0.0);

    // constant in time: equals the slice norm
    Field constant(g);
    const auto sine = make_profile(g, [](double x) { return std::sin(std::numbers::pi * x); });
    for (int n = 0; n <= g.nt; ++n)
        std::copy(sine.values.begin(), sine.values.end(), constant.at(n).begin());
    CHECK(sup_time_norm(2.0, constant) == doctest::Approx(lp_norm(2.0, sine)).epsilon(1e-15));

    // t*sin(pi x) peaks at t = T = 1
    Field ramp(g);
    for (int n = 0; n <= g.nt; ++n) {
        auto s = ramp.at(n);
        for (int i = 0; i < g.nx; ++i) s[i] = g.t(n) * sine.values[i];
    }
    CHECK(sup_time_norm(2.0, ramp) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("norm homogeneity and triangle inequality on random profiles") {
    const auto g = make_grid(37, 4, 1.0);
    std::mt19937 gen(20240811);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Profile u = zero_profile(g), v = zero_profile(g);
        for (int i = 0; i < g.nx; ++i) {
            u.values[i] = dist(gen);
            v.values[i] = dist(gen);
        }
        const double c = dist(gen);
        for (double p : {1.0, 2.0, 3.5, kSupNorm}) {
            Profile cu = u;
            for (auto& x : cu.values) x *= c;
            CHECK(lp_norm(p, cu) ==
                  doctest::Approx(std::abs(c) * lp_norm(p, u)).epsilon(1e-12));
            Profile sum = u;
            for (int i = 0; i < g.nx; ++i) sum.values[i] += v.values[i];
            CHECK(lp_norm(p, sum) <= lp_norm(p, u) + lp_norm(p, v) + 1e-12);
        }
    }
}

TEST_CASE("quadrature converges at order >= 1 against closed forms") {
    // u(x) = x(1-x): integral of u^2 is 1/30
    const double exact = std::sqrt(1.0 / 30.0);
    double prev_err = 0.0;
    for (int level = 0; level < 3; ++level) {
        const int nx = (16 << level) - 1;
        const auto g = make_grid(nx, 2, 1.0);
        const auto u = make_profile(g, [](double x) { return x * (1.0 - x); });
        const double err = std::abs(lp_norm(2.0, u) - exact);
        if (level > 0) CHECK(err <= 0.6 * prev_err);
        prev_err = err;
    }
}
