#include "spdelab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spdelab {

namespace {

constexpr double kPi = std::numbers::pi;

double free_space_value(double t, double x, double y) {
    const double d = x - y;
    return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

double free_space_dy(double t, double x, double y) {
    return free_space_value(t, x, y) * (x - y) / (2.0 * t);
}

double dirichlet_value(int truncation, double t, double x, double y) {
    double acc = 0.0;
    for (int k = truncation; k >= 1; --k) {
        const double kpi = k * kPi;
        acc += std::sin(kpi * x) * std::sin(kpi * y) * std::exp(-kpi * kpi * t);
    }
    return 2.0 * acc;
}

double dirichlet_dy(int truncation, double t, double x, double y) {
    double acc = 0.0;
    for (int k = truncation; k >= 1; --k) {
        const double kpi = k * kPi;
        acc += kpi * std::sin(kpi * x) * std::cos(kpi * y) * std::exp(-kpi * kpi * t);
    }
    return 2.0 * acc;
}

// Composite Simpson rule on [a,b] with n (even) intervals.
template <class F>
double simpson(const F& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

double eval_kernel(const HeatKernel& kernel, double t, double x, double y,
                   KernelDerivative derivative) {
    if (!(t > 0.0)) throw std::invalid_argument("eval_kernel: t must be > 0");
    const bool want_value = derivative == KernelDerivative::value;
    if (kernel.boundary == KernelBoundary::free_space)
        return want_value ? free_space_value(t, x, y) : free_space_dy(t, x, y);
    return want_value ? dirichlet_value(kernel.truncation, t, x, y)
                      : dirichlet_dy(kernel.truncation, t, x, y);
}

Field convolve_J(ConvolutionKernel mode, const Field& v, int truncation) {
    const SpaceTimeGrid& grid = v.grid;
    if (grid.nx < 1 || grid.nt < 1 || v.data.empty())
        throw std::invalid_argument("convolve_J: empty field");
    if (truncation < 1) throw std::invalid_argument("convolve_J: truncation must be >= 1");

    // The Dirichlet kernel is separable in its eigenbasis, so the double
    // quadrature factors into a forward transform of each time slice, a
    // per-mode causal convolution in time (kernel at slab midpoints), and a
    // back transform. Identical to the direct nested sum, just reordered.
    const int K = truncation;
    const int nx = grid.nx;
    const int nt = grid.nt;

    std::vector<double> sin_tab(static_cast<std::size_t>(K) * nx);
    std::vector<double> proj_tab(static_cast<std::size_t>(K) * nx);
    for (int k = 1; k <= K; ++k) {
        for (int i = 0; i < nx; ++i) {
            const double xi = grid.x(i);
            sin_tab[(k - 1) * static_cast<std::size_t>(nx) + i] = std::sqrt(2.0) * std::sin(k * kPi * xi);
            proj_tab[(k - 1) * static_cast<std::size_t>(nx) + i] =
                mode == ConvolutionKernel::G
                    ? std::sqrt(2.0) * std::sin(k * kPi * xi)
                    : std::sqrt(2.0) * k * kPi * std::cos(k * kPi * xi);
        }
    }

    // vhat[k][m] = dx * sum_j proj_k(y_j) v(m, y_j)
    std::vector<double> vhat(static_cast<std::size_t>(K) * nt, 0.0);
    for (int m = 0; m < nt; ++m) {
        const auto slice = v.at(m);
        for (int k = 0; k < K; ++k) {
            const double* pk = &proj_tab[static_cast<std::size_t>(k) * nx];
            double acc = 0.0;
            for (int j = 0; j < nx; ++j) acc += pk[j] * slice[j];
            vhat[static_cast<std::size_t>(k) * nt + m] = acc * grid.dx;
        }
    }

    // decay[k][l] = exp(-mu_k * (l + 1/2) dt), the kernel at the midpoint of
    // the slab at lag l.
    std::vector<double> decay(static_cast<std::size_t>(K) * nt);
    for (int k = 0; k < K; ++k) {
        const double mu = (k + 1) * kPi * (k + 1) * kPi;
        for (int l = 0; l < nt; ++l)
            decay[static_cast<std::size_t>(k) * nt + l] = std::exp(-mu * (l + 0.5) * grid.dt);
    }

    Field out(grid);
    std::vector<double> jhat(K);
    for (int n = 1; n <= nt; ++n) {
        for (int k = 0; k < K; ++k) {
            const double* dk = &decay[static_cast<std::size_t>(k) * nt];
            const double* vk = &vhat[static_cast<std::size_t>(k) * nt];
            double acc = 0.0;
            for (int m = 0; m < n; ++m) acc += dk[n - 1 - m] * vk[m];
            jhat[k] = acc * grid.dt;
        }
        auto slice = out.at(n);
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k)
                acc += sin_tab[static_cast<std::size_t>(k) * nx + i] * jhat[k];
            slice[i] = acc;
        }
    }
    return out;
}

bool KernelReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const KernelPropertyCheck& c) { return c.pass; });
}

const KernelPropertyCheck* KernelReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

KernelReport kernel_property_report(const HeatKernel& kernel, std::span<const double> t_samples,
                                    std::span<const double> x_samples) {
    if (t_samples.empty() || x_samples.empty())
        throw std::invalid_argument("kernel_property_report: empty sample set");

    KernelReport report;
    const bool free_space = kernel.boundary == KernelBoundary::free_space;

    // Unit mass and L^2 mass. For the free-space kernel the y-integral runs
    // over a window wide enough that the Gaussian tail is below 1e-12.
    double mass_defect = 0.0;
    double l2_ratio_worst = 0.0;
    double mass_min = 1.0, mass_max = 0.0;
    for (double t : t_samples) {
        for (double x : x_samples) {
            double mass, l2mass;
            if (free_space) {
                const double w = 12.0 * std::sqrt(t);
                mass = simpson([&](double y) { return free_space_value(t, x, y); }, x - w, x + w, 8192);
                l2mass = simpson([&](double y) { const double g = free_space_value(t, x, y); return g * g; },
                                 x - w, x + w, 8192);
            } else {
                mass = simpson([&](double y) { return dirichlet_value(kernel.truncation, t, x, y); },
                               0.0, 1.0, 4096);
                l2mass = simpson([&](double y) {
                    const double g = dirichlet_value(kernel.truncation, t, x, y);
                    return g * g;
                }, 0.0, 1.0, 4096);
            }
            mass_defect = std::max(mass_defect, std::abs(mass - 1.0));
            mass_min = std::min(mass_min, mass);
            mass_max = std::max(mass_max, mass);
            const double quoted = 1.0 / std::sqrt(2.0 * kPi * t);
            l2_ratio_worst = std::max(l2_ratio_worst, l2mass / quoted);
        }
    }
    report.mass_defect = mass_defect;
    report.l2_mass_ratio = l2_ratio_worst;

    if (free_space) {
        report.checks.push_back({"mass_is_one", mass_defect, 0.0, mass_defect, mass_defect < 1e-10});
        // Under the d^2/dx^2 convention the measured L^2 mass is
        // (8 pi t)^(-1/2), i.e. exactly half the often-quoted (2 pi t)^(-1/2).
        report.checks.push_back({"l2_mass_ratio_half_of_quoted", l2_ratio_worst, 0.5,
                                 std::abs(l2_ratio_worst - 0.5),
                                 std::abs(l2_ratio_worst - 0.5) < 1e-2});
    } else {
        const bool in_unit = mass_min > 0.0 && mass_max <= 1.0 + 1e-9;
        report.checks.push_back({"mass_in_unit_interval", mass_max, 1.0,
                                 std::max(0.0, mass_max - 1.0), in_unit});
    }

    // Semigroup identity int_0^1 G_t(x,y) G_s(y,z) dy = G_{t+s}(x,z)
    // (Dirichlet kernel; the free-space identity integrates over all of R).
    if (!free_space) {
        double defect = 0.0;
        for (double t : t_samples) {
            for (double s : t_samples) {
                for (double x : x_samples) {
                    for (double z : x_samples) {
                        const double conv = simpson([&](double y) {
                            return dirichlet_value(kernel.truncation, t, x, y) *
                                   dirichlet_value(kernel.truncation, s, y, z);
                        }, 0.0, 1.0, 2048);
                        defect = std::max(defect,
                                          std::abs(conv - dirichlet_value(kernel.truncation, t + s, x, z)));
                    }
                }
            }
        }
        report.semigroup_defect = defect;
        report.checks.push_back({"semigroup_identity", defect, 0.0, defect, defect < 1e-6});
    }

    // Derivative bound |d_y G_t(x,y)| <= C t^(-1) exp(-c (x-y)^2 / t) with
    // c = 1/8; the fitted constant is the margin.
    {
        double fitted = 0.0;
        double fd_rel_worst = 0.0;
        for (double t : t_samples) {
            for (double x : x_samples) {
                for (double y : x_samples) {
                    const double d = eval_kernel(kernel, t, x, y, KernelDerivative::d_dy);
                    const double gauss = std::exp(-(x - y) * (x - y) / (8.0 * t));
                    fitted = std::max(fitted, std::abs(d) * t / std::max(gauss, 1e-300));
                    // centered finite difference of the value mode
                    const double h = 1e-5;
                    if (y - h > 0.0 && y + h < 1.0) {
                        const double fd = (eval_kernel(kernel, t, x, y + h) -
                                           eval_kernel(kernel, t, x, y - h)) / (2.0 * h);
                        const double scale = std::abs(d) + 1e-3 * (1.0 + std::abs(d));
                        fd_rel_worst = std::max(fd_rel_worst, std::abs(fd - d) / scale);
                    }
                }
            }
        }
        report.derivative_bound_margin = fitted;
        report.checks.push_back({"dy_bound_fitted_constant", fitted, 0.0, 0.0,
                                 std::isfinite(fitted) && fitted < 100.0});
        report.checks.push_back({"dy_matches_finite_difference", fd_rel_worst, 0.0, fd_rel_worst,
                                 fd_rel_worst < 1e-4});
    }

    // Fitted constants for the L^r moment estimates
    //   int G^2 dy <= C exp(-2t) t^(-1/2)   and   int |d_y G| dy <= C t^(-1/2).
    {
        double c_sq = 0.0, c_dy = 0.0;
        for (double t : t_samples) {
            for (double x : x_samples) {
                double int_sq, int_dy;
                if (free_space) {
                    const double w = 12.0 * std::sqrt(t);
                    int_sq = simpson([&](double y) {
                        const double g = free_space_value(t, x, y);
                        return g * g;
                    }, x - w, x + w, 8192);
                    int_dy = simpson([&](double y) { return std::abs(free_space_dy(t, x, y)); },
                                     x - w, x + w, 8192);
                } else {
                    int_sq = simpson([&](double y) {
                        const double g = dirichlet_value(kernel.truncation, t, x, y);
                        return g * g;
                    }, 0.0, 1.0, 4096);
                    int_dy = simpson([&](double y) {
                        return std::abs(dirichlet_dy(kernel.truncation, t, x, y));
                    }, 0.0, 1.0, 4096);
                }
                c_sq = std::max(c_sq, int_sq / (std::exp(-2.0 * t) / std::sqrt(t)));
                c_dy = std::max(c_dy, int_dy * std::sqrt(t));
            }
        }
        report.lp_moment_defects = {c_sq, c_dy};
        report.checks.push_back({"l2_moment_fitted_constant", c_sq, 0.0, 0.0,
                                 std::isfinite(c_sq) && c_sq < 100.0});
        report.checks.push_back({"dy_l1_moment_fitted_constant", c_dy, 0.0, 0.0,
                                 std::isfinite(c_dy) && c_dy < 100.0});
    }

    return report;
}

}  // namespace spdelab
