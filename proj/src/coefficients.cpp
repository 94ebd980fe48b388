#include "spdelab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdelab {

namespace {

double zero_fn(double, double, double) { return 0.0; }
double one_fn(double, double, double) { return 1.0; }

}  // namespace

CoefficientSet make_preset(Preset preset) {
    CoefficientSet set;
    switch (preset) {
        case Preset::additive:
            // b = 0, g = 0, sigma = 1: the linear stochastic heat equation.
            set.label = "additive";
            set.b = zero_fn;
            set.g = zero_fn;
            set.sigma = one_fn;
            set.db_dr = zero_fn;
            set.dg_dr = zero_fn;
            set.d2g_dr2 = zero_fn;
            set.growth_K = 1.0;
            set.lipschitz_L = 0.0;
            return set;
        case Preset::burgers:
            // Quadratic flux g = r^2/2 with a bounded Lipschitz noise amplitude.
            set.label = "burgers";
            set.b = zero_fn;
            set.g = [](double, double, double r) { return 0.5 * r * r; };
            set.sigma = [](double, double, double r) { return 1.0 / (1.0 + r * r); };
            set.db_dr = zero_fn;
            set.dg_dr = [](double, double, double r) { return r; };
            set.d2g_dr2 = one_fn;
            set.growth_K = 1.0;
            set.lipschitz_L = 1.0;
            return set;
        case Preset::reaction_diffusion:
            // Bounded Lipschitz reaction with an oscillatory noise amplitude.
            set.label = "reaction_diffusion";
            set.b = [](double, double, double r) { return r / (1.0 + r * r); };
            set.g = zero_fn;
            set.sigma = [](double, double, double r) { return std::cos(r); };
            set.db_dr = [](double, double, double r) {
                const double s = 1.0 + r * r;
                return (1.0 - r * r) / (s * s);
            };
            set.dg_dr = zero_fn;
            set.d2g_dr2 = zero_fn;
            set.growth_K = 1.0;
            set.lipschitz_L = 1.5;  // |d/dr db_dr| peaks near 1.46 at r ~ 0.42
            return set;
    }
    throw std::invalid_argument("make_preset: unknown preset");
}

CoefficientSet make_preset(std::string_view name) {
    if (name == "additive") return make_preset(Preset::additive);
    if (name == "burgers") return make_preset(Preset::burgers);
    if (name == "reaction_diffusion") return make_preset(Preset::reaction_diffusion);
    throw std::invalid_argument("make_preset: unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {"additive", "burgers", "reaction_diffusion"};
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AssumptionCheck& c) { return c.pass; });
}

const AssumptionCheck* ValidationReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

struct MaxTracker {
    double value = 0.0;
    double t = 0.0, x = 0.0, r = 0.0;

    void update(double v, double ti, double xi, double ri) {
        if (v > value) {
            value = v;
            t = ti;
            x = xi;
            r = ri;
        }
    }
};

AssumptionCheck bound_check(std::string name, const MaxTracker& m, double allowed) {
    AssumptionCheck c;
    c.name = std::move(name);
    c.measured = m.value;
    c.allowed = allowed;
    c.pass = m.value <= allowed * (1.0 + 1e-9);
    c.witness_t = m.t;
    c.witness_x = m.x;
    c.witness_r = m.r;
    return c;
}

}  // namespace

ValidationReport validate_assumptions(const CoefficientSet& set, double r_min, double r_max,
                                      int samples) {
    if (samples < 2) throw std::invalid_argument("validate_assumptions: samples must be >= 2");
    if (!(r_max > r_min)) throw std::invalid_argument("validate_assumptions: empty r range");

    constexpr int kTimeSamples = 5;
    constexpr int kSpaceSamples = 5;
    constexpr double kFdStep = 1e-5;
    constexpr double kFdRelTol = 1e-3;

    std::vector<double> rs(samples);
    for (int k = 0; k < samples; ++k)
        rs[k] = r_min + (r_max - r_min) * k / (samples - 1);

    // Growth constants measured as max of |value| / declared envelope.
    MaxTracker kb, kg, ks, kdb, kdg, kd2g;
    // Lipschitz constants from divided differences over r pairs.
    MaxTracker lb, lg, ls, ldb, ldg;
    // Derivative consistency defects against centered differences.
    MaxTracker fd_b, fd_g, fd_g2;
    bool fd_b_ok = true, fd_g_ok = true, fd_g2_ok = true;

    for (int it = 0; it < kTimeSamples; ++it) {
        const double t = static_cast<double>(it) / (kTimeSamples - 1);
        for (int ix = 0; ix < kSpaceSamples; ++ix) {
            const double x = static_cast<double>(ix + 1) / (kSpaceSamples + 1);
            for (int k = 0; k < samples; ++k) {
                const double r = rs[k];
                kb.update(std::abs(set.b(t, x, r)) / (1.0 + std::abs(r)), t, x, r);
                kg.update(std::abs(set.g(t, x, r)) / (1.0 + r * r), t, x, r);
                ks.update(std::abs(set.sigma(t, x, r)), t, x, r);
                kdb.update(std::abs(set.db_dr(t, x, r)) / (1.0 + std::abs(r)), t, x, r);
                kdg.update(std::abs(set.dg_dr(t, x, r)) / (1.0 + std::abs(r)), t, x, r);
                kd2g.update(std::abs(set.d2g_dr2(t, x, r)), t, x, r);

                // Centered finite differences of b and g against the supplied
                // derivative evaluators.
                const double db_fd = (set.b(t, x, r + kFdStep) - set.b(t, x, r - kFdStep)) / (2 * kFdStep);
                const double dg_fd = (set.g(t, x, r + kFdStep) - set.g(t, x, r - kFdStep)) / (2 * kFdStep);
                const double d2g_fd =
                    (set.dg_dr(t, x, r + kFdStep) - set.dg_dr(t, x, r - kFdStep)) / (2 * kFdStep);
                const double db_sup = set.db_dr(t, x, r);
                const double dg_sup = set.dg_dr(t, x, r);
                const double d2g_sup = set.d2g_dr2(t, x, r);
                const double db_def = std::abs(db_fd - db_sup);
                const double dg_def = std::abs(dg_fd - dg_sup);
                const double d2g_def = std::abs(d2g_fd - d2g_sup);
                fd_b.update(db_def, t, x, r);
                fd_g.update(dg_def, t, x, r);
                fd_g2.update(d2g_def, t, x, r);
                if (db_def > kFdRelTol * (1.0 + std::abs(db_sup))) fd_b_ok = false;
                if (dg_def > kFdRelTol * (1.0 + std::abs(dg_sup))) fd_g_ok = false;
                if (d2g_def > kFdRelTol * (1.0 + std::abs(d2g_sup))) fd_g2_ok = false;

                for (int j = k + 1; j < samples; ++j) {
                    const double r2 = rs[j];
                    const double dr = std::abs(r2 - r);
                    if (dr == 0.0) continue;
                    const double span = 1.0 + std::abs(r) + std::abs(r2);
                    lb.update(std::abs(set.b(t, x, r) - set.b(t, x, r2)) / (dr * span), t, x, r2);
                    lg.update(std::abs(set.g(t, x, r) - set.g(t, x, r2)) / (dr * span), t, x, r2);
                    ls.update(std::abs(set.sigma(t, x, r) - set.sigma(t, x, r2)) / dr, t, x, r2);
                    ldb.update(std::abs(set.db_dr(t, x, r) - set.db_dr(t, x, r2)) / dr, t, x, r2);
                    ldg.update(std::abs(set.dg_dr(t, x, r) - set.dg_dr(t, x, r2)) / dr, t, x, r2);
                }
            }
        }
    }

    ValidationReport report;
    report.checks.push_back(bound_check("b_linear_growth", kb, set.growth_K));
    report.checks.push_back(bound_check("g_quadratic_growth", kg, set.growth_K));
    report.checks.push_back(bound_check("sigma_bounded", ks, set.growth_K));
    report.checks.push_back(bound_check("b_local_lipschitz", lb, set.lipschitz_L));
    report.checks.push_back(bound_check("g_local_lipschitz", lg, set.lipschitz_L));
    report.checks.push_back(bound_check("sigma_lipschitz", ls, set.lipschitz_L));
    report.checks.push_back(bound_check("db_dr_linear_growth", kdb, set.growth_K));
    report.checks.push_back(bound_check("dg_dr_linear_growth", kdg, set.growth_K));
    report.checks.push_back(bound_check("d2g_dr2_bounded", kd2g, set.growth_K));
    report.checks.push_back(bound_check("db_dr_lipschitz", ldb, set.lipschitz_L));
    report.checks.push_back(bound_check("dg_dr_lipschitz", ldg, set.lipschitz_L));

    auto fd_check = [](std::string name, const MaxTracker& m, bool ok) {
        AssumptionCheck c;
        c.name = std::move(name);
        c.pass = ok;
        c.measured = m.value;
        c.allowed = kFdRelTol;
        c.witness_t = m.t;
        c.witness_x = m.x;
        c.witness_r = m.r;
        return c;
    };
    report.checks.push_back(fd_check("db_dr_consistency", fd_b, fd_b_ok));
    report.checks.push_back(fd_check("dg_dr_consistency", fd_g, fd_g_ok));
    report.checks.push_back(fd_check("d2g_dr2_consistency", fd_g2, fd_g2_ok));

    report.measured_growth_K =
        std::max({kb.value, kg.value, ks.value, kdb.value, kdg.value, kd2g.value});
    report.measured_lipschitz_L =
        std::max({lb.value, lg.value, ls.value, ldb.value, ldg.value});
    return report;
}

}  // namespace spdelab
