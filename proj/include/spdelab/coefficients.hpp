#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace spdelab {

using CoefficientFn = std::function<double(double t, double x, double r)>;

/// Evaluators for the reaction term b, the flux g, the noise amplitude sigma,
/// and their r-derivatives, together with the declared growth constant K
/// (|b| <= K(1+|r|), |g| <= K(1+r^2), |sigma| <= K, |d_r b|,|d_r g| <= K(1+|r|),
/// |d2_r g| <= K) and Lipschitz constant L. Evaluators must be pure and
/// defined for all real r and (t,x) in [0,T]x[0,1].
struct CoefficientSet {
    std::string label;
    CoefficientFn b;
    CoefficientFn g;
    CoefficientFn sigma;
    CoefficientFn db_dr;
    CoefficientFn dg_dr;
    CoefficientFn d2g_dr2;
    double growth_K = 1.0;
    double lipschitz_L = 1.0;
};

enum class Preset { additive, burgers, reaction_diffusion };

CoefficientSet make_preset(Preset preset);
CoefficientSet make_preset(std::string_view name);  // throws std::invalid_argument
std::vector<std::string> preset_names();

struct AssumptionCheck {
    std::string name;
    bool pass = true;
    double measured = 0.0;   // measured constant or defect
    double allowed = 0.0;    // declared bound it was checked against
    double witness_t = 0.0, witness_x = 0.0, witness_r = 0.0;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    double measured_growth_K = 0.0;
    double measured_lipschitz_L = 0.0;

    bool all_pass() const;
    const AssumptionCheck* find(std::string_view name) const;
};

/// Samples a deterministic (t,x,r) lattice with r in [r_min, r_max] and
/// checks the growth bounds, divided-difference Lipschitz bounds, and the
/// consistency of the supplied derivatives against centered differences
/// (step 1e-5, relative tolerance 1e-3). Report-only: failures set flags and
/// record the witness point.
ValidationReport validate_assumptions(const CoefficientSet& set, double r_min, double r_max,
                                      int samples);

}  // namespace spdelab
