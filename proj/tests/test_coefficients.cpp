#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "spdelab/coefficients.hpp"

using namespace spdelab;

TEST_CASE("preset evaluators") {
    const auto additive = make_preset("additive");
    CHECK(additive.sigma(0.3, 0.7, -5.0) == 1.0);
    CHECK(additive.sigma(0.0, 0.0, 100.0) == 1.0);
    CHECK(additive.dg_dr(0.1, 0.2, 3.0) == 0.0);
    CHECK(additive.b(0.5, 0.5, 2.0) == 0.0);

    const auto burgers = make_preset(Preset::burgers);
    CHECK(burgers.g(0.1, 0.9, 2.0) == doctest::Approx(2.0));
    CHECK(burgers.dg_dr(0.1, 0.9, 2.0) == doctest::Approx(2.0));
    CHECK(burgers.d2g_dr2(0.1, 0.9, -7.0) == doctest::Approx(1.0));
    CHECK(burgers.sigma(0.0, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(burgers.sigma(0.0, 0.0, 3.0) == doctest::Approx(0.1));

    const auto rd = make_preset(Preset::reaction_diffusion);
    CHECK(rd.b(0.0, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(rd.sigma(0.0, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(rd.g(0.0, 0.0, 4.0) == 0.0);

    CHECK_THROWS_AS(make_preset("foo"), std::invalid_argument);
}

TEST_CASE("all presets validate on [-20, 20] with their declared constants") {
    for (const auto& name : preset_names()) {
        const auto set = make_preset(name);
        const auto report = validate_assumptions(set, -20.0, 20.0, 81);
        INFO("preset ", name);
        for (const auto& c : report.checks) {
            INFO("check ", c.name, " measured ", c.measured, " allowed ", c.allowed);
            CHECK(c.pass);
        }
        CHECK(report.all_pass());
    }
}

TEST_CASE("unbounded sigma fails the boundedness check with a witness") {
    auto set = make_preset("additive");
    set.label = "custom";
    set.sigma = [](double, double, double r) { return r; };
    const auto report = validate_assumptions(set, -10.0, 10.0, 41);
    const auto* check = report.find("sigma_bounded");
    REQUIRE(check != nullptr);
    CHECK_FALSE(check->pass);
    CHECK(std::abs(check->witness_r) == doctest::Approx(10.0));
    CHECK(check->measured == doctest::Approx(10.0));
    CHECK_FALSE(report.all_pass());
}

TEST_CASE("wrong derivative evaluator is caught by the centered-difference check") {
    auto set = make_preset("burgers");
    set.label = "custom";
    set.dg_dr = [](double, double, double r) { return 0.5 * r; };  // should be r
    const auto report = validate_assumptions(set, -4.0, 4.0, 41);
    const auto* check = report.find("dg_dr_consistency");
    REQUIRE(check != nullptr);
    CHECK_FALSE(check->pass);
    // defect at the witness is |fd - supplied| = |r - r/2| = |r|/2 -> 2 at r = +-4
    CHECK(check->measured == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(check->witness_r) == doctest::Approx(4.0));
}

TEST_CASE("measured growth constants are monotone in the sampled range") {
    for (const auto& name : preset_names()) {
        const auto set = make_preset(name);
        double prev_k = -1.0, prev_l = -1.0;
        for (double range : {5.0, 10.0, 20.0, 40.0}) {
            // fixed spacing and symmetric ranges make the sample lattices
            // nest, so maxima can only grow with the range
            const int samples = static_cast<int>(range) * 8 + 1;
            const auto report = validate_assumptions(set, -range, range, samples);
            CHECK(report.measured_growth_K >= prev_k - 1e-12);
            CHECK(report.measured_lipschitz_L >= prev_l - 1e-12);
            prev_k = report.measured_growth_K;
            prev_l = report.measured_lipschitz_L;
        }
    }
}

TEST_CASE("validate_assumptions rejects bad sampling requests") {
    const auto set = make_preset("additive");
    CHECK_THROWS_AS(validate_assumptions(set, -1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(validate_assumptions(set, 1.0, -1.0, 10), std::invalid_argument);
}
