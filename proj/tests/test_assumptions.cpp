#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/assumptions.hpp"

using namespace spdelab;

TEST_CASE("the additive example satisfies every check at r = 0") {
    ModelRecipe r;  // example covariance, G = I, X0 = 0
    r.modes = 64;
    auto report = validate_assumptions(r);
    CHECK(report.all_passed());
    for (const char* name : {"diffusion_lipschitz", "diffusion_growth", "drift_lipschitz", "initial_regularity",
                             "diffusion_L2r_series"}) {
        CAPTURE(name);
        REQUIRE(report.find(name) != nullptr);
    }
    CHECK(report.find("diffusion_lipschitz")->measured == 0.0);
}

TEST_CASE("the example's L_2,r^0 series diverges for r > 0") {
    ModelRecipe r;
    r.modes = 64;
    r.r = 0.25;
    auto report = validate_assumptions(r);
    const auto* series = report.find("diffusion_L2r_series");
    REQUIRE(series != nullptr);
    CHECK(!series->passed);
    CHECK(series->detail.find("diverging") != std::string::npos);
    // the truncated model itself is fine
    CHECK(validate_assumptions(r.build()).all_passed());
}

TEST_CASE("white noise is not trace class") {
    ModelRecipe r;
    r.modes = 32;
    r.covariance = ModelRecipe::Covariance::constant;
    r.q_values = {1.0};
    CHECK(!validate_assumptions(r).find("diffusion_L2r_series")->passed);
}

TEST_CASE("pinned truncations only get a finiteness check") {
    ModelRecipe r;
    r.modes = 3;
    r.covariance = ModelRecipe::Covariance::custom;
    r.q_values = {1.0, 0.5, 0.25};
    const auto* c = validate_assumptions(r).find("diffusion_L2r_series");
    REQUIRE(c != nullptr);
    CHECK(c->passed);
    CHECK(c->detail.find("not checked") != std::string::npos);
}

TEST_CASE("nonlinear coefficients respect their recorded constants") {
    ModelRecipe r;
    r.modes = 16;
    r.covariance = ModelRecipe::Covariance::constant;
    r.q_values = {0.5};
    r.drift = ModelRecipe::Drift::nemytskii;
    r.drift_function = "sin";
    r.diffusion = ModelRecipe::Diffusion::multiplicative;
    r.diffusion_function = "tanh";
    r.r = 0.5;
    auto report = validate_assumptions(r.build(), {.seed = 3, .probes = 24});
    CHECK(report.all_passed());
    const auto* f = report.find("drift_lipschitz");
    CHECK(f->measured > 0.0);
    CHECK(f->measured <= std::pow(std::acos(-1.0) * std::acos(-1.0), -0.25) * (1.0 + 1e-9));
}

TEST_CASE("initial data with a divergent H^{r+1} norm is flagged through the model") {
    // X0 with coefficients k^{-1}: ||X0||_{2}^2 = sum pi^4 k^2, finite at any truncation
    ModelRecipe r;
    r.modes = 8;
    r.initial = {1.0, 0.5, 1.0 / 3.0};
    auto report = validate_assumptions(r);
    CHECK(report.find("initial_regularity")->passed);
    CHECK(report.find("initial_regularity")->measured > 0.0);
}
