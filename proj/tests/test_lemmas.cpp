#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/lemmas.hpp"

using namespace spdelab;

namespace {

LemmaOptions quick() {
    LemmaOptions o;
    o.seed = 5;
    o.draws = 200;
    o.exactness_draws = 20;
    o.modes = 32;
    o.paths = 2000;
    return o;
}

}  // namespace

TEST_CASE("every part holds on random draws") {
    auto report = verify_lemmas(quick(), 2);
    for (const auto& part : report.parts) {
        CAPTURE(part.name);
        CHECK(part.passed);
        CHECK(part.violations == 0);
        CHECK(part.checks > 0);
    }
    CHECK(report.all_passed());
    for (const char* name : {"semigroup_power", "semigroup_difference", "stochastic_convolution_bound",
                             "deterministic_convolution_bound", "stochastic_convolution_exactness",
                             "deterministic_convolution_exactness", "convolution_limit", "burkholder_p2",
                             "burkholder_p4"}) {
        CAPTURE(name);
        CHECK(report.find(name) != nullptr);
    }
    // sharp constants: the worst ratio gets close to 1 but never above
    CHECK(report.find("semigroup_power")->worst <= 1.0 + 1e-12);
    CHECK(report.find("semigroup_power")->worst > 0.5);
    CHECK(report.find("stochastic_convolution_exactness")->worst < 1e-8);
}

TEST_CASE("a wider power range and fixed windows") {
    auto o = quick();
    o.mu_max = 3.0;
    o.t = 0.01;
    o.tau1 = 0.02;
    o.tau2 = 0.05;
    o.p_values = {2.0};
    auto report = verify_lemmas(o, 1);
    CHECK(report.all_passed());
    CHECK(report.find("burkholder_p4") == nullptr);
}

TEST_CASE("reports do not depend on the worker count") {
    auto o = quick();
    o.draws = 50;
    o.paths = 300;
    auto a = verify_lemmas(o, 1);
    auto b = verify_lemmas(o, 3);
    REQUIRE(a.parts.size() == b.parts.size());
    for (std::size_t i = 0; i < a.parts.size(); ++i) CHECK(a.parts[i].worst == b.parts[i].worst);
}

TEST_CASE("inconsistent options are rejected") {
    auto o = quick();
    o.tau1 = 0.2;
    o.tau2 = 0.1;
    CHECK_THROWS_AS(validate(o), std::invalid_argument);
    o.tau2 = 0.2;  // zero-length window
    CHECK_THROWS_AS(validate(o), std::invalid_argument);
    o.tau2.reset();
    CHECK_THROWS_AS(validate(o), std::invalid_argument);
    auto p = quick();
    p.p_values = {1.5};
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    auto d = quick();
    d.draws = 0;
    CHECK_THROWS_AS(validate(d), std::invalid_argument);
}
