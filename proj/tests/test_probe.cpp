#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/integrator.hpp"
#include "spdelab/probe.hpp"
#include "testing.hpp"

using namespace spdelab;
using testing::rel_err;

namespace {

SolverConfig ou_grid(double T, std::size_t steps, std::size_t paths, std::vector<double> snaps) {
    SolverConfig c;
    c.T = T;
    c.steps = steps;
    c.paths = paths;
    c.master_seed = 17;
    c.snapshot_times = std::move(snaps);
    c.scheme = Scheme::exact_ou;
    return c;
}

std::vector<double> decade_deltas() {
    std::vector<double> d;
    for (int i = 0; i < 10; ++i) d.push_back(std::pow(10.0, -6.0 + 4.0 * i / 9.0));
    return d;
}

}  // namespace

TEST_CASE("Lp estimates") {
    std::vector<double> ones(10, 1.0);
    auto e = estimate_lp_norm(ones, 3.0);
    CHECK(e.estimate == doctest::Approx(1.0));
    CHECK(e.std_error == 0.0);
    std::vector<double> v{3.0, 4.0};
    auto f = estimate_lp_norm(v, 2.0);
    CHECK(f.estimate == doctest::Approx(std::sqrt(12.5)));
    // delta method: (1/p) m^{1/p-1} sd(x^p)/sqrt(n), sd of {9,16} = 7/sqrt(2)
    CHECK(f.std_error == doctest::Approx(0.5 / std::sqrt(12.5) * (7.0 / std::sqrt(2.0)) / std::sqrt(2.0)));
    // non-integer exponent uses |x|^p
    std::vector<double> w{-2.0, 2.0};
    CHECK(estimate_lp_norm(w, 2.5).estimate == doctest::Approx(2.0));
    CHECK_THROWS_AS(estimate_lp_norm(std::vector<double>{}, 2.0), std::invalid_argument);
}

TEST_CASE("predicted exponents") {
    CHECK(predicted_temporal_exponent(0.0, 0.0) == 0.5);
    CHECK(predicted_temporal_exponent(0.0, 0.5) == 0.25);
    CHECK(predicted_temporal_exponent(0.5, 1.0) == 0.25);
    CHECK(predicted_temporal_exponent(1.0, 1.0) == 0.5);
}

TEST_CASE("holder fit on an exact power law") {
    std::vector<LagMoment> m;
    for (int i = 0; i < 10; ++i) {
        double lag = 1e-4 * std::pow(10.0, 2.0 * i / 9.0);
        m.push_back({lag, 2.0 * std::pow(lag, 0.3)});
    }
    auto fit = fit_holder_exponent(m, 0.5);
    CHECK(fit.slope == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(fit.slope_stderr < 1e-12);
    CHECK(fit.predicted == 0.5);
    CHECK(fit.lags.size() == 10);

    std::vector<LagMoment> few(m.begin(), m.begin() + 7);
    CHECK_THROWS_AS(fit_holder_exponent(few, 0.5), std::invalid_argument);
    std::vector<LagMoment> narrow;
    for (int i = 0; i < 10; ++i) narrow.push_back({1.0 + i, 1.0 + i});
    CHECK_THROWS_AS(fit_holder_exponent(narrow, 0.5), std::invalid_argument);
    m[3].estimate = 0.0;
    CHECK_THROWS_AS(fit_holder_exponent(m, 0.5), std::invalid_argument);
}

TEST_CASE("geometric lags sit on the grid") {
    SolverConfig c = ou_grid(1.0, 1000, 1, {1.0});
    auto lags = geometric_lags(c, 1e-4, 0.1, 10);
    CHECK(lags.front() == doctest::Approx(1e-3));  // rounded up to one step
    CHECK(lags.back() == doctest::Approx(0.1));
    for (std::size_t i = 1; i < lags.size(); ++i) CHECK(lags[i] > lags[i - 1]);
    for (double l : lags) CHECK(std::abs(l / 1e-3 - std::round(l / 1e-3)) < 1e-9);
    CHECK_THROWS_AS(geometric_lags(c, 0.1, 0.01, 5), std::invalid_argument);
}

TEST_CASE("the example series") {
    // mpmath, N = 2, r = 0, t = 0.1
    CHECK(rel_err(example_series_partial_sum(0.0, 0.1, 2), 0.520148497218167) < 1e-14);
    CHECK(example_series_partial_sum(0.25, 0.1, 1000) < example_series_partial_sum(0.25, 0.1, 2000));
    CHECK_THROWS_AS(example_series_partial_sum(0.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(example_series_partial_sum(0.0, 0.1, 1), std::invalid_argument);
}

TEST_CASE("convolution increment scaling against frozen oracles") {
    // Oracle: the same closed form in 30-digit arithmetic, OLS on 10 deltas in [1e-6, 1e-2].
    auto deltas = decade_deltas();
    auto check = [&](std::size_t n, double s, double expected) {
        auto m = example_section5_model(n);
        auto fit = convolution_increment_scaling(m, s, deltas);
        CAPTURE(n);
        CAPTURE(s);
        CHECK(fit.slope == doctest::Approx(expected).epsilon(1e-9));
        CHECK(fit.values.size() == deltas.size());
    };
    check(1024, 0.0, 0.4676265766187);
    check(1024, 0.5, 0.389403241896118);
    check(1024, 0.9, 0.222552570560725);
    check(256, 0.9, 0.258244398961197);

    // trace-class noise at s = r: slope close to the saturated 1/2
    const std::size_t n = 1024;
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) q[k] = 1.0 / ((k + 1.0) * (k + 1.0));
    ModelSpec tc(dirichlet_laplacian_1d(n), CovarianceSpectrum(q), DriftSpec::zero(),
                 DiffusionSpec::additive(std::vector<double>(n, 1.0)), SpectralCoeffs::zeros(n), 0.0, 2.0);
    auto fit = convolution_increment_scaling(tc, 0.0, deltas);
    CHECK(fit.slope == doctest::Approx(0.484828670531865).epsilon(1e-9));
    CHECK(fit.predicted == 0.5);

    ModelSpec mult(dirichlet_laplacian_1d(8), example_covariance(8), DriftSpec::zero(),
                   DiffusionSpec::multiplicative("sin", 8), SpectralCoeffs::zeros(8), 0.0, 2.0);
    CHECK_THROWS_AS(convolution_increment_scaling(mult, 0.0, deltas), std::invalid_argument);
}

TEST_CASE("increment second moments against the OU formula") {
    const std::size_t n = 32;
    auto m = example_section5_model(n);
    auto c = ou_grid(0.1, 100, 4000, {0.1});
    const double t1 = 0.05, lag = 0.01;
    std::vector<std::pair<double, double>> pairs{{t1, t1 + lag}};
    auto samples = increment_samples(m, c, 0.0, pairs, 2);
    auto e = estimate_lp_norm(samples[0], 2.0);
    double exact = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double l = m.op().eigenvalue(k), q = m.covariance()[k];
        double a = -std::expm1(-l * lag);
        exact += q / (2.0 * l) * (a * a * -std::expm1(-2.0 * l * t1) + -std::expm1(-2.0 * l * lag));
    }
    CHECK(std::abs(e.estimate - std::sqrt(exact)) < 4.0 * e.std_error);

    // the trajectory overload measures the same thing
    SolverConfig full = c;
    full.snapshot_times = {t1, t1 + lag};
    auto paths = simulate_ensemble(m, full, 1);
    auto direct = increment_samples(m.op(), paths, 0.0, pairs);
    for (std::size_t p = 0; p < paths.size(); ++p) CHECK(direct[0][p] == doctest::Approx(samples[0][p]).epsilon(1e-13));
    std::vector<std::pair<double, double>> missing{{0.02, 0.03}};
    CHECK_THROWS_AS(increment_samples(m.op(), paths, 0.0, missing), std::invalid_argument);
}

TEST_CASE("snapshot moments match the Ito isometry") {
    auto m = example_section5_model(64);
    auto c = ou_grid(0.1, 10, 4000, {0.05, 0.1});
    auto est = snapshot_moments(m, c, {0.0, 2.0}, 2);
    REQUIRE(est.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        double t = c.snapshot_times[i], exact = 0.0;
        for (std::size_t k = 0; k < 64; ++k) {
            double l = m.op().eigenvalue(k);
            exact += m.covariance()[k] * -std::expm1(-2.0 * l * t) / (2.0 * l);
        }
        CHECK(std::abs(est[i].estimate - std::sqrt(exact)) < 4.0 * est[i].std_error);
    }
}

TEST_CASE("temporal probe on the additive example") {
    auto m = example_section5_model(16);
    auto c = ou_grid(0.2, 2000, 400, {0.2});
    auto lags = geometric_lags(c, 1e-4, 0.05, 10);
    std::vector<double> s{0.0, 0.5};
    auto probe = temporal_probe(m, c, s, 2.0, 0.1, lags, 2);
    REQUIRE(probe.results.size() == 2);
    CHECK(probe.results[0].fit.predicted == 0.5);
    CHECK(probe.results[1].fit.predicted == 0.25);
    CHECK(probe.results[0].moments.size() == lags.size());
    // same paths: higher smoothness index gives a rougher (smaller) exponent
    CHECK(probe.results[1].fit.slope < probe.results[0].fit.slope);
    CHECK_THROWS_AS(temporal_probe(m, c, s, 2.0, 0.10005, lags, 1), std::invalid_argument);
}

TEST_CASE("spatial sweep and continuity modulus") {
    ModelRecipe r;  // the additive example
    auto c = ou_grid(0.1, 10, 500, {0.05, 0.1});
    std::vector<std::size_t> modes{16, 32};
    auto sweep = spatial_sweep(r, c, 1.0, modes, 2);
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].modes == 16);
    CHECK(sweep[1].value > sweep[0].value);
    CHECK(sweep[1].time == doctest::Approx(0.1));

    auto m = example_section5_model(16);
    auto cm = ou_grid(0.2, 200, 300, {0.2});
    std::vector<double> lags{0.0, 0.01, 0.005};
    auto mod = continuity_modulus(m, cm, 0.1, lags, 2);
    REQUIRE(mod.size() == 3);
    CHECK(mod[0].estimate == 0.0);
    CHECK(mod[1].estimate > mod[2].estimate);
    CHECK_THROWS_AS(continuity_modulus(example_section5_model(16, 0.5), cm, 0.1, lags, 1), std::invalid_argument);
}

TEST_CASE("the example series is the assembled convolution energy") {
    for (std::size_t n : {2u, 50u, 3000u}) {
        auto op = dirichlet_laplacian_1d(n);
        auto q = example_covariance(n);
        std::vector<double> root(n);
        for (std::size_t k = 0; k < n; ++k) root[k] = std::sqrt(q[k]);
        double energy = stochastic_convolution_energy(op, 1.0, 0.0, 0.1, SpectralCoeffs(root));
        CHECK(rel_err(example_series_partial_sum(0.0, 0.1, n), energy) < 1e-12);
    }
}

TEST_CASE("common paths give tighter increments than independent ones") {
    auto m = example_section5_model(16);
    const std::size_t n = 400;
    auto c = ou_grid(0.1, 100, 2 * n, {0.05, 0.06});
    auto paths = simulate_ensemble(m, c, 2);
    auto variance = [](const std::vector<double>& v) {
        double mean = 0.0, ss = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        for (double x : v) ss += (x - mean) * (x - mean);
        return ss / (v.size() - 1.0);
    };
    std::vector<double> common, independent;
    for (std::size_t p = 0; p < n; ++p) {
        common.push_back(hdot_norm(m.op(), 0.0, paths[p].snapshots[1].state - paths[p].snapshots[0].state));
        independent.push_back(hdot_norm(m.op(), 0.0, paths[p].snapshots[1].state - paths[p + n].snapshots[0].state));
    }
    CHECK(variance(common) < variance(independent));
}
