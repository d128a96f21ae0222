#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/integrator.hpp"
#include "testing.hpp"

using namespace spdelab;

namespace {

SolverConfig grid(double T, std::size_t steps, std::size_t paths, std::vector<double> snaps, std::uint64_t seed = 1) {
    SolverConfig c;
    c.T = T;
    c.steps = steps;
    c.paths = paths;
    c.master_seed = seed;
    c.snapshot_times = std::move(snaps);
    return c;
}

ModelSpec nonlinear_model(std::size_t n) {
    std::vector<double> x0(n, 0.0);
    x0[0] = 1.0;
    x0[2] = -0.5;
    return ModelSpec(dirichlet_laplacian_1d(n), example_covariance(n), DriftSpec::nemytskii("sin", n),
                     DiffusionSpec::multiplicative("one_plus_half_sin", n), SpectralCoeffs(x0), 0.0, 2.0);
}

}  // namespace

TEST_CASE("paths are pure functions of (model, config, path)") {
    auto m = nonlinear_model(8);
    auto c = grid(0.1, 50, 8, {0.05, 0.1});
    auto a = simulate_path(m, c, 3);
    auto b = simulate_path(m, c, 3);
    REQUIRE(a.snapshots.size() == 2);
    CHECK(a.snapshots[1].state == b.snapshots[1].state);
    CHECK(!(a.snapshots[1].state == simulate_path(m, c, 4).snapshots[1].state));
    auto e1 = simulate_ensemble(m, c, 1);
    auto e4 = simulate_ensemble(m, c, 4);
    for (std::size_t p = 0; p < c.paths; ++p) {
        for (std::size_t i = 0; i < 2; ++i) CHECK(e1[p].snapshots[i].state == e4[p].snapshots[i].state);
    }
}

TEST_CASE("one simulated step equals the explicit step formula") {
    auto m = nonlinear_model(8);
    auto c = grid(0.01, 1, 1, {0.01}, 99);
    auto traj = simulate_path(m, c, 0);
    auto dw = sample_increment(m.covariance(), 0.01, {99, 0, StreamDomain::wiener}, 0);
    auto step = exponential_euler_step(m, m.initial(), dw, 0.01);
    for (std::size_t k = 0; k < 8; ++k) CHECK(traj.snapshots[0].state[k] == doctest::Approx(step[k]).epsilon(1e-14));
    CHECK_THROWS_AS(exponential_euler_step(m, m.initial(), dw, 0.0), std::invalid_argument);
}

TEST_CASE("noise-free linear dynamics") {
    const std::size_t n = 6;
    std::vector<double> x0{1.0, 0.5, -0.25, 2.0, 0.0, 1.0};
    CovarianceSpectrum none(std::vector<double>(n, 0.0));
    ModelSpec heat(dirichlet_laplacian_1d(n), none, DriftSpec::zero(), DiffusionSpec::additive(std::vector<double>(n, 1.0)),
                   SpectralCoeffs(x0), 0.0, 2.0);
    auto c = grid(0.05, 100, 1, {0.05});
    auto x = simulate_path(heat, c, 0).snapshots[0].state;
    auto exact = apply_semigroup(heat.op(), 0.05, SpectralCoeffs(x0));
    for (std::size_t k = 0; k < n; ++k) CHECK(x[k] == doctest::Approx(exact[k]).epsilon(1e-12));

    // F(x) = f x: x_{j+1} = e^{-lambda h}(1 - h f) x_j
    std::vector<double> f{3.0, -1.0, 0.5, 0.0, 2.0, 1.0};
    ModelSpec lin(dirichlet_laplacian_1d(n), none, DriftSpec::diagonal_linear(f),
                  DiffusionSpec::additive(std::vector<double>(n, 1.0)), SpectralCoeffs(x0), 0.0, 2.0);
    auto y = simulate_path(lin, c, 0).snapshots[0].state;
    const double h = c.step_size();
    for (std::size_t k = 0; k < n; ++k) {
        double expect = x0[k] * std::pow(std::exp(-lin.op().eigenvalue(k) * h) * (1.0 - h * f[k]), 100.0);
        CHECK(y[k] == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("constant multiplicative diffusion reproduces additive noise") {
    const std::size_t n = 8;
    ModelSpec mult(dirichlet_laplacian_1d(n), example_covariance(n), DriftSpec::zero(),
                   DiffusionSpec::multiplicative("one", n), SpectralCoeffs::zeros(n), 0.0, 2.0);
    auto add = example_section5_model(n);
    auto c = grid(0.02, 20, 1, {0.02});
    auto a = simulate_path(mult, c, 5).snapshots[0].state;
    auto b = simulate_path(add, c, 5).snapshots[0].state;
    for (std::size_t k = 0; k < n; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-11));
}

TEST_CASE("exact OU and Euler share their normals") {
    auto m = example_section5_model(8);
    auto c = grid(0.01, 1, 1, {0.01}, 3);
    auto euler = simulate_path(m, c, 0).snapshots[0].state;
    c.scheme = Scheme::exact_ou;
    auto ou = simulate(m, c, 0).snapshots[0].state;
    for (std::size_t k = 1; k < 8; ++k) {
        double lambda = m.op().eigenvalue(k), h = 0.01;
        double ratio = std::sqrt(-std::expm1(-2.0 * lambda * h) / (2.0 * lambda)) / (std::exp(-lambda * h) * std::sqrt(h));
        CHECK(ou[k] == doctest::Approx(ratio * euler[k]).epsilon(1e-12));
    }
    CHECK(ou[0] == 0.0);
    CHECK_THROWS_AS(exact_ou_path(nonlinear_model(8), c, 0), std::invalid_argument);
}

TEST_CASE("exact OU variance per mode") {
    auto m = example_section5_model(4);
    auto c = grid(0.2, 4, 20000, {0.2});
    c.scheme = Scheme::exact_ou;
    auto paths = simulate_ensemble(m, c, 2);
    for (std::size_t k = 1; k < 4; ++k) {
        double lambda = m.op().eigenvalue(k);
        double var = m.covariance()[k] * -std::expm1(-2.0 * lambda * 0.2) / (2.0 * lambda);
        double m2 = 0.0;
        for (const auto& p : paths) m2 += p.snapshots[0].state[k] * p.snapshots[0].state[k];
        m2 /= static_cast<double>(paths.size());
        CHECK(std::abs(m2 - var) < 5.0 * var * std::sqrt(2.0 / paths.size()));
    }
}

TEST_CASE("snapshots at t = 0 and errors") {
    auto m = example_section5_model(4);
    auto c = grid(0.0, 1, 1, {0.0});
    auto t = simulate_path(m, c, 0);
    REQUIRE(t.snapshots.size() == 1);
    CHECK(t.snapshots[0].state == m.initial());
    CHECK_THROWS_AS(simulate_path(m, grid(1.0, 10, 1, {0.55}), 0), std::invalid_argument);
}

TEST_CASE("parallel_for_paths covers every path once and forwards exceptions") {
    std::vector<std::atomic<int>> hits(1001);
    parallel_for_paths(1001, 4, [&](std::size_t p) { hits[p]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for_paths(10, 3, [](std::size_t p) {
                        if (p == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    CHECK(default_threads() >= 1);
}

TEST_CASE("linear additive paths are affine in the initial value") {
    const std::size_t n = 8;
    std::vector<double> x0{1.0, -0.5, 0.25, 0.0, 0.1, 0.0, 0.0, 0.3};
    auto make = [&](double scale) {
        std::vector<double> v(x0);
        for (double& x : v) x *= scale;
        return ModelSpec(dirichlet_laplacian_1d(n), example_covariance(n), DriftSpec::zero(),
                         DiffusionSpec::additive(std::vector<double>(n, 1.0)), SpectralCoeffs(v), 0.0, 2.0);
    };
    auto c = grid(0.05, 20, 1, {0.05}, 12);
    auto zero = simulate_path(make(0.0), c, 0).snapshots[0].state;
    auto one = simulate_path(make(1.0), c, 0).snapshots[0].state;
    auto two = simulate_path(make(2.0), c, 0).snapshots[0].state;
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(two[k] - zero[k] == doctest::Approx(2.0 * (one[k] - zero[k])).epsilon(1e-12));
    }
}

TEST_CASE("the ensemble mean follows the heat flow") {
    const std::size_t n = 4;
    ModelSpec m(dirichlet_laplacian_1d(n), example_covariance(n), DriftSpec::zero(),
                DiffusionSpec::additive(std::vector<double>(n, 1.0)), SpectralCoeffs({0.5, 0.5, 0.5, 0.5}), 0.0, 2.0);
    auto c = grid(0.02, 40, 10000, {0.02}, 21);
    auto paths = simulate_ensemble(m, c, 2);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v;
        for (const auto& p : paths) v.push_back(p.snapshots[0].state[k]);
        double mean = 0.0, ss = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        for (double x : v) ss += (x - mean) * (x - mean);
        double se = std::sqrt(ss / (v.size() - 1.0) / v.size());
        double exact = std::exp(-m.op().eigenvalue(k) * 0.02) * 0.5;
        CAPTURE(k);
        if (m.covariance()[k] == 0.0) {
            CHECK(mean == doctest::Approx(std::pow(std::exp(-m.op().eigenvalue(k) * 0.02 / 40), 40) * 0.5));
        } else {
            CHECK(std::abs(mean - exact) < 3.0 * se);
        }
    }
}

TEST_CASE("one Euler step against the exact transition") {
    // mean e^{-lambda h} x exactly; variance q h e^{-2 lambda h} vs q (1 - e^{-2 lambda h}) / (2 lambda)
    auto m = example_section5_model(4);
    for (double h : {1e-2, 1e-3, 1e-4}) {
        auto c = grid(h, 1, 1, {h}, 2);
        double lambda = m.op().eigenvalue(2), q = m.covariance()[2];
        double euler = q * h * std::exp(-2.0 * lambda * h);
        double exact = q * -std::expm1(-2.0 * lambda * h) / (2.0 * lambda);
        // relative gap is lambda h + O(h^2)
        CHECK(std::abs(euler / exact - 1.0) <= lambda * h * (1.0 + lambda * h));
        auto x = simulate_path(m, c, 0).snapshots[0].state[2];
        c.scheme = Scheme::exact_ou;
        auto y = simulate(m, c, 0).snapshots[0].state[2];
        CHECK(x / y == doctest::Approx(std::sqrt(euler / exact)).epsilon(1e-12));
    }
}

TEST_CASE("Euler paths approach the exact paths on the same increments") {
    auto m = example_section5_model(16);
    const double T = 0.1;
    std::vector<double> rms;
    for (std::size_t steps : {64, 128, 256}) {
        auto c = grid(T, steps, 200, {T}, 8);
        auto euler = simulate_ensemble(m, c, 2);
        c.scheme = Scheme::exact_ou;
        auto exact = simulate_ensemble(m, c, 2);
        double ss = 0.0;
        for (std::size_t p = 0; p < c.paths; ++p) {
            double d = hdot_norm(m.op(), 0.0, euler[p].snapshots[0].state - exact[p].snapshots[0].state);
            ss += d * d;
        }
        rms.push_back(std::sqrt(ss / c.paths));
    }
    CHECK(rms[1] < rms[0]);
    CHECK(rms[2] < rms[1]);
}
