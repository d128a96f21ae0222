#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/sine_transform.hpp"
#include "testing.hpp"

using namespace spdelab;

TEST_CASE("synthesis matches the eigenfunctions") {
    SineTransform tr(4, 10);
    REQUIRE(tr.samples() == 9);
    std::vector<double> c{0.0, 0.0, 1.0, 0.0};
    std::vector<double> v(tr.samples());
    tr.forward(c, v);
    for (std::size_t j = 1; j <= 9; ++j) {
        CHECK(v[j - 1] == doctest::Approx(std::sqrt(2.0) * std::sin(3.0 * std::numbers::pi * j / 10.0)).epsilon(1e-14));
    }
}

TEST_CASE("analysis inverts synthesis below the grid Nyquist limit") {
    testing::Gen g(1);
    for (std::size_t n : {1u, 3u, 16u, 33u}) {
        for (std::size_t m : {2 * n, 2 * n + 1, 4 * n}) {
            SineTransform tr(n, m);
            auto x = g.normals(n);
            std::vector<double> v(tr.samples()), back(n);
            tr.forward(x, v);
            tr.inverse(v, back);
            for (std::size_t k = 0; k < n; ++k) CHECK(back[k] == doctest::Approx(x[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("free functions agree with the class") {
    SpectralCoeffs x({1.0, -0.5, 0.25});
    auto v = sine_transform_forward(x, 8);
    REQUIRE(v.size() == 7);
    auto back = sine_transform_inverse(v, 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(x[k]).epsilon(1e-13));
}

TEST_CASE("grid and size errors") {
    CHECK_THROWS_AS(SineTransform(4, 7), std::invalid_argument);
    CHECK_THROWS_AS(SineTransform(0, 8), std::invalid_argument);
    SineTransform tr(2, 4);
    std::vector<double> wrong(5), c(2);
    CHECK_THROWS_AS(tr.inverse(wrong, c), std::invalid_argument);
}
