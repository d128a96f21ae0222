#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/rng.hpp"

using namespace spdelab;

TEST_CASE("philox known answers") {
    // Reference vectors of Philox4x32-10, cross-checked with an independent Python implementation.
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normals are a pure function of their address") {
    StreamHandle s{42, 7, StreamDomain::wiener};
    CHECK(standard_normal(s, 3, 5) == standard_normal(s, 3, 5));
    std::vector<double> block(9);
    standard_normals(s, 3, block.data(), block.size());
    for (std::uint32_t m = 0; m < block.size(); ++m) CHECK(block[m] == standard_normal(s, 3, m));
    CHECK(standard_normal(s, 3, 5) != standard_normal(s, 4, 5));
    CHECK(standard_normal(s, 3, 5) != standard_normal({42, 8, StreamDomain::wiener}, 3, 5));
    CHECK(standard_normal(s, 3, 5) != standard_normal({43, 7, StreamDomain::wiener}, 3, 5));
    CHECK(standard_normal(s, 3, 5) != standard_normal({42, 7, StreamDomain::probe}, 3, 5));
    // seeds differing only in the high word
    CHECK(standard_normal({1ull << 40, 0, StreamDomain::wiener}, 0, 0) != standard_normal({0, 0, StreamDomain::wiener}, 0, 0));
}

TEST_CASE("normal moments") {
    StreamHandle s{2026, 0, StreamDomain::wiener};
    const int n = 200000;
    double m1 = 0, m2 = 0, m4 = 0;
    std::vector<double> z(8);
    for (int i = 0; i < n / 8; ++i) {
        standard_normals(s, static_cast<std::uint32_t>(i), z.data(), z.size());
        for (double v : z) {
            m1 += v;
            m2 += v * v;
            m4 += v * v * v * v;
        }
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 5.0 / std::sqrt(n));
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("uniforms lie strictly inside (0,1) and do not repeat") {
    StreamHandle s{9, 1, StreamDomain::lemma};
    std::set<double> seen;
    double mean = 0;
    for (std::uint32_t i = 0; i < 20000; ++i) {
        double u = uniform_open(s, i, i % 3);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        seen.insert(u);
        mean += u;
    }
    CHECK(seen.size() == 20000);
    CHECK(std::abs(mean / 20000 - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / 20000));
}
