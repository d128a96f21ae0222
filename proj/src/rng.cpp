#include "spdelab/rng.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

namespace spdelab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

Philox4x32::Key key_of(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// 53-bit uniform on (0,1]; never zero so the logarithm below is finite.
double unit_interval(std::uint32_t hi, std::uint32_t lo) noexcept {
    std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

Philox4x32::Counter block(const StreamHandle& stream, std::uint32_t step,
                          std::uint32_t index) noexcept {
    return Philox4x32::generate({index, step, stream.path, static_cast<std::uint32_t>(stream.domain)},
                                key_of(stream.master_seed));
}

void box_muller(const Philox4x32::Counter& bits, double& z0, double& z1) noexcept {
    double u1 = unit_interval(bits[0], bits[1]);
    double u2 = unit_interval(bits[2], bits[3]);
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double standard_normal(const StreamHandle& stream, std::uint32_t step, std::uint32_t mode) noexcept {
    double z0 = 0.0;
    double z1 = 0.0;
    box_muller(block(stream, step, mode / 2), z0, z1);
    return (mode % 2 == 0) ? z0 : z1;
}

void standard_normals(const StreamHandle& stream, std::uint32_t step, double* out,
                      std::size_t count) noexcept {
    std::size_t pairs = count / 2;
    for (std::size_t j = 0; j < pairs; ++j) {
        box_muller(block(stream, step, static_cast<std::uint32_t>(j)), out[2 * j], out[2 * j + 1]);
    }
    if (count % 2 != 0) {
        double spare = 0.0;
        box_muller(block(stream, step, static_cast<std::uint32_t>(pairs)), out[count - 1], spare);
    }
}

double uniform_open(const StreamHandle& stream, std::uint32_t step, std::uint32_t index) noexcept {
    auto bits = block(stream, step, index);
    // 53 bits from the first half, shifted off both endpoints.
    std::uint64_t v = ((static_cast<std::uint64_t>(bits[0]) << 32) | bits[1]) >> 11;
    return (static_cast<double>(v) + 0.5) * 0x1.0p-53;
}

}  // namespace spdelab
