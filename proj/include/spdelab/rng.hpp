#pragma once

// Counter-based random numbers. Every Gaussian draw is a pure function of
// (master seed, path, step, mode), so results do not depend on the order in
// which paths are scheduled.

#include <array>
#include <cstddef>
#include <cstdint>

namespace spdelab {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// Separate sub-streams for the different consumers of one master seed.
enum class StreamDomain : std::uint32_t {
    wiener = 0,
    probe = 1,  // random test points used by model validation
    lemma = 2,  // random parameter draws for lemma checks
};

/// Address of one path's noise within a master seed.
struct StreamHandle {
    std::uint64_t master_seed = 0;
    std::uint32_t path = 0;
    StreamDomain domain = StreamDomain::wiener;
};

/// Standard normal draw at (step, mode) of the stream. Modes are paired:
/// one Philox block feeds a Box-Muller pair for modes 2j and 2j+1.
double standard_normal(const StreamHandle& stream, std::uint32_t step, std::uint32_t mode) noexcept;

/// Fill out[m] = standard_normal(stream, step, m) for m < out.size(), one block per pair.
void standard_normals(const StreamHandle& stream, std::uint32_t step, double* out,
                      std::size_t count) noexcept;

/// Uniform draw on (0,1) at (step, index) of the stream.
double uniform_open(const StreamHandle& stream, std::uint32_t step, std::uint32_t index) noexcept;

}  // namespace spdelab
