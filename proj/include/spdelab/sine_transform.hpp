#pragma once

// Dense discrete sine transform between coefficients against
// e_k(y) = sqrt(2) sin(k pi y) and samples on the interior grid y_j = j/M.

#include <cstddef>
#include <span>
#include <vector>

#include "spdelab/spectrum.hpp"

namespace spdelab {

class SineTransform {
public:
    /// Requires grid >= 2 * modes.
    SineTransform(std::size_t modes, std::size_t grid);

    std::size_t modes() const noexcept { return modes_; }
    std::size_t grid() const noexcept { return grid_; }
    std::size_t samples() const noexcept { return grid_ - 1; }

    /// u_j = sum_k x_k sqrt(2) sin(k pi j / M), j = 1..M-1.
    void forward(std::span<const double> coeffs, std::span<double> values) const;

    /// c_k = (1/M) sum_j u_j sqrt(2) sin(k pi j / M): the trapezoid rule for
    /// (u, e_k), exact on band-limited data.
    void inverse(std::span<const double> values, std::span<double> coeffs) const;

private:
    std::size_t modes_;
    std::size_t grid_;
    std::vector<double> basis_;  // samples() x modes(), row-major
};

std::vector<double> sine_transform_forward(const SpectralCoeffs& x, std::size_t grid);

SpectralCoeffs sine_transform_inverse(std::span<const double> values, std::size_t modes);

}  // namespace spdelab
