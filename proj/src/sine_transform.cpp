#include "spdelab/sine_transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spdelab {

SineTransform::SineTransform(std::size_t modes, std::size_t grid) : modes_(modes), grid_(grid) {
    if (modes == 0) throw std::invalid_argument("SineTransform: modes must be >= 1");
    if (grid < 2 * modes) {
        throw std::invalid_argument("SineTransform: grid size M=" + std::to_string(grid) +
                                    " must be >= 2N=" + std::to_string(2 * modes));
    }
    basis_.resize(samples() * modes_);
    for (std::size_t j = 1; j < grid_; ++j) {
        for (std::size_t k = 1; k <= modes_; ++k) {
            // Reduce k*j mod 2M so the sine argument stays in [0, 2 pi).
            std::size_t phase = (k * j) % (2 * grid_);
            basis_[(j - 1) * modes_ + (k - 1)] =
                std::numbers::sqrt2 *
                std::sin(std::numbers::pi * static_cast<double>(phase) / static_cast<double>(grid_));
        }
    }
}

void SineTransform::forward(std::span<const double> coeffs, std::span<double> values) const {
    if (coeffs.size() != modes_ || values.size() != samples()) {
        throw std::invalid_argument("SineTransform::forward: size mismatch");
    }
    for (std::size_t j = 0; j < samples(); ++j) {
        const double* row = &basis_[j * modes_];
        double sum = 0.0;
        for (std::size_t k = 0; k < modes_; ++k) sum += row[k] * coeffs[k];
        values[j] = sum;
    }
}

void SineTransform::inverse(std::span<const double> values, std::span<double> coeffs) const {
    if (coeffs.size() != modes_ || values.size() != samples()) {
        throw std::invalid_argument("SineTransform::inverse: size mismatch");
    }
    for (double& c : coeffs) c = 0.0;
    for (std::size_t j = 0; j < samples(); ++j) {
        const double* row = &basis_[j * modes_];
        double u = values[j];
        for (std::size_t k = 0; k < modes_; ++k) coeffs[k] += row[k] * u;
    }
    const double scale = 1.0 / static_cast<double>(grid_);
    for (double& c : coeffs) c *= scale;
}

std::vector<double> sine_transform_forward(const SpectralCoeffs& x, std::size_t grid) {
    SineTransform transform(x.dimension(), grid);
    std::vector<double> values(transform.samples());
    transform.forward(x.values(), values);
    return values;
}

SpectralCoeffs sine_transform_inverse(std::span<const double> values, std::size_t modes) {
    SineTransform transform(modes, values.size() + 1);
    std::vector<double> coeffs(modes);
    transform.inverse(values, coeffs);
    return SpectralCoeffs(std::move(coeffs));
}

}  // namespace spdelab
