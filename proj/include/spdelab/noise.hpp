#pragma once

// Q-Wiener noise with Q diagonal in the eigenbasis of A (U = H), and the
// Hilbert-Schmidt norms of diagonal integrands Phi e_k = phi_k e_k.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spdelab/rng.hpp"
#include "spdelab/spectrum.hpp"

namespace spdelab {

/// Variances q_k of the Q-Wiener process per eigenmode. Zero entries are kept
/// in place so indices stay aligned with the operator spectrum.
class CovarianceSpectrum {
public:
    explicit CovarianceSpectrum(std::vector<double> q);

    std::size_t dimension() const noexcept { return q_.size(); }
    std::span<const double> values() const noexcept { return q_; }
    double operator[](std::size_t k) const { return q_[k]; }

    double trace() const;

private:
    std::vector<double> q_;
};

/// q_1 = 0, q_k = 1/(k ln^2 k) for k >= 2 (natural logarithm).
CovarianceSpectrum example_covariance(std::size_t modes);

CovarianceSpectrum constant_covariance(std::size_t modes, double q);

/// Increment of the projected Wiener process over one step of length h.
struct NoiseIncrement {
    std::vector<double> dW;
    double h = 0.0;
};

/// Diagonal operator Phi e_k = phi_k e_k.
class DiagonalHSOperator {
public:
    explicit DiagonalHSOperator(std::vector<double> multipliers);
    static DiagonalHSOperator constant(std::size_t dimension, double value);

    std::size_t dimension() const noexcept { return phi_.size(); }
    std::span<const double> multipliers() const noexcept { return phi_; }
    double operator[](std::size_t k) const { return phi_[k]; }

private:
    std::vector<double> phi_;
};

/// dW_k = sqrt(q_k h) z_k with z_k = standard_normal(stream, step, k).
NoiseIncrement sample_increment(const CovarianceSpectrum& cov, double h, const StreamHandle& stream,
                                std::uint32_t step);

/// ||Phi||_{L_2^0} = sqrt(sum_k q_k phi_k^2), using the basis sqrt(q_k) e_k of U_0.
double hs_norm_L20(const CovarianceSpectrum& cov, const DiagonalHSOperator& phi);

/// ||Phi||_{L_2,r^0} = ||A^{r/2} Phi||_{L_2^0} = sqrt(sum_k lambda_k^r q_k phi_k^2).
double hs_norm_L2r(const SpectralOperator& op, const CovarianceSpectrum& cov,
                   const DiagonalHSOperator& phi, double r);

/// Moment constant C(p) = (p(p-1)/2)^{p/2} (p/(p-1))^{p(p/2-1)}, p >= 2.
double burkholder_constant(double p);

}  // namespace spdelab
