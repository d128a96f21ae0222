#include "spdelab/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdelab {

CovarianceSpectrum::CovarianceSpectrum(std::vector<double> q) : q_(std::move(q)) {
    if (q_.empty()) throw std::invalid_argument("CovarianceSpectrum: dimension must be >= 1");
    for (double v : q_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("CovarianceSpectrum: variances must be finite and >= 0");
        }
    }
}

double CovarianceSpectrum::trace() const {
    double sum = 0.0;
    for (double v : q_) sum += v;
    return sum;
}

CovarianceSpectrum example_covariance(std::size_t modes) {
    if (modes == 0) throw std::invalid_argument("example_covariance: N must be >= 1");
    std::vector<double> q(modes, 0.0);
    for (std::size_t k = 2; k <= modes; ++k) {
        double kk = static_cast<double>(k);
        double l = std::log(kk);
        q[k - 1] = 1.0 / (kk * l * l);
    }
    return CovarianceSpectrum(std::move(q));
}

CovarianceSpectrum constant_covariance(std::size_t modes, double q) {
    return CovarianceSpectrum(std::vector<double>(modes, q));
}

DiagonalHSOperator::DiagonalHSOperator(std::vector<double> multipliers)
    : phi_(std::move(multipliers)) {
    if (phi_.empty()) throw std::invalid_argument("DiagonalHSOperator: dimension must be >= 1");
    for (double v : phi_) {
        if (!std::isfinite(v)) throw std::invalid_argument("DiagonalHSOperator: non-finite multiplier");
    }
}

DiagonalHSOperator DiagonalHSOperator::constant(std::size_t dimension, double value) {
    return DiagonalHSOperator(std::vector<double>(dimension, value));
}

NoiseIncrement sample_increment(const CovarianceSpectrum& cov, double h, const StreamHandle& stream,
                                std::uint32_t step) {
    if (!(h > 0.0)) throw std::invalid_argument("sample_increment: h must be > 0");
    NoiseIncrement inc;
    inc.h = h;
    inc.dW.resize(cov.dimension());
    standard_normals(stream, step, inc.dW.data(), inc.dW.size());
    for (std::size_t k = 0; k < inc.dW.size(); ++k) {
        // q_k = 0 gives an exact zero, not a signed zero times a draw.
        inc.dW[k] = cov[k] == 0.0 ? 0.0 : std::sqrt(cov[k] * h) * inc.dW[k];
    }
    return inc;
}

double hs_norm_L20(const CovarianceSpectrum& cov, const DiagonalHSOperator& phi) {
    if (cov.dimension() != phi.dimension()) throw std::invalid_argument("hs_norm_L20: dimension mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < cov.dimension(); ++k) sum += cov[k] * phi[k] * phi[k];
    return std::sqrt(sum);
}

double hs_norm_L2r(const SpectralOperator& op, const CovarianceSpectrum& cov,
                   const DiagonalHSOperator& phi, double r) {
    require_same_dimension(op, cov.dimension(), "hs_norm_L2r");
    if (cov.dimension() != phi.dimension()) throw std::invalid_argument("hs_norm_L2r: dimension mismatch");
    auto lambda = op.eigenvalues();
    double sum = 0.0;
    for (std::size_t k = 0; k < cov.dimension(); ++k) {
        double weight = r == 0.0 ? 1.0 : std::exp(r * std::log(lambda[k]));
        sum += weight * cov[k] * phi[k] * phi[k];
    }
    return std::sqrt(sum);
}

double burkholder_constant(double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw std::invalid_argument("burkholder_constant: p must be >= 2");
    }
    double first = std::pow(0.5 * p * (p - 1.0), 0.5 * p);
    double second = std::pow(p / (p - 1.0), p * (0.5 * p - 1.0));
    return first * second;
}

}  // namespace spdelab
