#include "spdelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spdelab {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        }
    }
}

// lambda^p through exp(p ln lambda); lambda > 0 is a class invariant.
double power_of(double lambda, double p) {
    return p == 0.0 ? 1.0 : std::exp(p * std::log(lambda));
}

double one_minus_exp_neg(double x) { return -std::expm1(-x); }

void require_interval(double tau1, double tau2) {
    if (!(tau1 >= 0.0)) throw std::invalid_argument("interval: tau1 must be >= 0");
    if (!(tau2 > tau1)) throw std::invalid_argument("interval: tau2 must exceed tau1");
}

void require_rho(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
}

// Maximize g(v) = f(exp(v)) on a log grid, then refine the best cell by
// golden-section search. The bracket is widened while the grid maximum sits
// on a boundary so that sup values just outside [1e-8, 1e4] are not missed.
double maximize_on_log_axis(SmoothingKind kind, double exponent) {
    auto g = [&](double v) { return smoothing_profile(kind, exponent, std::exp(v)); };

    double lo = std::log(1e-8);
    double hi = std::log(1e4);
    constexpr int per_decade = 200;
    constexpr double ln10 = std::numbers::ln10;
    constexpr double widest = 650.0;  // |ln u| beyond this under/overflows

    double best_v = lo;
    double best = g(lo);
    double step = ln10 / per_decade;
    for (;;) {
        int count = static_cast<int>(std::ceil((hi - lo) / step));
        best_v = lo;
        best = g(lo);
        for (int i = 1; i <= count; ++i) {
            double v = std::min(lo + i * step, hi);
            double val = g(v);
            if (val > best) {
                best = val;
                best_v = v;
            }
        }
        bool at_lo = best_v <= lo + 0.5 * step && lo > -widest;
        bool at_hi = best_v >= hi - 0.5 * step && hi < widest;
        if (!at_lo && !at_hi) break;
        if (at_lo) lo = std::max(lo - 10 * ln10, -widest);
        if (at_hi) hi = std::min(hi + 10 * ln10, widest);
    }

    double a = std::max(best_v - step, lo);
    double b = std::min(best_v + step, hi);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c);
    double gd = g(d);
    while (b - a > 1e-12) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return std::max({best, gc, gd, g(0.5 * (a + b))});
}

}  // namespace

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues)
    : eigenvalues_(std::move(eigenvalues)) {
    if (eigenvalues_.empty()) {
        throw std::invalid_argument("SpectralOperator: truncation dimension must be >= 1");
    }
    require_finite(eigenvalues_, "SpectralOperator");
    if (!(eigenvalues_.front() > 0.0)) {
        throw std::invalid_argument("SpectralOperator: eigenvalues must be positive");
    }
    if (!std::is_sorted(eigenvalues_.begin(), eigenvalues_.end())) {
        throw std::invalid_argument("SpectralOperator: eigenvalues must be nondecreasing");
    }
}

SpectralCoeffs::SpectralCoeffs(std::vector<double> coefficients)
    : values_(std::move(coefficients)) {
    if (values_.empty()) {
        throw std::invalid_argument("SpectralCoeffs: dimension must be >= 1");
    }
    require_finite(values_, "SpectralCoeffs");
}

SpectralCoeffs SpectralCoeffs::zeros(std::size_t dimension) {
    return SpectralCoeffs(std::vector<double>(dimension, 0.0));
}

SpectralCoeffs operator+(const SpectralCoeffs& a, const SpectralCoeffs& b) {
    if (a.dimension() != b.dimension()) throw std::invalid_argument("operator+: dimension mismatch");
    std::vector<double> out(a.dimension());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = a[n] + b[n];
    return SpectralCoeffs(std::move(out));
}

SpectralCoeffs operator-(const SpectralCoeffs& a, const SpectralCoeffs& b) {
    if (a.dimension() != b.dimension()) throw std::invalid_argument("operator-: dimension mismatch");
    std::vector<double> out(a.dimension());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = a[n] - b[n];
    return SpectralCoeffs(std::move(out));
}

SpectralCoeffs operator*(double c, const SpectralCoeffs& x) {
    std::vector<double> out(x.values().begin(), x.values().end());
    for (double& v : out) v *= c;
    return SpectralCoeffs(std::move(out));
}

void require_same_dimension(const SpectralOperator& op, std::size_t dimension, const char* what) {
    if (op.dimension() != dimension) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (operator " +
                                    std::to_string(op.dimension()) + ", argument " +
                                    std::to_string(dimension) + ")");
    }
}

SpectralOperator dirichlet_laplacian_1d(std::size_t modes) {
    if (modes == 0) throw std::invalid_argument("dirichlet_laplacian_1d: N must be >= 1");
    std::vector<double> eigenvalues(modes);
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    for (std::size_t k = 1; k <= modes; ++k) {
        double kk = static_cast<double>(k);
        eigenvalues[k - 1] = kk * kk * pi2;
    }
    return SpectralOperator(std::move(eigenvalues));
}

SpectralCoeffs apply_semigroup(const SpectralOperator& op, double t, const SpectralCoeffs& x) {
    if (!(t >= 0.0)) throw std::invalid_argument("apply_semigroup: t must be >= 0");
    require_same_dimension(op, x.dimension(), "apply_semigroup");
    std::vector<double> out(x.values().begin(), x.values().end());
    auto lambda = op.eigenvalues();
    for (std::size_t n = 0; n < out.size(); ++n) out[n] *= std::exp(-lambda[n] * t);
    return SpectralCoeffs(std::move(out));
}

SpectralCoeffs apply_fractional_power(const SpectralOperator& op, double r,
                                      const SpectralCoeffs& x) {
    require_same_dimension(op, x.dimension(), "apply_fractional_power");
    std::vector<double> out(x.values().begin(), x.values().end());
    auto lambda = op.eigenvalues();
    for (std::size_t n = 0; n < out.size(); ++n) out[n] *= power_of(lambda[n], 0.5 * r);
    return SpectralCoeffs(std::move(out));
}

double hdot_norm(const SpectralOperator& op, double s, std::span<const double> x) {
    require_same_dimension(op, x.size(), "hdot_norm");
    auto lambda = op.eigenvalues();
    double sum = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) sum += power_of(lambda[n], s) * x[n] * x[n];
    return std::sqrt(sum);
}

double hdot_norm(const SpectralOperator& op, double s, const SpectralCoeffs& x) {
    return hdot_norm(op, s, x.values());
}

const char* to_string(SmoothingKind kind) noexcept {
    switch (kind) {
        case SmoothingKind::power: return "power";
        case SmoothingKind::difference: return "difference";
        case SmoothingKind::integral: return "integral";
        case SmoothingKind::convolution: return "convolution";
    }
    return "unknown";
}

double smoothing_profile(SmoothingKind kind, double exponent, double u) {
    switch (kind) {
        case SmoothingKind::power:
            return std::exp(exponent * std::log(u) - u);
        case SmoothingKind::difference:
            return one_minus_exp_neg(u) * std::exp(-exponent * std::log(u));
        case SmoothingKind::integral:
            return one_minus_exp_neg(2.0 * u) * std::exp(-(1.0 - exponent) * std::log(u));
        case SmoothingKind::convolution:
            return one_minus_exp_neg(u) * std::exp(-(1.0 - exponent) * std::log(u));
    }
    return 0.0;
}

double smoothing_constant(SmoothingKind kind, double exponent) {
    if (!std::isfinite(exponent)) throw std::invalid_argument("smoothing_constant: exponent not finite");
    if (kind == SmoothingKind::power) {
        if (exponent < 0.0) throw std::invalid_argument("smoothing_constant: power exponent must be >= 0");
        if (exponent == 0.0) return 1.0;
        return std::exp(exponent * (std::log(exponent) - 1.0));
    }
    if (exponent < 0.0 || exponent > 1.0) {
        throw std::invalid_argument(std::string("smoothing_constant: ") + to_string(kind) +
                                    " exponent must lie in [0,1]");
    }
    switch (kind) {
        case SmoothingKind::difference:
            if (exponent == 0.0 || exponent == 1.0) return 1.0;
            break;
        case SmoothingKind::integral:
            if (exponent == 0.0) return 2.0;
            if (exponent == 1.0) return 1.0;
            break;
        case SmoothingKind::convolution:
            if (exponent == 0.0 || exponent == 1.0) return 1.0;
            break;
        case SmoothingKind::power:
            break;
    }
    return maximize_on_log_axis(kind, exponent);
}

double power_semigroup_norm(const SpectralOperator& op, double mu, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("power_semigroup_norm: t must be > 0");
    if (!(mu >= 0.0)) throw std::invalid_argument("power_semigroup_norm: mu must be >= 0");
    double best = 0.0;
    for (double lambda : op.eigenvalues()) {
        best = std::max(best, std::exp(mu * std::log(lambda) - lambda * t));
    }
    return best;
}

double semigroup_difference_norm(const SpectralOperator& op, double nu, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("semigroup_difference_norm: t must be >= 0");
    double best = 0.0;
    for (double lambda : op.eigenvalues()) {
        best = std::max(best, power_of(lambda, -nu) * one_minus_exp_neg(lambda * t));
    }
    return best;
}

double stochastic_convolution_energy(const SpectralOperator& op, double rho, double tau1,
                                     double tau2, const SpectralCoeffs& x) {
    require_interval(tau1, tau2);
    require_rho(rho);
    require_same_dimension(op, x.dimension(), "stochastic_convolution_energy");
    const double delta = tau2 - tau1;
    auto lambda = op.eigenvalues();
    double sum = 0.0;
    for (std::size_t n = 0; n < x.dimension(); ++n) {
        sum += x[n] * x[n] * power_of(lambda[n], rho - 1.0) *
               one_minus_exp_neg(2.0 * lambda[n] * delta);
    }
    return 0.5 * sum;
}

double deterministic_convolution_norm(const SpectralOperator& op, double rho, double tau1,
                                      double tau2, const SpectralCoeffs& x) {
    require_interval(tau1, tau2);
    require_rho(rho);
    require_same_dimension(op, x.dimension(), "deterministic_convolution_norm");
    const double delta = tau2 - tau1;
    auto lambda = op.eigenvalues();
    double sum = 0.0;
    for (std::size_t n = 0; n < x.dimension(); ++n) {
        double factor = one_minus_exp_neg(lambda[n] * delta) * power_of(lambda[n], rho - 1.0);
        sum += x[n] * x[n] * factor * factor;
    }
    return std::sqrt(sum);
}

}  // namespace spdelab
