#pragma once

// Operator calculus on the eigenbasis of a positive self-adjoint operator A
// with compact inverse. Everything acts mode-wise on truncated coefficient
// vectors, so E(t) = exp(-tA) and A^{r/2} are diagonal.

#include <cstddef>
#include <span>
#include <vector>

namespace spdelab {

/// Truncated eigenvalue sequence 0 < lambda_1 <= ... <= lambda_N of A.
class SpectralOperator {
public:
    explicit SpectralOperator(std::vector<double> eigenvalues);

    std::size_t dimension() const noexcept { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    double eigenvalue(std::size_t n) const { return eigenvalues_.at(n); }

private:
    std::vector<double> eigenvalues_;
};

/// Coefficients x_n of an element of (truncated) H^s against the eigenbasis.
class SpectralCoeffs {
public:
    SpectralCoeffs() = default;
    explicit SpectralCoeffs(std::vector<double> coefficients);

    static SpectralCoeffs zeros(std::size_t dimension);

    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t n) const { return values_[n]; }

    // Mutable access for in-place kernels; callers keep entries finite.
    std::vector<double>& mutable_values() noexcept { return values_; }

    bool operator==(const SpectralCoeffs&) const = default;

private:
    std::vector<double> values_;
};

SpectralCoeffs operator+(const SpectralCoeffs& a, const SpectralCoeffs& b);
SpectralCoeffs operator-(const SpectralCoeffs& a, const SpectralCoeffs& b);
SpectralCoeffs operator*(double c, const SpectralCoeffs& x);

/// Eigenvalues k^2 pi^2, k = 1..N, of the negative Dirichlet Laplacian on (0,1).
SpectralOperator dirichlet_laplacian_1d(std::size_t modes);

/// E(t)x = sum_n exp(-lambda_n t) x_n e_n.
SpectralCoeffs apply_semigroup(const SpectralOperator& op, double t, const SpectralCoeffs& x);

/// A^{r/2}x = sum_n lambda_n^{r/2} x_n e_n, for any real r.
SpectralCoeffs apply_fractional_power(const SpectralOperator& op, double r,
                                      const SpectralCoeffs& x);

/// ||x||_s = sqrt(sum_n lambda_n^s x_n^2).
double hdot_norm(const SpectralOperator& op, double s, const SpectralCoeffs& x);
double hdot_norm(const SpectralOperator& op, double s, std::span<const double> x);

enum class SmoothingKind {
    power,       // sup_u u^mu e^{-u}
    difference,  // sup_u (1 - e^{-u}) / u^nu
    integral,    // sup_u (1 - e^{-2u}) / u^{1-rho}
    convolution  // sup_u (1 - e^{-u}) / u^{1-rho}
};

const char* to_string(SmoothingKind kind) noexcept;

/// The profile u -> f(u) whose supremum over u > 0 is the sharp constant.
double smoothing_profile(SmoothingKind kind, double exponent, double u);

/// Sharp constant of the semigroup smoothing bounds.
///
/// kind power takes any exponent >= 0 and uses the closed form (mu/e)^mu.
/// The other kinds need an exponent in [0,1]; edge exponents use their closed
/// limits, interior ones are maximized by a log-grid bracket on [1e-8, 1e4]
/// followed by golden-section refinement in log u.
double smoothing_constant(SmoothingKind kind, double exponent);

/// ||A^mu E(t)|| = max_n lambda_n^mu exp(-lambda_n t), t > 0.
double power_semigroup_norm(const SpectralOperator& op, double mu, double t);

/// ||A^{-nu}(E(t) - I)|| = max_n lambda_n^{-nu} (1 - exp(-lambda_n t)), t >= 0.
double semigroup_difference_norm(const SpectralOperator& op, double nu, double t);

/// int_{tau1}^{tau2} ||A^{rho/2} E(tau2 - sigma) x||^2 dsigma
///   = 1/2 sum_n x_n^2 lambda_n^{rho-1} (1 - exp(-2 lambda_n (tau2 - tau1))).
double stochastic_convolution_energy(const SpectralOperator& op, double rho, double tau1,
                                     double tau2, const SpectralCoeffs& x);

/// ||A^rho int_{tau1}^{tau2} E(tau2 - sigma) x dsigma||
///   = sqrt(sum_n x_n^2 ((1 - exp(-lambda_n dt)) / lambda_n^{1-rho})^2).
double deterministic_convolution_norm(const SpectralOperator& op, double rho, double tau1,
                                      double tau2, const SpectralCoeffs& x);

void require_same_dimension(const SpectralOperator& op, std::size_t dimension,
                            const char* what);

}  // namespace spdelab
