#pragma once

// Problem description for dX + [AX + F(X)]dt = G(X)dW, X(0) = X0, on the
// first N eigenmodes of A.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "spdelab/nemytskii.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/sine_transform.hpp"
#include "spdelab/spectrum.hpp"

namespace spdelab {

struct ZeroDrift {};
struct DiagonalLinearDrift {
    std::vector<double> multipliers;  // F(x)_k = f_k x_k
};
struct NemytskiiDrift {
    const ScalarFunction* function;
    std::size_t grid;
    std::shared_ptr<const SineTransform> transform;
};

/// Drift F together with its Lipschitz constant.
class DriftSpec {
public:
    using Form = std::variant<ZeroDrift, DiagonalLinearDrift, NemytskiiDrift>;

    static DriftSpec zero();
    static DriftSpec diagonal_linear(std::vector<double> multipliers);
    /// grid = 0 selects the default M = 4N.
    static DriftSpec nemytskii(const std::string& function, std::size_t modes, std::size_t grid = 0);

    const Form& form() const noexcept { return form_; }
    double lipschitz() const noexcept { return lipschitz_; }
    bool is_zero() const noexcept { return std::holds_alternative<ZeroDrift>(form_); }
    std::string describe() const;

private:
    DriftSpec(Form form, double lipschitz) : form_(std::move(form)), lipschitz_(lipschitz) {}
    Form form_;
    double lipschitz_;
};

struct AdditiveDiagonal {
    std::vector<double> multipliers;  // (G dW)_k = g_k dW_k
};
struct NemytskiiMultiplicative {
    const ScalarFunction* function;
    std::size_t grid;
    std::shared_ptr<const SineTransform> transform;
};

/// Diffusion G together with its Lipschitz constant (zero for additive noise).
class DiffusionSpec {
public:
    using Form = std::variant<AdditiveDiagonal, NemytskiiMultiplicative>;

    static DiffusionSpec additive(std::vector<double> multipliers);
    static DiffusionSpec multiplicative(const std::string& function, std::size_t modes,
                                        std::size_t grid = 0);

    const Form& form() const noexcept { return form_; }
    double lipschitz() const noexcept { return lipschitz_; }
    bool is_additive() const noexcept { return std::holds_alternative<AdditiveDiagonal>(form_); }
    std::string describe() const;

private:
    DiffusionSpec(Form form, double lipschitz) : form_(std::move(form)), lipschitz_(lipschitz) {}
    Form form_;
    double lipschitz_;
};

/// Full model. Construction enforces matching dimensions, r in [0,1] (r < 1
/// for multiplicative noise), p >= 2, ||X0||_{r+1} finite and, for additive
/// noise, a finite truncated ||G||_{L_2,r^0}.
class ModelSpec {
public:
    ModelSpec(SpectralOperator op, CovarianceSpectrum covariance, DriftSpec drift,
              DiffusionSpec diffusion, SpectralCoeffs initial, double declared_r, double declared_p);

    const SpectralOperator& op() const noexcept { return op_; }
    const CovarianceSpectrum& covariance() const noexcept { return covariance_; }
    const DriftSpec& drift() const noexcept { return drift_; }
    const DiffusionSpec& diffusion() const noexcept { return diffusion_; }
    const SpectralCoeffs& initial() const noexcept { return initial_; }
    double declared_r() const noexcept { return declared_r_; }
    double declared_p() const noexcept { return declared_p_; }
    std::size_t dimension() const noexcept { return op_.dimension(); }

    /// True for F = 0 with additive diagonal G (the Ornstein-Uhlenbeck case).
    bool is_linear_additive() const noexcept;

private:
    SpectralOperator op_;
    CovarianceSpectrum covariance_;
    DriftSpec drift_;
    DiffusionSpec diffusion_;
    SpectralCoeffs initial_;
    double declared_r_;
    double declared_p_;
};

/// The additive linear model dX + AX dt = G dW with A the Dirichlet
/// Laplacian, Q = example_covariance, G = I and X0 = 0.
ModelSpec example_section5_model(std::size_t modes, double declared_r = 0.0, double declared_p = 2.0);

enum class Scheme {
    exponential_euler,  // X_{j+1} = E(h)[X_j - h F(X_j) + G(X_j) dW_j]
    exact_ou            // exact Gaussian transition, linear additive models only
};

const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(const std::string& name);

struct SolverConfig {
    double T = 1.0;
    std::size_t steps = 1000;
    std::size_t paths = 1;
    std::uint64_t master_seed = 0;
    std::vector<double> snapshot_times;  // sorted, grid-aligned, in [0,T]
    Scheme scheme = Scheme::exponential_euler;

    double step_size() const noexcept { return steps == 0 ? 0.0 : T / static_cast<double>(steps); }
};

/// Checks the config and returns the step index of every snapshot time.
std::vector<std::size_t> snapshot_steps(const SolverConfig& config);

/// Step index of a grid-aligned time; throws for times off the grid.
std::size_t grid_index(const SolverConfig& config, double time);

struct Snapshot {
    double time;
    SpectralCoeffs state;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
};

/// Configuration-level model description that can be instantiated at any
/// truncation N. Lists of length 1 broadcast to every mode; longer lists pin
/// the truncation to their own length.
struct ModelRecipe {
    enum class Covariance { example5, constant, custom };
    enum class Drift { zero, diagonal_linear, nemytskii };
    enum class Diffusion { additive, multiplicative };

    std::size_t modes = 256;
    Covariance covariance = Covariance::example5;
    std::vector<double> q_values{1.0};
    Drift drift = Drift::zero;
    std::vector<double> drift_multipliers{0.0};
    std::string drift_function = "zero";
    std::size_t drift_grid = 0;
    Diffusion diffusion = Diffusion::additive;
    std::vector<double> diffusion_multipliers{1.0};
    std::string diffusion_function = "one";
    std::size_t diffusion_grid = 0;
    std::vector<double> initial;  // padded with zeros up to N
    double r = 0.0;
    double p = 2.0;

    ModelSpec build() const { return build(modes); }
    ModelSpec build(std::size_t n) const;

    /// False if some list pins the truncation, so N cannot be changed.
    bool extensible() const noexcept;
};

}  // namespace spdelab
