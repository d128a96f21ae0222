#include "spdelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spdelab {

namespace {

std::size_t resolve_grid(std::size_t modes, std::size_t grid) { return grid == 0 ? 4 * modes : grid; }

std::vector<double> broadcast(const std::vector<double>& values, std::size_t n, const char* what) {
    if (values.size() == 1) return std::vector<double>(n, values.front());
    if (values.size() != n) {
        throw std::invalid_argument(std::string(what) + ": expected 1 or " + std::to_string(n) +
                                    " values, got " + std::to_string(values.size()));
    }
    return values;
}

}  // namespace

DriftSpec DriftSpec::zero() { return DriftSpec(ZeroDrift{}, 0.0); }

DriftSpec DriftSpec::diagonal_linear(std::vector<double> multipliers) {
    if (multipliers.empty()) throw std::invalid_argument("DriftSpec: empty multiplier list");
    double sup = 0.0;
    for (double f : multipliers) {
        if (!std::isfinite(f)) throw std::invalid_argument("DriftSpec: non-finite multiplier");
        sup = std::max(sup, std::abs(f));
    }
    return DriftSpec(DiagonalLinearDrift{std::move(multipliers)}, sup);
}

DriftSpec DriftSpec::nemytskii(const std::string& function, std::size_t modes, std::size_t grid) {
    const ScalarFunction& fn = find_scalar_function(function);
    std::size_t m = resolve_grid(modes, grid);
    auto transform = std::make_shared<const SineTransform>(modes, m);
    return DriftSpec(NemytskiiDrift{&fn, m, std::move(transform)}, fn.lipschitz);
}

std::string DriftSpec::describe() const {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroDrift>) {
                return "zero";
            } else if constexpr (std::is_same_v<T, DiagonalLinearDrift>) {
                return "diagonal_linear";
            } else {
                return "nemytskii(" + f.function->name + ", M=" + std::to_string(f.grid) + ")";
            }
        },
        form_);
}

DiffusionSpec DiffusionSpec::additive(std::vector<double> multipliers) {
    if (multipliers.empty()) throw std::invalid_argument("DiffusionSpec: empty multiplier list");
    for (double g : multipliers) {
        if (!std::isfinite(g)) throw std::invalid_argument("DiffusionSpec: non-finite multiplier");
    }
    return DiffusionSpec(AdditiveDiagonal{std::move(multipliers)}, 0.0);
}

DiffusionSpec DiffusionSpec::multiplicative(const std::string& function, std::size_t modes,
                                            std::size_t grid) {
    const ScalarFunction& fn = find_scalar_function(function);
    std::size_t m = resolve_grid(modes, grid);
    auto transform = std::make_shared<const SineTransform>(modes, m);
    return DiffusionSpec(NemytskiiMultiplicative{&fn, m, std::move(transform)}, fn.lipschitz);
}

std::string DiffusionSpec::describe() const {
    if (const auto* m = std::get_if<NemytskiiMultiplicative>(&form_)) {
        return "multiplicative(" + m->function->name + ", M=" + std::to_string(m->grid) + ")";
    }
    return "additive";
}

ModelSpec::ModelSpec(SpectralOperator op, CovarianceSpectrum covariance, DriftSpec drift,
                     DiffusionSpec diffusion, SpectralCoeffs initial, double declared_r,
                     double declared_p)
    : op_(std::move(op)),
      covariance_(std::move(covariance)),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      initial_(std::move(initial)),
      declared_r_(declared_r),
      declared_p_(declared_p) {
    require_same_dimension(op_, covariance_.dimension(), "ModelSpec covariance");
    require_same_dimension(op_, initial_.dimension(), "ModelSpec initial value");
    if (!(declared_r_ >= 0.0 && declared_r_ <= 1.0)) {
        throw std::invalid_argument("ModelSpec: declared r must lie in [0,1]");
    }
    if (!(declared_p_ >= 2.0) || !std::isfinite(declared_p_)) {
        throw std::invalid_argument("ModelSpec: declared p must be >= 2");
    }
    if (!diffusion_.is_additive() && declared_r_ >= 1.0) {
        throw std::invalid_argument("ModelSpec: multiplicative noise requires r < 1");
    }

    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, DiagonalLinearDrift>) {
                require_same_dimension(op_, f.multipliers.size(), "ModelSpec drift");
            } else if constexpr (std::is_same_v<T, NemytskiiDrift>) {
                require_same_dimension(op_, f.transform->modes(), "ModelSpec drift transform");
            }
        },
        drift_.form());

    if (const auto* add = std::get_if<AdditiveDiagonal>(&diffusion_.form())) {
        require_same_dimension(op_, add->multipliers.size(), "ModelSpec diffusion");
        double norm = hs_norm_L2r(op_, covariance_, DiagonalHSOperator(add->multipliers), declared_r_);
        if (!std::isfinite(norm)) {
            throw std::invalid_argument("ModelSpec: ||G||_{L_2,r^0} is not finite");
        }
    } else {
        const auto& mult = std::get<NemytskiiMultiplicative>(diffusion_.form());
        require_same_dimension(op_, mult.transform->modes(), "ModelSpec diffusion transform");
    }

    if (!std::isfinite(hdot_norm(op_, declared_r_ + 1.0, initial_))) {
        throw std::invalid_argument("ModelSpec: ||X0||_{r+1} is not finite");
    }
}

bool ModelSpec::is_linear_additive() const noexcept {
    return drift_.is_zero() && diffusion_.is_additive();
}

ModelSpec example_section5_model(std::size_t modes, double declared_r, double declared_p) {
    return ModelSpec(dirichlet_laplacian_1d(modes), example_covariance(modes), DriftSpec::zero(),
                     DiffusionSpec::additive(std::vector<double>(modes, 1.0)),
                     SpectralCoeffs::zeros(modes), declared_r, declared_p);
}

const char* to_string(Scheme scheme) noexcept {
    return scheme == Scheme::exact_ou ? "exact_ou" : "exponential_euler";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "exponential_euler") return Scheme::exponential_euler;
    if (name == "exact_ou") return Scheme::exact_ou;
    throw std::invalid_argument("unknown scheme '" + name + "' (exponential_euler | exact_ou)");
}

std::size_t grid_index(const SolverConfig& config, double time) {
    if (!(time >= 0.0) || time > config.T * (1.0 + 1e-12)) {
        throw std::invalid_argument("time " + std::to_string(time) + " lies outside [0, T]");
    }
    if (config.T == 0.0) return 0;
    double h = config.step_size();
    double ratio = time / h;
    double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) > 1e-8 * std::max(1.0, nearest)) {
        std::ostringstream msg;
        msg << "time " << time << " is not a multiple of the step h = " << h;
        throw std::invalid_argument(msg.str());
    }
    return static_cast<std::size_t>(nearest);
}

std::vector<std::size_t> snapshot_steps(const SolverConfig& config) {
    if (!(config.T >= 0.0) || !std::isfinite(config.T)) {
        throw std::invalid_argument("solver: T must be finite and >= 0");
    }
    if (config.steps == 0) throw std::invalid_argument("solver: steps must be >= 1");
    if (config.paths == 0) throw std::invalid_argument("solver: paths must be >= 1");
    if (config.snapshot_times.empty()) throw std::invalid_argument("solver: no snapshot times");
    std::vector<std::size_t> steps;
    steps.reserve(config.snapshot_times.size());
    for (double t : config.snapshot_times) {
        std::size_t idx = grid_index(config, t);
        if (!steps.empty() && idx <= steps.back()) {
            throw std::invalid_argument("solver: snapshot times must be strictly increasing");
        }
        steps.push_back(idx);
    }
    return steps;
}

ModelSpec ModelRecipe::build(std::size_t n) const {
    if (n == 0) throw std::invalid_argument("model: N must be >= 1");
    SpectralOperator op = dirichlet_laplacian_1d(n);

    CovarianceSpectrum cov = [&] {
        switch (covariance) {
            case Covariance::example5: return example_covariance(n);
            case Covariance::constant:
                if (q_values.size() != 1) throw std::invalid_argument("model.q: expected one value");
                return constant_covariance(n, q_values.front());
            case Covariance::custom: break;
        }
        if (q_values.size() != n) {
            throw std::invalid_argument("model.q_list: expected " + std::to_string(n) + " values, got " +
                                        std::to_string(q_values.size()));
        }
        return CovarianceSpectrum(q_values);
    }();

    DriftSpec f = [&] {
        switch (drift) {
            case Drift::zero: return DriftSpec::zero();
            case Drift::diagonal_linear:
                return DriftSpec::diagonal_linear(broadcast(drift_multipliers, n, "model.drift.multipliers"));
            case Drift::nemytskii: break;
        }
        return DriftSpec::nemytskii(drift_function, n, drift_grid);
    }();

    DiffusionSpec g = diffusion == Diffusion::additive
                          ? DiffusionSpec::additive(broadcast(diffusion_multipliers, n,
                                                              "model.diffusion.multipliers"))
                          : DiffusionSpec::multiplicative(diffusion_function, n, diffusion_grid);

    if (initial.size() > n) {
        throw std::invalid_argument("model.initial: " + std::to_string(initial.size()) +
                                    " coefficients exceed N=" + std::to_string(n));
    }
    std::vector<double> x0(n, 0.0);
    std::copy(initial.begin(), initial.end(), x0.begin());

    return ModelSpec(std::move(op), std::move(cov), std::move(f), std::move(g),
                     SpectralCoeffs(std::move(x0)), r, p);
}

bool ModelRecipe::extensible() const noexcept {
    if (covariance == Covariance::custom) return false;
    if (drift == Drift::diagonal_linear && drift_multipliers.size() != 1) return false;
    if (diffusion == Diffusion::additive && diffusion_multipliers.size() != 1) return false;
    if (drift == Drift::nemytskii && drift_grid != 0) return false;
    if (diffusion == Diffusion::multiplicative && diffusion_grid != 0) return false;
    return true;
}

}  // namespace spdelab
