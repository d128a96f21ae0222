#include "spdelab/nemytskii.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace spdelab {

namespace {

double f_zero(double) { return 0.0; }
double f_one(double) { return 1.0; }
double f_identity(double u) { return u; }
double f_sin(double u) { return std::sin(u); }
double f_cos(double u) { return std::cos(u); }
double f_tanh(double u) { return std::tanh(u); }
double f_one_plus_half_sin(double u) { return 1.0 + 0.5 * std::sin(u); }
double f_saturating(double u) { return u / std::sqrt(1.0 + u * u); }

std::vector<ScalarFunction> build_registry() {
    std::vector<ScalarFunction> fns = {
        {"zero", "0", f_zero, 0.0, 0.0},
        {"one", "1", f_one, 0.0, 0.0},
        {"identity", "u", f_identity, 1.0, 0.0},
        {"sin", "sin(u)", f_sin, 1.0, 0.0},
        {"cos", "cos(u)", f_cos, 1.0, 0.0},
        {"tanh", "tanh(u)", f_tanh, 1.0, 0.0},
        {"one_plus_half_sin", "1 + sin(u)/2", f_one_plus_half_sin, 0.5, 0.0},
        {"saturating", "u / sqrt(1 + u^2)", f_saturating, 1.0, 0.0},
    };
    for (auto& fn : fns) {
        fn.measured_lipschitz = measure_lipschitz(fn.eval, 50.0, 1e-3);
        if (fn.measured_lipschitz > fn.lipschitz * (1.0 + 1e-9) + 1e-12) {
            throw std::logic_error("scalar registry: recorded Lipschitz constant of '" + fn.name +
                                   "' is violated on the verification grid");
        }
    }
    return fns;
}

}  // namespace

double measure_lipschitz(double (*f)(double), double range, double du) {
    double best = 0.0;
    auto count = static_cast<long>(std::ceil(2.0 * range / du));
    double prev = f(-range);
    for (long i = 1; i <= count; ++i) {
        double u = -range + static_cast<double>(i) * du;
        double cur = f(u);
        best = std::max(best, std::abs(cur - prev) / du);
        prev = cur;
    }
    return best;
}

std::span<const ScalarFunction> scalar_registry() {
    static const std::vector<ScalarFunction> registry = build_registry();
    return registry;
}

const ScalarFunction& find_scalar_function(std::string_view name) {
    for (const auto& fn : scalar_registry()) {
        if (fn.name == name) return fn;
    }
    throw std::invalid_argument("unknown scalar function '" + std::string(name) +
                                "' (see --list-registry)");
}

}  // namespace spdelab
