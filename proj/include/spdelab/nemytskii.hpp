#pragma once

#include <span>
#include <string>
#include <string_view>

namespace spdelab {

/// Scalar function for pointwise (Nemytskii) composition, with its global
/// Lipschitz constant.
struct ScalarFunction {
    std::string name;
    std::string formula;
    double (*eval)(double);
    double lipschitz;           // recorded constant
    double measured_lipschitz;  // largest difference quotient found at registration
};

/// All registered functions. Each recorded constant is checked against
/// difference quotients on a dense grid when the registry is first built.
std::span<const ScalarFunction> scalar_registry();

/// Throws std::invalid_argument for unknown names.
const ScalarFunction& find_scalar_function(std::string_view name);

/// Largest |f(u+du) - f(u)| / du over the grid [-range, range] with spacing du.
double measure_lipschitz(double (*f)(double), double range, double du);

}  // namespace spdelab
