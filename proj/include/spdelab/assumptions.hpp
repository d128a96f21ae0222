#pragma once

// Truncated-level checks of the Lipschitz, growth and initial-value
// conditions. Functional-analytic conditions are probed at random points, so
// a pass means "no violation found", and every check records what it measured.

#include <cstdint>
#include <string>
#include <vector>

#include "spdelab/model.hpp"

namespace spdelab {

struct AssumptionCheck {
    std::string name;
    bool passed;
    double measured;
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;

    bool all_passed() const noexcept;
    const AssumptionCheck* find(const std::string& name) const noexcept;
};

struct ValidationOptions {
    std::uint64_t seed = 0;
    std::size_t probes = 16;
    std::size_t doublings = 8;  // truncation doublings for the L_2,r^0 series check
};

/// ||G(x)||_{L_2^0} for a model's diffusion; for multiplicative noise this is
/// sqrt(sum_k q_k ||P_N(g(u) e_k)||^2).
double diffusion_hs_norm(const ModelSpec& model, const SpectralCoeffs& x, double r);

/// Checks on one truncated model.
ValidationReport validate_assumptions(const ModelSpec& model, const ValidationOptions& options = {});

/// As above, plus the finiteness of ||G||_{L_2,r^0} across truncation
/// doublings when the recipe can be re-instantiated at larger N.
ValidationReport validate_assumptions(const ModelRecipe& recipe, const ValidationOptions& options = {});

}  // namespace spdelab
