#pragma once

// Randomized verification of the semigroup smoothing bounds, the exactness of
// the two convolution series against quadrature, their decay as the window
// shrinks, and the Burkholder moment bound for the stochastic convolution.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spdelab {

struct LemmaOptions {
    std::uint64_t seed = 0;
    std::size_t draws = 1000;            // per bound part
    std::size_t exactness_draws = 100;   // per quadrature comparison
    std::size_t modes = 64;
    double mu_max = 2.0;                 // power exponents drawn from [0, mu_max]
    std::optional<double> t;             // fixed time for parts (i) and (ii)
    std::optional<double> tau1;          // fixed window for parts (iii), (iv) and exactness
    std::optional<double> tau2;
    double tolerance = 1e-8;             // relative, quadrature vs series
    double slack = 1e-12;                // relative floating slack on bounds
    std::size_t paths = 10000;           // Burkholder Monte Carlo
    std::vector<double> p_values{2.0, 4.0};
    std::vector<double> burkholder_times{0.01, 0.02, 0.05, 0.1, 0.2};
    std::size_t burkholder_steps = 200;  // grid on [0, max time]
};

struct LemmaPart {
    std::string name;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst = 0.0;  // largest value/bound ratio, or largest relative error
    bool passed = true;
};

struct LemmaReport {
    std::vector<LemmaPart> parts;
    bool all_passed() const noexcept;
    const LemmaPart* find(const std::string& name) const noexcept;
};

/// Throws std::invalid_argument for inconsistent options (e.g. tau1 >= tau2).
void validate(const LemmaOptions& options);

LemmaReport verify_lemmas(const LemmaOptions& options, unsigned threads = 1);

}  // namespace spdelab
