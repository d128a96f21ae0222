#include "spdelab/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spdelab/integrator.hpp"
#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/probe.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/spectrum.hpp"

namespace spdelab {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;

// One sub-stream per part so that changing one part's draw count leaves the
// others untouched.
enum PartStream : std::uint32_t {
    kPower = 0,
    kDifference,
    kIntegral,
    kConvolution,
    kEnergyExactness,
    kConvolutionExactness,
    kLimit,
};

class Draws {
public:
    Draws(std::uint64_t seed, PartStream part) : stream_{seed, part, StreamDomain::lemma} {}

    double uniform(std::uint32_t draw, std::uint32_t index) const { return uniform_open(stream_, draw, index); }
    double log_uniform(std::uint32_t draw, std::uint32_t index, double lo_exp, double hi_exp) const {
        return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * uniform(draw, index));
    }
    // Vector of normals at a step offset that cannot collide with the scalars.
    SpectralCoeffs coefficients(std::uint32_t draw, std::size_t n) const {
        std::vector<double> x(n);
        const StreamHandle s{stream_.master_seed, stream_.path + 1024u, StreamDomain::lemma};
        standard_normals(s, draw, x.data(), n);
        return SpectralCoeffs(std::move(x));
    }

private:
    StreamHandle stream_;
};

struct Window {
    double tau1;
    double tau2;
};

Window draw_window(const LemmaOptions& o, const Draws& d, std::uint32_t draw) {
    if (o.tau1 && o.tau2) return {*o.tau1, *o.tau2};
    double tau1 = d.uniform(draw, 10);
    return {tau1, tau1 + d.log_uniform(draw, 11, -4.0, 0.0)};
}

// The first two draws of a rho-indexed part sit on the closed-form edges.
double draw_rho(const Draws& d, std::uint32_t draw) {
    if (draw == 0) return 0.0;
    if (draw == 1) return 1.0;
    return d.uniform(draw, 0);
}

double draw_time(const LemmaOptions& o, const Draws& d, std::uint32_t draw) {
    return o.t ? *o.t : d.log_uniform(draw, 2, -6.0, 1.0);
}

void record_bound(LemmaPart& part, double value, double bound, double slack) {
    ++part.checks;
    double ratio = bound > 0.0 ? value / bound : (value > 0.0 ? INFINITY : 0.0);
    part.worst = std::max(part.worst, ratio);
    if (!(value <= bound * (1.0 + slack))) ++part.violations;
}

void record_error(LemmaPart& part, double value, double oracle, double tolerance) {
    ++part.checks;
    double err = std::abs(value - oracle) / std::max(std::abs(oracle), 1e-300);
    part.worst = std::max(part.worst, err);
    if (!(err <= tolerance)) ++part.violations;
}

// Breakpoints 0, 1/rate, 2/rate, 4/rate, ... capped at length; the integrands
// decay like exp(-rate v), so each piece is smooth on its own scale.
double integrate_decaying(const auto& f, double rate, double length) {
    double total = 0.0;
    double a = 0.0;
    double b = std::min(length, 1.0 / rate);
    while (a < length) {
        // Mapped onto [0, 1]: Boost compares the unscaled local error against a
        // tolerance scaled by the interval length, so short pieces never settle.
        const double len = b - a;
        total += len * Quadrature::integrate([&](double s) { return f(a + len * s); }, 0.0, 1.0, 10, 1e-13);
        a = b;
        b = std::min(length, 2.0 * b);
    }
    return total;
}

// int_0^Delta sum_n x_n^2 lambda_n^rho exp(-2 lambda_n v) dv.
double energy_by_quadrature(const SpectralOperator& op, double rho, double delta, const SpectralCoeffs& x) {
    auto lambda = op.eigenvalues();
    auto f = [&](double v) {
        double s = 0.0;
        for (std::size_t k = 0; k < lambda.size(); ++k) {
            s += x[k] * x[k] * std::pow(lambda[k], rho) * std::exp(-2.0 * lambda[k] * v);
        }
        return s;
    };
    return integrate_decaying(f, 2.0 * lambda.back(), delta);
}

// || A^rho int_0^Delta E(v) x dv ||, the vector integral taken mode by mode.
double convolution_by_quadrature(const SpectralOperator& op, double rho, double delta,
                                 const SpectralCoeffs& x) {
    auto lambda = op.eigenvalues();
    double s = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        const double lk = lambda[k];
        double c = integrate_decaying([lk](double v) { return std::exp(-lk * v); }, lk, delta);
        double term = x[k] * std::pow(lk, rho) * c;
        s += term * term;
    }
    return std::sqrt(s);
}

LemmaPart power_part(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"semigroup_power"};
    const Draws d(o.seed, kPower);
    for (std::uint32_t i = 0; i < o.draws; ++i) {
        double mu = o.mu_max * d.uniform(i, 0);
        double lambda = d.log_uniform(i, 1, -2.0, 6.0);
        double t = draw_time(o, d, i);
        double c = smoothing_constant(SmoothingKind::power, mu);
        double bound = c * std::pow(t, -mu);
        record_bound(part, std::pow(lambda, mu) * std::exp(-lambda * t), bound, o.slack);
        record_bound(part, power_semigroup_norm(op, mu, t), bound, o.slack);
    }
    return part;
}

LemmaPart difference_part(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"semigroup_difference"};
    const Draws d(o.seed, kDifference);
    for (std::uint32_t i = 0; i < o.draws; ++i) {
        double nu = draw_rho(d, i);
        double lambda = d.log_uniform(i, 1, -2.0, 6.0);
        double t = draw_time(o, d, i);
        double bound = smoothing_constant(SmoothingKind::difference, nu) * std::pow(t, nu);
        record_bound(part, std::pow(lambda, -nu) * (-std::expm1(-lambda * t)), bound, o.slack);
        record_bound(part, semigroup_difference_norm(op, nu, t), bound, o.slack);
    }
    return part;
}

LemmaPart integral_part(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"stochastic_convolution_bound"};
    const Draws d(o.seed, kIntegral);
    for (std::uint32_t i = 0; i < o.draws; ++i) {
        double rho = draw_rho(d, i);
        Window w = draw_window(o, d, i);
        SpectralCoeffs x = d.coefficients(i, op.dimension());
        double nx = hdot_norm(op, 0.0, x);
        double bound = 0.5 * smoothing_constant(SmoothingKind::integral, rho) *
                       std::pow(w.tau2 - w.tau1, 1.0 - rho) * nx * nx;
        record_bound(part, stochastic_convolution_energy(op, rho, w.tau1, w.tau2, x), bound, o.slack);
    }
    return part;
}

LemmaPart convolution_part(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"deterministic_convolution_bound"};
    const Draws d(o.seed, kConvolution);
    for (std::uint32_t i = 0; i < o.draws; ++i) {
        double rho = draw_rho(d, i);
        Window w = draw_window(o, d, i);
        SpectralCoeffs x = d.coefficients(i, op.dimension());
        double bound = smoothing_constant(SmoothingKind::convolution, rho) *
                       std::pow(w.tau2 - w.tau1, 1.0 - rho) * hdot_norm(op, 0.0, x);
        record_bound(part, deterministic_convolution_norm(op, rho, w.tau1, w.tau2, x), bound, o.slack);
    }
    return part;
}

LemmaPart energy_exactness(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"stochastic_convolution_exactness"};
    const Draws d(o.seed, kEnergyExactness);
    for (std::uint32_t i = 0; i < o.exactness_draws; ++i) {
        double rho = draw_rho(d, i);
        Window w = draw_window(o, d, i);
        SpectralCoeffs x = d.coefficients(i, op.dimension());
        record_error(part, stochastic_convolution_energy(op, rho, w.tau1, w.tau2, x),
                     energy_by_quadrature(op, rho, w.tau2 - w.tau1, x), o.tolerance);
    }
    return part;
}

LemmaPart convolution_exactness(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"deterministic_convolution_exactness"};
    const Draws d(o.seed, kConvolutionExactness);
    for (std::uint32_t i = 0; i < o.exactness_draws; ++i) {
        double rho = draw_rho(d, i);
        Window w = draw_window(o, d, i);
        SpectralCoeffs x = d.coefficients(i, op.dimension());
        record_error(part, deterministic_convolution_norm(op, rho, w.tau1, w.tau2, x),
                     convolution_by_quadrature(op, rho, w.tau2 - w.tau1, x), o.tolerance);
    }
    return part;
}

// Both convolution quantities along Delta_j = Delta_0 2^{-j} with tau2 fixed:
// nonincreasing, and the last value negligible against the first.
LemmaPart limit_part(const LemmaOptions& o, const SpectralOperator& op) {
    LemmaPart part{"convolution_limit"};
    const Draws d(o.seed, kLimit);
    constexpr int halvings = 40;
    for (std::uint32_t i = 0; i < o.exactness_draws; ++i) {
        double rho = draw_rho(d, i);
        Window w = draw_window(o, d, i);
        SpectralCoeffs x = d.coefficients(i, op.dimension());
        for (int which = 0; which < 2; ++which) {
            // Both series see the window only through its length; [0, delta]
            // keeps tiny windows representable where tau2 - delta would round to tau2.
            auto value = [&](double delta) {
                return which == 0 ? stochastic_convolution_energy(op, rho, 0.0, delta, x)
                                  : deterministic_convolution_norm(op, rho, 0.0, delta, x);
            };
            double delta = w.tau2 - w.tau1;
            const double first = value(delta);
            double prev = first;
            bool monotone = true;
            for (int j = 1; j <= halvings; ++j) {
                delta *= 0.5;
                double v = value(delta);
                if (v > prev * (1.0 + o.slack)) monotone = false;
                prev = v;
            }
            ++part.checks;
            double ratio = first > 0.0 ? prev / first : 0.0;
            part.worst = std::max(part.worst, ratio);
            if (!monotone || !(ratio <= 1e-6)) ++part.violations;
        }
    }
    return part;
}

std::vector<LemmaPart> burkholder_parts(const LemmaOptions& o, unsigned threads) {
    ModelSpec model = example_section5_model(o.modes);
    SolverConfig config;
    config.T = *std::max_element(o.burkholder_times.begin(), o.burkholder_times.end());
    config.steps = o.burkholder_steps;
    config.paths = o.paths;
    config.master_seed = o.seed;
    config.snapshot_times = o.burkholder_times;
    config.scheme = Scheme::exact_ou;
    const std::size_t snaps = snapshot_steps(config).size();

    std::vector<std::vector<double>> norms(snaps, std::vector<double>(o.paths));
    parallel_for_paths(o.paths, threads, [&](std::size_t path) {
        Trajectory traj = simulate(model, config, path);
        for (std::size_t i = 0; i < snaps; ++i) norms[i][path] = hdot_norm(model.op(), 0.0, traj.snapshots[i].state);
    });

    auto lambda = model.op().eigenvalues();
    std::vector<LemmaPart> out;
    for (double p : o.p_values) {
        LemmaPart part{"burkholder_p" + std::to_string(static_cast<int>(std::lround(p)))};
        if (std::abs(p - std::round(p)) > 0.0) part.name = "burkholder_p" + std::to_string(p);
        const double c = burkholder_constant(p);
        for (std::size_t i = 0; i < snaps; ++i) {
            const double t = config.snapshot_times[i];
            double integral = 0.0;  // int_0^t ||E(t-s)||^2_{L_2^0} ds
            for (std::size_t k = 0; k < lambda.size(); ++k) {
                integral += model.covariance()[k] * (-std::expm1(-2.0 * lambda[k] * t)) / (2.0 * lambda[k]);
            }
            const double bound = c * std::pow(integral, 0.5 * p);
            LpEstimate e = estimate_lp_norm(norms[i], p);
            const double moment = std::pow(e.estimate, p);
            const double se = p * moment * (e.estimate > 0.0 ? e.std_error / e.estimate : 0.0);
            ++part.checks;
            part.worst = std::max(part.worst, moment / bound);
            // At p = 2 the bound is the Ito isometry itself, so MC noise has to be allowed for.
            if (!(moment <= bound * (1.0 + o.slack) + 3.0 * se)) ++part.violations;
        }
        out.push_back(part);
    }
    return out;
}

}  // namespace

bool LemmaReport::all_passed() const noexcept {
    return std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.passed; });
}

const LemmaPart* LemmaReport::find(const std::string& name) const noexcept {
    for (const auto& p : parts) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

void validate(const LemmaOptions& o) {
    if (o.modes == 0) throw std::invalid_argument("verify: N must be >= 1");
    if (o.draws == 0 || o.exactness_draws == 0) throw std::invalid_argument("verify: draws must be >= 1");
    if (!(o.mu_max >= 0.0) || !std::isfinite(o.mu_max)) throw std::invalid_argument("verify: mu_max must be >= 0");
    if (o.t && !(*o.t > 0.0)) throw std::invalid_argument("verify: t must be > 0");
    if (o.tau1.has_value() != o.tau2.has_value()) {
        throw std::invalid_argument("verify: tau1 and tau2 must be given together");
    }
    if (o.tau1) {
        if (!(*o.tau1 >= 0.0)) throw std::invalid_argument("verify: tau1 must be >= 0");
        if (!(*o.tau2 > *o.tau1)) throw std::invalid_argument("verify: need tau1 < tau2");
    }
    if (!(o.tolerance > 0.0)) throw std::invalid_argument("verify: tolerance must be > 0");
    if (!(o.slack >= 0.0)) throw std::invalid_argument("verify: slack must be >= 0");
    if (o.paths < 2) throw std::invalid_argument("verify: at least 2 paths are needed");
    for (double p : o.p_values) {
        if (!(p >= 2.0)) throw std::invalid_argument("verify: Burkholder exponents must be >= 2");
    }
    for (double t : o.burkholder_times) {
        if (!(t > 0.0)) throw std::invalid_argument("verify: Burkholder times must be > 0");
    }
    if (o.burkholder_times.empty()) throw std::invalid_argument("verify: no Burkholder times");
}

LemmaReport verify_lemmas(const LemmaOptions& options, unsigned threads) {
    validate(options);
    const SpectralOperator op = dirichlet_laplacian_1d(options.modes);
    LemmaReport report;
    report.parts.push_back(power_part(options, op));
    report.parts.push_back(difference_part(options, op));
    report.parts.push_back(integral_part(options, op));
    report.parts.push_back(convolution_part(options, op));
    report.parts.push_back(energy_exactness(options, op));
    report.parts.push_back(convolution_exactness(options, op));
    report.parts.push_back(limit_part(options, op));
    for (auto& p : burkholder_parts(options, threads)) report.parts.push_back(std::move(p));
    for (auto& p : report.parts) p.passed = p.violations == 0;
    return report;
}

}  // namespace spdelab
