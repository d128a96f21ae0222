#include "spdelab/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spdelab/integrator.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

namespace {

// Random point with coefficients z_k / k: smooth enough to sit in every H^s
// probed here while still exciting all modes.
SpectralCoeffs probe_point(std::size_t n, std::uint64_t seed, std::uint32_t index) {
    const StreamHandle stream{seed, index, StreamDomain::probe};
    std::vector<double> x(n);
    standard_normals(stream, 0, x.data(), n);
    for (std::size_t k = 0; k < n; ++k) x[k] /= static_cast<double>(k + 1);
    return SpectralCoeffs(std::move(x));
}

double hs_norm_of_difference(const ModelSpec& model, const SpectralCoeffs& x, const SpectralCoeffs& y) {
    if (model.diffusion().is_additive()) return 0.0;
    const auto& mult = std::get<NemytskiiMultiplicative>(model.diffusion().form());
    const SineTransform& tr = *mult.transform;
    std::vector<double> u(tr.samples());
    std::vector<double> v(tr.samples());
    tr.forward(x.values(), u);
    tr.forward(y.values(), v);
    std::vector<double> diff(tr.samples());
    for (std::size_t j = 0; j < diff.size(); ++j) {
        diff[j] = mult.function->eval(u[j]) - mult.function->eval(v[j]);
    }
    // G(x) - G(y) applied to sqrt(q_k) e_k, projected back onto N modes.
    std::vector<double> ek(tr.modes(), 0.0);
    std::vector<double> basis(tr.samples());
    std::vector<double> coeffs(tr.modes());
    double sum = 0.0;
    for (std::size_t k = 0; k < tr.modes(); ++k) {
        double qk = model.covariance()[k];
        if (qk == 0.0) continue;
        ek[k] = 1.0;
        tr.forward(ek, basis);
        ek[k] = 0.0;
        for (std::size_t j = 0; j < basis.size(); ++j) basis[j] *= diff[j];
        tr.inverse(basis, coeffs);
        double n2 = 0.0;
        for (double c : coeffs) n2 += c * c;
        sum += qk * n2;
    }
    return std::sqrt(sum);
}

double drift_difference_norm(const ModelSpec& model, const SpectralCoeffs& x, const SpectralCoeffs& y) {
    SpectralCoeffs d = apply_drift(model, x) - apply_drift(model, y);
    return hdot_norm(model.op(), -1.0 + model.declared_r(), d);
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

bool ValidationReport::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const noexcept {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

double diffusion_hs_norm(const ModelSpec& model, const SpectralCoeffs& x, double r) {
    if (const auto* add = std::get_if<AdditiveDiagonal>(&model.diffusion().form())) {
        return hs_norm_L2r(model.op(), model.covariance(), DiagonalHSOperator(add->multipliers), r);
    }
    const auto& mult = std::get<NemytskiiMultiplicative>(model.diffusion().form());
    const SineTransform& tr = *mult.transform;
    std::vector<double> u(tr.samples());
    tr.forward(x.values(), u);
    for (double& v : u) v = mult.function->eval(v);
    std::vector<double> ek(tr.modes(), 0.0);
    std::vector<double> basis(tr.samples());
    std::vector<double> coeffs(tr.modes());
    double sum = 0.0;
    for (std::size_t k = 0; k < tr.modes(); ++k) {
        double qk = model.covariance()[k];
        if (qk == 0.0) continue;
        ek[k] = 1.0;
        tr.forward(ek, basis);
        ek[k] = 0.0;
        for (std::size_t j = 0; j < basis.size(); ++j) basis[j] *= u[j];
        tr.inverse(basis, coeffs);
        double n2 = hdot_norm(model.op(), r, coeffs);
        sum += qk * n2 * n2;
    }
    return std::sqrt(sum);
}

ValidationReport validate_assumptions(const ModelSpec& model, const ValidationOptions& options) {
    ValidationReport report;
    const std::size_t n = model.dimension();
    const double r = model.declared_r();
    const double lambda1 = model.op().eigenvalue(0);

    std::vector<SpectralCoeffs> probes;
    for (std::size_t i = 0; i < options.probes; ++i) {
        probes.push_back(probe_point(n, options.seed, static_cast<std::uint32_t>(i)));
    }

    // Lipschitz continuity of G from H into L_2^0.
    {
        double recorded = model.diffusion().lipschitz();
        double measured = 0.0;
        double bound = recorded;
        if (!model.diffusion().is_additive()) {
            // ||P_N(v e_k)|| <= sqrt(2) ||v|| on the grid, hence L sqrt(2 Tr Q).
            bound = recorded * std::sqrt(2.0 * model.covariance().trace());
            for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
                double dx = hdot_norm(model.op(), 0.0, probes[i] - probes[i + 1]);
                if (dx > 0.0) {
                    measured = std::max(measured, hs_norm_of_difference(model, probes[i], probes[i + 1]) / dx);
                }
            }
        }
        bool ok = std::isfinite(recorded) && std::isfinite(measured) &&
                  measured <= bound * (1.0 + 1e-9) + 1e-14;
        report.checks.push_back({"diffusion_lipschitz", ok, measured,
                                 model.diffusion().describe() + ", recorded L=" + fmt_double(recorded) +
                                     ", implied L_2^0 bound " + fmt_double(bound)});
    }

    // Linear growth ||G(x)||_{L_2,r^0} <= C (1 + ||x||_r).
    {
        double measured = 0.0;
        for (const auto& x : probes) {
            double ratio = diffusion_hs_norm(model, x, r) / (1.0 + hdot_norm(model.op(), r, x));
            measured = std::max(measured, ratio);
        }
        if (probes.empty()) measured = diffusion_hs_norm(model, SpectralCoeffs::zeros(n), r);
        bool ok = std::isfinite(measured);
        report.checks.push_back({"diffusion_growth", ok, measured,
                                 "max ||G(x)||_{L_2,r^0} / (1 + ||x||_r) over " +
                                     std::to_string(probes.size()) + " probes"});
    }

    // F Lipschitz from H into H^{-1+r}.
    {
        double recorded = model.drift().lipschitz();
        double measured = 0.0;
        if (!model.drift().is_zero()) {
            for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
                double dx = hdot_norm(model.op(), 0.0, probes[i] - probes[i + 1]);
                if (dx > 0.0) measured = std::max(measured, drift_difference_norm(model, probes[i], probes[i + 1]) / dx);
            }
        }
        double bound = recorded * std::pow(lambda1, 0.5 * (r - 1.0));
        bool ok = std::isfinite(recorded) && measured <= bound * (1.0 + 1e-9) + 1e-14;
        report.checks.push_back({"drift_lipschitz", ok, measured,
                                 model.drift().describe() + ", recorded L=" + fmt_double(recorded) +
                                     ", H^{-1+r} bound " + fmt_double(bound)});
    }

    // X0 in H^{r+1}.
    {
        double norm = hdot_norm(model.op(), r + 1.0, model.initial());
        report.checks.push_back({"initial_regularity", std::isfinite(norm), norm, "||X0||_{r+1}"});
    }
    return report;
}

ValidationReport validate_assumptions(const ModelRecipe& recipe, const ValidationOptions& options) {
    ModelSpec model = recipe.build();
    ValidationReport report = validate_assumptions(model, options);
    if (!model.diffusion().is_additive()) return report;

    if (!recipe.extensible()) {
        double norm = diffusion_hs_norm(model, model.initial(), recipe.r);
        report.checks.push_back({"diffusion_L2r_series", std::isfinite(norm), norm,
                                 "fixed truncation N=" + std::to_string(model.dimension()) +
                                     "; series tail not checked"});
        return report;
    }

    // Partial sums sum_{k<=N 2^j} lambda_k^r q_k g^2 across doublings. The
    // series is judged convergent when its increments shrink.
    const double g = recipe.diffusion_multipliers.front();
    std::vector<double> sums;
    std::vector<std::size_t> sizes;
    double sum = 0.0;
    std::size_t done = 0;
    std::size_t target = recipe.modes;
    for (std::size_t j = 0; j <= options.doublings; ++j, target *= 2) {
        for (std::size_t k = done + 1; k <= target; ++k) {
            double kk = static_cast<double>(k);
            double lambda = kk * kk * std::numbers::pi * std::numbers::pi;
            double q = 0.0;
            if (recipe.covariance == ModelRecipe::Covariance::constant) {
                q = recipe.q_values.front();
            } else if (k >= 2) {
                q = 1.0 / (kk * std::log(kk) * std::log(kk));
            }
            sum += std::exp(recipe.r * std::log(lambda)) * q * g * g;
        }
        done = target;
        sums.push_back(sum);
        sizes.push_back(target);
    }
    double first = sums.size() > 1 ? sums[1] - sums[0] : 0.0;
    double last = sums.size() > 1 ? sums.back() - sums[sums.size() - 2] : 0.0;
    bool finite = std::all_of(sums.begin(), sums.end(), [](double v) { return std::isfinite(v); });
    bool ok = finite && (last == 0.0 || last < first);
    std::ostringstream detail;
    detail << "||G||^2_{L_2,r^0} partial sums";
    for (std::size_t i = 0; i < sums.size(); ++i) detail << " N=" << sizes[i] << ":" << fmt_double(sums[i]);
    detail << (ok ? " (increments shrink)" : " (increments do not shrink: diverging)");
    report.checks.push_back({"diffusion_L2r_series", ok, std::sqrt(sums.back()), detail.str()});
    return report;
}

}  // namespace spdelab
