#include "spdelab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace spdelab {

namespace {

struct GridBuffers {
    std::vector<double> u;
    std::vector<double> w;
};

void drift_into(const ModelSpec& model, std::span<const double> x, std::span<double> out,
                GridBuffers& buf) {
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroDrift>) {
                std::fill(out.begin(), out.end(), 0.0);
            } else if constexpr (std::is_same_v<T, DiagonalLinearDrift>) {
                for (std::size_t k = 0; k < x.size(); ++k) out[k] = f.multipliers[k] * x[k];
            } else {
                buf.u.resize(f.transform->samples());
                f.transform->forward(x, buf.u);
                for (double& v : buf.u) v = f.function->eval(v);
                f.transform->inverse(buf.u, out);
            }
        },
        model.drift().form());
}

void diffusion_into(const ModelSpec& model, std::span<const double> x, std::span<const double> dW,
                    std::span<double> out, GridBuffers& buf) {
    if (const auto* add = std::get_if<AdditiveDiagonal>(&model.diffusion().form())) {
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = add->multipliers[k] * dW[k];
        return;
    }
    const auto& mult = std::get<NemytskiiMultiplicative>(model.diffusion().form());
    buf.u.resize(mult.transform->samples());
    buf.w.resize(mult.transform->samples());
    mult.transform->forward(x, buf.u);
    mult.transform->forward(dW, buf.w);
    for (std::size_t j = 0; j < buf.u.size(); ++j) buf.u[j] = mult.function->eval(buf.u[j]) * buf.w[j];
    mult.transform->inverse(buf.u, out);
}

void require_dimension(const ModelSpec& model, std::size_t n, const char* what) {
    require_same_dimension(model.op(), n, what);
}

std::uint32_t checked_path(std::size_t path) {
    if (path > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("path index exceeds the 32-bit stream address space");
    }
    return static_cast<std::uint32_t>(path);
}

// Shared driver: advance(x, step) moves the state from t_step to t_step+1.
template <typename Advance>
Trajectory run_path(const ModelSpec& model, const SolverConfig& config, Advance&& advance) {
    const std::vector<std::size_t> steps = snapshot_steps(config);
    if (steps.back() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("solver: step count exceeds the 32-bit stream address space");
    }
    Trajectory traj;
    traj.snapshots.reserve(steps.size());
    std::vector<double> x(model.initial().values().begin(), model.initial().values().end());
    std::size_t next = 0;
    for (std::size_t j = 0;; ++j) {
        while (next < steps.size() && steps[next] == j) {
            traj.snapshots.push_back({config.snapshot_times[next], SpectralCoeffs(x)});
            ++next;
        }
        if (next == steps.size()) break;
        advance(x, static_cast<std::uint32_t>(j));
    }
    return traj;
}

}  // namespace

SpectralCoeffs apply_drift(const ModelSpec& model, const SpectralCoeffs& x) {
    require_dimension(model, x.dimension(), "apply_drift");
    std::vector<double> out(x.dimension());
    GridBuffers buf;
    drift_into(model, x.values(), out, buf);
    return SpectralCoeffs(std::move(out));
}

SpectralCoeffs apply_diffusion_increment(const ModelSpec& model, const SpectralCoeffs& x,
                                         const NoiseIncrement& dW) {
    require_dimension(model, x.dimension(), "apply_diffusion_increment");
    require_dimension(model, dW.dW.size(), "apply_diffusion_increment noise");
    std::vector<double> out(x.dimension());
    GridBuffers buf;
    diffusion_into(model, x.values(), dW.dW, out, buf);
    return SpectralCoeffs(std::move(out));
}

SpectralCoeffs exponential_euler_step(const ModelSpec& model, const SpectralCoeffs& x,
                                      const NoiseIncrement& dW, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("exponential_euler_step: h must be > 0");
    SpectralCoeffs f = apply_drift(model, x);
    SpectralCoeffs g = apply_diffusion_increment(model, x, dW);
    std::vector<double> out(x.dimension());
    auto lambda = model.op().eigenvalues();
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::exp(-lambda[k] * h) * (x[k] - h * f[k] + g[k]);
    }
    return SpectralCoeffs(std::move(out));
}

Trajectory simulate_path(const ModelSpec& model, const SolverConfig& config, std::size_t path) {
    const StreamHandle stream{config.master_seed, checked_path(path), StreamDomain::wiener};
    const std::size_t n = model.dimension();
    const double h = config.step_size();
    auto lambda = model.op().eigenvalues();
    auto q = model.covariance().values();

    std::vector<double> decay(n);
    std::vector<double> scale(n);
    for (std::size_t k = 0; k < n; ++k) {
        decay[k] = std::exp(-lambda[k] * h);
        scale[k] = std::sqrt(q[k] * h);
    }
    std::vector<double> dW(n);
    std::vector<double> drift(n);
    std::vector<double> noise(n);
    GridBuffers buf;

    if (model.is_linear_additive()) {
        const auto& g = std::get<AdditiveDiagonal>(model.diffusion().form()).multipliers;
        for (std::size_t k = 0; k < n; ++k) scale[k] *= g[k];
        return run_path(model, config, [&](std::vector<double>& x, std::uint32_t step) {
            standard_normals(stream, step, dW.data(), n);
            for (std::size_t k = 0; k < n; ++k) x[k] = decay[k] * (x[k] + scale[k] * dW[k]);
        });
    }

    return run_path(model, config, [&](std::vector<double>& x, std::uint32_t step) {
        standard_normals(stream, step, dW.data(), n);
        for (std::size_t k = 0; k < n; ++k) dW[k] *= scale[k];
        drift_into(model, x, drift, buf);
        diffusion_into(model, x, dW, noise, buf);
        for (std::size_t k = 0; k < n; ++k) x[k] = decay[k] * (x[k] - h * drift[k] + noise[k]);
    });
}

Trajectory exact_ou_path(const ModelSpec& model, const SolverConfig& config, std::size_t path) {
    if (!model.drift().is_zero()) throw std::invalid_argument("exact_ou_path: drift must be zero");
    if (!model.diffusion().is_additive()) {
        throw std::invalid_argument("exact_ou_path: diffusion must be additive diagonal");
    }
    const StreamHandle stream{config.master_seed, checked_path(path), StreamDomain::wiener};
    const std::size_t n = model.dimension();
    const double h = config.step_size();
    auto lambda = model.op().eigenvalues();
    auto q = model.covariance().values();
    const auto& g = std::get<AdditiveDiagonal>(model.diffusion().form()).multipliers;

    std::vector<double> decay(n);
    std::vector<double> scale(n);
    for (std::size_t k = 0; k < n; ++k) {
        decay[k] = std::exp(-lambda[k] * h);
        double variance = q[k] * (-std::expm1(-2.0 * lambda[k] * h)) / (2.0 * lambda[k]);
        scale[k] = g[k] * std::sqrt(variance);
    }
    std::vector<double> z(n);
    return run_path(model, config, [&](std::vector<double>& x, std::uint32_t step) {
        standard_normals(stream, step, z.data(), n);
        for (std::size_t k = 0; k < n; ++k) x[k] = decay[k] * x[k] + scale[k] * z[k];
    });
}

Trajectory simulate(const ModelSpec& model, const SolverConfig& config, std::size_t path) {
    return config.scheme == Scheme::exact_ou ? exact_ou_path(model, config, path)
                                             : simulate_path(model, config, path);
}

unsigned default_threads() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for_paths(std::size_t paths, unsigned threads,
                        const std::function<void(std::size_t)>& body) {
    std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(paths, 1));
    if (workers == 1) {
        for (std::size_t p = 0; p < paths; ++p) body(p);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = paths * w / workers;
            std::size_t end = paths * (w + 1) / workers;
            pool.emplace_back([&, begin, end, w] {
                try {
                    for (std::size_t p = begin; p < end; ++p) body(p);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<Trajectory> simulate_ensemble(const ModelSpec& model, const SolverConfig& config,
                                          unsigned threads) {
    snapshot_steps(config);  // fail before spawning workers
    std::vector<Trajectory> out(config.paths);
    parallel_for_paths(config.paths, threads,
                       [&](std::size_t p) { out[p] = simulate(model, config, p); });
    return out;
}

}  // namespace spdelab
