#pragma once

// Time integration of the mild formulation on the uniform grid t_j = j h.
//
// Both schemes consume the same standard normals z(path, step, mode), so an
// exponential-Euler path and an exact Ornstein-Uhlenbeck path with equal
// (seed, path) are driven by the same Brownian increments.

#include <cstddef>
#include <functional>
#include <vector>

#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

/// F(x) in coefficients: 0, f_k x_k, or P_N f(u(y)) through the sine transform.
SpectralCoeffs apply_drift(const ModelSpec& model, const SpectralCoeffs& x);

/// G(x) dW in coefficients: g_k dW_k, or P_N [g(u(y)) w(y)] with u, w the
/// syntheses of x and dW.
SpectralCoeffs apply_diffusion_increment(const ModelSpec& model, const SpectralCoeffs& x,
                                         const NoiseIncrement& dW);

/// E(h)[x - h F(x) + G(x) dW].
SpectralCoeffs exponential_euler_step(const ModelSpec& model, const SpectralCoeffs& x,
                                      const NoiseIncrement& dW, double h);

/// Exponential-Euler path from X0 driven by the path's noise stream.
Trajectory simulate_path(const ModelSpec& model, const SolverConfig& config, std::size_t path);

/// Exact Gaussian transition per mode:
///   x_k <- exp(-lambda_k h) x_k + g_k sqrt(q_k (1 - exp(-2 lambda_k h)) / (2 lambda_k)) z_k.
/// Requires zero drift and additive diagonal diffusion.
Trajectory exact_ou_path(const ModelSpec& model, const SolverConfig& config, std::size_t path);

/// Dispatches on config.scheme.
Trajectory simulate(const ModelSpec& model, const SolverConfig& config, std::size_t path);

/// Runs body(path) for every path in [0, paths) on up to `threads` workers.
/// Paths are split into contiguous blocks; body must only write per-path state.
void parallel_for_paths(std::size_t paths, unsigned threads,
                        const std::function<void(std::size_t)>& body);

/// All paths, indexed by path number. The result does not depend on `threads`.
std::vector<Trajectory> simulate_ensemble(const ModelSpec& model, const SolverConfig& config,
                                          unsigned threads = 1);

/// Default worker count (hardware concurrency, at least 1).
unsigned default_threads() noexcept;

}  // namespace spdelab
