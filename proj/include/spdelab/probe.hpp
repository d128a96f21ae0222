#pragma once

// Monte-Carlo regularity measurements: L^p(Omega; H^s) moments, temporal
// Hoelder exponents fitted on a lag grid, truncation sweeps, and the exact
// series of the additive example.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "spdelab/model.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/spectrum.hpp"

namespace spdelab {

struct NormSpec {
    double s = 0.0;
    double p = 2.0;
};

/// (mean of samples^p)^{1/p} and its delta-method standard error.
struct LpEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

LpEstimate estimate_lp_norm(std::span<const double> samples, double p);

/// (E ||X(t)||_s^p)^{1/p} at every snapshot time of the config.
std::vector<LpEstimate> snapshot_moments(const ModelSpec& model, const SolverConfig& config,
                                         NormSpec norm, unsigned threads = 1);

/// min(1/2, (1 + r - s)/2).
double predicted_temporal_exponent(double r, double s);

struct LagMoment {
    double lag;
    double estimate;  // (E ||X(t1 + lag) - X(t1)||_s^p)^{1/p}
    double std_error = 0.0;
};

struct HolderEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> lags;
    double predicted = 0.0;
};

/// OLS fit of log(estimate) on log(lag). Needs >= 8 strictly increasing lags
/// spanning at least a factor of 100, all estimates positive.
HolderEstimate fit_holder_exponent(std::span<const LagMoment> moments, double predicted);

/// Per-pair samples ||X(t2) - X(t1)||_s, both times read from the same path.
std::vector<std::vector<double>> increment_samples(const SpectralOperator& op,
                                                   std::span<const Trajectory> paths, double s,
                                                   std::span<const std::pair<double, double>> pairs);

/// Simulates with snapshots at every pair time (grid-aligned), then measures.
std::vector<std::vector<double>> increment_samples(const ModelSpec& model, const SolverConfig& config,
                                                   double s,
                                                   std::span<const std::pair<double, double>> pairs,
                                                   unsigned threads = 1);

/// `count` geometric lags in [lag_min, lag_max], rounded to multiples of h
/// (at least h) and deduplicated.
std::vector<double> geometric_lags(const SolverConfig& config, double lag_min, double lag_max,
                                   std::size_t count);

struct TemporalProbe {
    struct PerSmoothness {
        double s;
        std::vector<LagMoment> moments;
        HolderEstimate fit;
    };
    double anchor;
    std::vector<PerSmoothness> results;
};

/// Increments X(anchor + lag) - X(anchor) for every lag and s, from one
/// ensemble, with a fitted exponent per s. The simulation horizon is cut at
/// the last snapshot.
TemporalProbe temporal_probe(const ModelSpec& model, const SolverConfig& config,
                             std::span<const double> s_values, double p, double anchor,
                             std::span<const double> lags, unsigned threads = 1);

struct SweepPoint {
    std::size_t modes;
    double value;  // sup over snapshots of (E ||X(t)||_s^p)^{1/p}
    double std_error;
    double time;   // snapshot attaining the sup
};

/// Re-instantiates the recipe at each truncation and simulates it. Uses the
/// recipe's p.
std::vector<SweepPoint> spatial_sweep(const ModelRecipe& recipe, const SolverConfig& config, double s,
                                      std::span<const std::size_t> modes, unsigned threads = 1);

/// 1/2 sum_{k=2}^N (k^2 pi^2)^r (1 - exp(-2 k^2 pi^2 t)) / (k ln^2 k).
double example_series_partial_sum(double r, double t, std::size_t modes);

struct ScalingFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double predicted = 0.0;
    std::vector<double> values;  // sqrt of the energy per delta
};

/// sqrt(1/2 sum_k g_k^2 q_k lambda_k^{s-1} (1 - exp(-2 lambda_k delta))) per
/// delta, and its log-log slope. Deltas must span at least two decades.
ScalingFit convolution_increment_scaling(const SpectralOperator& op, const CovarianceSpectrum& cov,
                                         std::span<const double> g, double s, double r,
                                         std::span<const double> deltas);

/// Model form; rejects multiplicative diffusion.
ScalingFit convolution_increment_scaling(const ModelSpec& model, double s,
                                         std::span<const double> deltas);

/// (E ||X(anchor + lag) - X(anchor)||_1^p)^{1/p} for each lag (lag 0 gives 0).
/// The model must declare r = 0.
std::vector<LagMoment> continuity_modulus(const ModelSpec& model, const SolverConfig& config,
                                          double anchor, std::span<const double> lags,
                                          unsigned threads = 1);

}  // namespace spdelab
