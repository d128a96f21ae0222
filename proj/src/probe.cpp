#include "spdelab/probe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spdelab/integrator.hpp"

namespace spdelab {

namespace {

// Neumaier compensated summation; MC means over 1e4+ terms of very different
// magnitude lose a few digits otherwise.
class CompensatedSum {
public:
    void add(double v) noexcept {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct LineFit {
    double slope;
    double intercept;
    double slope_stderr;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    CompensatedSum sxx, sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx.add((x[i] - mx) * (x[i] - mx));
        sxy.add((x[i] - mx) * (y[i] - my));
    }
    LineFit fit{};
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        CompensatedSum ssr;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = y[i] - fit.intercept - fit.slope * x[i];
            ssr.add(e * e);
        }
        fit.slope_stderr = std::sqrt(ssr.value() / (n - 2.0) / sxx.value());
    }
    return fit;
}

// Index of `time` among the trajectory's snapshots.
std::size_t snapshot_slot(const Trajectory& traj, double time) {
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        double t = traj.snapshots[i].time;
        if (std::abs(t - time) <= 1e-12 * std::max(1.0, std::abs(time))) return i;
    }
    throw std::invalid_argument("increment_samples: time " + std::to_string(time) +
                                " is not a snapshot of the trajectory");
}

// Snapshot grid covering every requested time, plus the slot of each time.
struct SnapshotPlan {
    SolverConfig config;
    std::map<std::size_t, std::size_t> slot_of_step;
};

SnapshotPlan plan_snapshots(const SolverConfig& config, std::span<const double> times) {
    SnapshotPlan plan{config, {}};
    std::vector<std::size_t> steps;
    for (double t : times) steps.push_back(grid_index(config, t));
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    plan.config.snapshot_times.clear();
    const double h = config.step_size();
    for (std::size_t i = 0; i < steps.size(); ++i) {
        plan.config.snapshot_times.push_back(static_cast<double>(steps[i]) * h);
        plan.slot_of_step[steps[i]] = i;
    }
    return plan;
}

const char* const kNeedsSnapshots = "probe: at least one snapshot time is required";

}  // namespace

LpEstimate estimate_lp_norm(std::span<const double> samples, double p) {
    if (samples.empty()) throw std::invalid_argument("estimate_lp_norm: no samples");
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("estimate_lp_norm: p must be >= 1");
    const double n = static_cast<double>(samples.size());
    CompensatedSum sum;
    for (double v : samples) sum.add(std::pow(std::abs(v), p));
    const double m = sum.value() / n;
    LpEstimate out;
    out.estimate = std::pow(m, 1.0 / p);
    if (samples.size() < 2 || m == 0.0) return out;
    CompensatedSum dev;
    for (double v : samples) {
        double d = std::pow(std::abs(v), p) - m;
        dev.add(d * d);
    }
    const double se_m = std::sqrt(dev.value() / (n - 1.0) / n);
    out.std_error = std::pow(m, 1.0 / p - 1.0) * se_m / p;
    return out;
}

std::vector<LpEstimate> snapshot_moments(const ModelSpec& model, const SolverConfig& config,
                                         NormSpec norm, unsigned threads) {
    const std::size_t count = snapshot_steps(config).size();
    std::vector<std::vector<double>> samples(count, std::vector<double>(config.paths));
    parallel_for_paths(config.paths, threads, [&](std::size_t path) {
        Trajectory traj = simulate(model, config, path);
        for (std::size_t i = 0; i < count; ++i) {
            samples[i][path] = hdot_norm(model.op(), norm.s, traj.snapshots[i].state);
        }
    });
    std::vector<LpEstimate> out;
    out.reserve(count);
    for (const auto& s : samples) out.push_back(estimate_lp_norm(s, norm.p));
    return out;
}

double predicted_temporal_exponent(double r, double s) { return std::min(0.5, 0.5 * (1.0 + r - s)); }

HolderEstimate fit_holder_exponent(std::span<const LagMoment> moments, double predicted) {
    if (moments.size() < 8) throw std::invalid_argument("fit_holder_exponent: at least 8 lags are required");
    for (std::size_t i = 0; i < moments.size(); ++i) {
        if (!(moments[i].lag > 0.0)) throw std::invalid_argument("fit_holder_exponent: lags must be positive");
        if (i > 0 && !(moments[i].lag > moments[i - 1].lag)) {
            throw std::invalid_argument("fit_holder_exponent: lags must be strictly increasing");
        }
        if (!(moments[i].estimate > 0.0) || !std::isfinite(moments[i].estimate)) {
            throw std::invalid_argument("fit_holder_exponent: increment moments must be positive and finite");
        }
    }
    if (moments.back().lag < 100.0 * moments.front().lag) {
        throw std::invalid_argument("fit_holder_exponent: lags must span at least two decades");
    }
    std::vector<double> x, y;
    HolderEstimate out;
    for (const auto& m : moments) {
        x.push_back(std::log(m.lag));
        y.push_back(std::log(m.estimate));
        out.lags.push_back(m.lag);
    }
    LineFit fit = least_squares(x, y);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.slope_stderr = fit.slope_stderr;
    out.predicted = predicted;
    return out;
}

std::vector<std::vector<double>> increment_samples(const SpectralOperator& op,
                                                   std::span<const Trajectory> paths, double s,
                                                   std::span<const std::pair<double, double>> pairs) {
    std::vector<std::vector<double>> out(pairs.size(), std::vector<double>(paths.size()));
    if (paths.empty()) return out;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (const auto& [t1, t2] : pairs) {
        slots.emplace_back(snapshot_slot(paths.front(), t1), snapshot_slot(paths.front(), t2));
    }
    std::vector<double> d(op.dimension());
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& snaps = paths[p].snapshots;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            auto a = snaps.at(slots[i].first).state.values();
            auto b = snaps.at(slots[i].second).state.values();
            require_same_dimension(op, a.size(), "increment_samples");
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = b[k] - a[k];
            out[i][p] = hdot_norm(op, s, d);
        }
    }
    return out;
}

std::vector<std::vector<double>> increment_samples(const ModelSpec& model, const SolverConfig& config,
                                                   double s,
                                                   std::span<const std::pair<double, double>> pairs,
                                                   unsigned threads) {
    if (pairs.empty()) throw std::invalid_argument(kNeedsSnapshots);
    std::vector<double> times;
    for (const auto& [t1, t2] : pairs) {
        times.push_back(t1);
        times.push_back(t2);
    }
    SnapshotPlan plan = plan_snapshots(config, times);
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (const auto& [t1, t2] : pairs) {
        slots.emplace_back(plan.slot_of_step.at(grid_index(config, t1)),
                           plan.slot_of_step.at(grid_index(config, t2)));
    }
    std::vector<std::vector<double>> out(pairs.size(), std::vector<double>(config.paths));
    const std::size_t n = model.dimension();
    parallel_for_paths(config.paths, threads, [&](std::size_t path) {
        Trajectory traj = simulate(model, plan.config, path);
        std::vector<double> d(n);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            auto a = traj.snapshots[slots[i].first].state.values();
            auto b = traj.snapshots[slots[i].second].state.values();
            for (std::size_t k = 0; k < n; ++k) d[k] = b[k] - a[k];
            out[i][path] = hdot_norm(model.op(), s, d);
        }
    });
    return out;
}

std::vector<double> geometric_lags(const SolverConfig& config, double lag_min, double lag_max,
                                   std::size_t count) {
    if (!(lag_min > 0.0) || !(lag_max > lag_min) || !std::isfinite(lag_max)) {
        throw std::invalid_argument("geometric_lags: need 0 < lag_min < lag_max");
    }
    if (count < 2) throw std::invalid_argument("geometric_lags: need at least 2 lags");
    const double h = config.step_size();
    std::vector<std::size_t> steps;
    for (std::size_t i = 0; i < count; ++i) {
        double u = static_cast<double>(i) / static_cast<double>(count - 1);
        double lag = lag_min * std::pow(lag_max / lag_min, u);
        steps.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(lag / h))));
    }
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    std::vector<double> out;
    for (std::size_t k : steps) out.push_back(static_cast<double>(k) * h);
    return out;
}

TemporalProbe temporal_probe(const ModelSpec& model, const SolverConfig& config,
                             std::span<const double> s_values, double p, double anchor,
                             std::span<const double> lags, unsigned threads) {
    if (s_values.empty()) throw std::invalid_argument("temporal_probe: no smoothness values");
    if (lags.empty()) throw std::invalid_argument("temporal_probe: no lags");
    std::vector<double> times{anchor};
    for (double lag : lags) {
        if (!(lag > 0.0)) throw std::invalid_argument("temporal_probe: lags must be positive");
        times.push_back(anchor + lag);
    }
    SnapshotPlan plan = plan_snapshots(config, times);
    const std::size_t anchor_slot = plan.slot_of_step.at(grid_index(config, anchor));
    std::vector<std::size_t> lag_slots;
    for (double lag : lags) lag_slots.push_back(plan.slot_of_step.at(grid_index(config, anchor + lag)));

    const std::size_t n = model.dimension();
    // samples[s][lag][path]
    std::vector<std::vector<std::vector<double>>> samples(
        s_values.size(), std::vector<std::vector<double>>(lags.size(), std::vector<double>(config.paths)));
    parallel_for_paths(config.paths, threads, [&](std::size_t path) {
        Trajectory traj = simulate(model, plan.config, path);
        auto a = traj.snapshots[anchor_slot].state.values();
        std::vector<double> d(n);
        for (std::size_t l = 0; l < lags.size(); ++l) {
            auto b = traj.snapshots[lag_slots[l]].state.values();
            for (std::size_t k = 0; k < n; ++k) d[k] = b[k] - a[k];
            for (std::size_t i = 0; i < s_values.size(); ++i) {
                samples[i][l][path] = hdot_norm(model.op(), s_values[i], d);
            }
        }
    });

    TemporalProbe out;
    out.anchor = anchor;
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        TemporalProbe::PerSmoothness res;
        res.s = s_values[i];
        for (std::size_t l = 0; l < lags.size(); ++l) {
            LpEstimate e = estimate_lp_norm(samples[i][l], p);
            res.moments.push_back({lags[l], e.estimate, e.std_error});
        }
        res.fit = fit_holder_exponent(res.moments, predicted_temporal_exponent(model.declared_r(), res.s));
        out.results.push_back(std::move(res));
    }
    return out;
}

std::vector<SweepPoint> spatial_sweep(const ModelRecipe& recipe, const SolverConfig& config, double s,
                                      std::span<const std::size_t> modes, unsigned threads) {
    if (modes.empty()) throw std::invalid_argument("spatial_sweep: no truncation levels");
    if (config.snapshot_times.empty()) throw std::invalid_argument(kNeedsSnapshots);
    std::vector<SweepPoint> out;
    for (std::size_t n : modes) {
        ModelSpec model = recipe.build(n);
        std::vector<LpEstimate> est = snapshot_moments(model, config, {s, recipe.p}, threads);
        std::size_t best = 0;
        for (std::size_t i = 1; i < est.size(); ++i) {
            if (est[i].estimate > est[best].estimate) best = i;
        }
        out.push_back({n, est[best].estimate, est[best].std_error, config.snapshot_times[best]});
    }
    return out;
}

double example_series_partial_sum(double r, double t, std::size_t modes) {
    if (!(t > 0.0)) throw std::invalid_argument("example_series_partial_sum: t must be > 0");
    if (modes < 2) throw std::invalid_argument("example_series_partial_sum: N must be >= 2");
    CompensatedSum sum;
    // Smallest terms first.
    for (std::size_t k = modes; k >= 2; --k) {
        double kk = static_cast<double>(k);
        double lambda = kk * kk * std::numbers::pi * std::numbers::pi;
        double lk = std::log(kk);
        sum.add(std::pow(lambda, r) * (-std::expm1(-2.0 * lambda * t)) / (kk * lk * lk));
    }
    return 0.5 * sum.value();
}

ScalingFit convolution_increment_scaling(const SpectralOperator& op, const CovarianceSpectrum& cov,
                                         std::span<const double> g, double s, double r,
                                         std::span<const double> deltas) {
    require_same_dimension(op, cov.dimension(), "convolution_increment_scaling covariance");
    require_same_dimension(op, g.size(), "convolution_increment_scaling multipliers");
    if (deltas.size() < 2) throw std::invalid_argument("convolution_increment_scaling: need >= 2 deltas");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] > deltas[i - 1]))) {
            throw std::invalid_argument("convolution_increment_scaling: deltas must be positive and increasing");
        }
    }
    if (deltas.back() < 100.0 * deltas.front()) {
        throw std::invalid_argument("convolution_increment_scaling: deltas must span at least two decades");
    }
    auto lambda = op.eigenvalues();
    ScalingFit out;
    std::vector<double> x, y;
    for (double delta : deltas) {
        CompensatedSum sum;
        for (std::size_t k = op.dimension(); k-- > 0;) {
            double w = g[k] * g[k] * cov[k];
            if (w == 0.0) continue;
            sum.add(w * std::pow(lambda[k], s - 1.0) * (-std::expm1(-2.0 * lambda[k] * delta)));
        }
        double v = std::sqrt(0.5 * sum.value());
        out.values.push_back(v);
        x.push_back(std::log(delta));
        y.push_back(std::log(v));
    }
    LineFit fit = least_squares(x, y);
    out.slope = fit.slope;
    out.slope_stderr = fit.slope_stderr;
    out.intercept = fit.intercept;
    out.predicted = predicted_temporal_exponent(r, s);
    return out;
}

ScalingFit convolution_increment_scaling(const ModelSpec& model, double s, std::span<const double> deltas) {
    const auto* add = std::get_if<AdditiveDiagonal>(&model.diffusion().form());
    if (!add) {
        throw std::invalid_argument(
            "convolution_increment_scaling: the closed form needs additive diagonal diffusion");
    }
    return convolution_increment_scaling(model.op(), model.covariance(), add->multipliers, s,
                                         model.declared_r(), deltas);
}

std::vector<LagMoment> continuity_modulus(const ModelSpec& model, const SolverConfig& config,
                                          double anchor, std::span<const double> lags, unsigned threads) {
    if (model.declared_r() != 0.0) throw std::invalid_argument("continuity_modulus: the model must declare r = 0");
    std::vector<std::pair<double, double>> pairs;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 0.0) throw std::invalid_argument("continuity_modulus: lags must be >= 0");
        if (lags[i] > 0.0) {
            pairs.emplace_back(anchor, anchor + lags[i]);
            index.push_back(i);
        }
    }
    std::vector<LagMoment> out;
    for (double lag : lags) out.push_back({lag, 0.0, 0.0});
    if (pairs.empty()) return out;
    auto samples = increment_samples(model, config, 1.0, pairs, threads);
    for (std::size_t j = 0; j < index.size(); ++j) {
        LpEstimate e = estimate_lp_norm(samples[j], model.declared_p());
        out[index[j]].estimate = e.estimate;
        out[index[j]].std_error = e.std_error;
    }
    return out;
}

}  // namespace spdelab
