#include "spdelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "spdelab/integrator.hpp"
#include "spdelab/nemytskii.hpp"
#include "spdelab/probe.hpp"

namespace spdelab {

namespace {

std::string num(double v) { return fmt::format("{}", v); }
std::string num(std::size_t v) { return fmt::format("{}", v); }

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += num(values[i]);
    }
    return out;
}

// Every key any experiment reads; anything else is a typo.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "experiment",
        "model.N", "model.covariance", "model.q",
        "model.drift", "model.drift.multipliers", "model.drift.function", "model.drift.grid",
        "model.diffusion", "model.diffusion.multipliers", "model.diffusion.function", "model.diffusion.grid",
        "model.initial", "model.r", "model.p",
        "solver.T", "solver.steps", "solver.paths", "solver.seed", "solver.snapshots", "solver.scheme",
        "simulate.s", "simulate.store_paths",
        "probe.s", "probe.anchor", "probe.lags", "probe.lag_min", "probe.lag_max", "probe.lag_count",
        "probe.N_values",
        "series.r", "series.t", "series.N_values",
        "verify.draws", "verify.exactness_draws", "verify.N", "verify.mu_max", "verify.t", "verify.tau1",
        "verify.tau2", "verify.tolerance", "verify.slack", "verify.p", "verify.times", "verify.steps",
        "assumptions.probes", "assumptions.doublings",
        "output.dir", "output.prefix",
    };
    return keys;
}

class Resolver {
public:
    Resolver(const KeyValueConfig& raw, ExperimentConfig& cfg) : raw_(raw), cfg_(cfg) {}

    const KeyValueConfig::Entry* entry(const std::string& key) {
        used_.insert(key);
        return raw_.find(key);
    }
    bool present(const std::string& key) const { return raw_.has(key); }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        const auto* e = raw_.find(key);
        throw ConfigError(key, e ? e->line : 0, message);
    }
    void require(bool ok, const std::string& key, const std::string& message) const {
        if (!ok) fail(key, message);
    }
    void record(const std::string& key, std::string value) { cfg_.resolved[key] = std::move(value); }

    std::optional<double> real_opt(const std::string& key) {
        const auto* e = entry(key);
        if (!e) return std::nullopt;
        double v = parse_real(key, *e);
        record(key, num(v));
        return v;
    }
    double real(const std::string& key, std::optional<double> fallback) {
        if (auto v = real_opt(key)) return *v;
        if (!fallback) fail(key, "required key is missing");
        record(key, num(*fallback));
        return *fallback;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback, std::size_t min_value) {
        std::size_t v = 0;
        if (const auto* e = entry(key)) {
            long long raw = parse_integer(key, *e);
            require(raw >= 0, key, "must be nonnegative");
            v = static_cast<std::size_t>(raw);
        } else {
            if (!fallback) fail(key, "required key is missing");
            v = *fallback;
        }
        require(v >= min_value, key, "must be >= " + std::to_string(min_value));
        record(key, num(v));
        return v;
    }

    std::optional<std::uint64_t> seed(const std::string& key) {
        const auto* e = entry(key);
        if (!e) return std::nullopt;
        long long raw = parse_integer(key, *e);
        require(raw >= 0, key, "must be nonnegative");
        return static_cast<std::uint64_t>(raw);
    }

    std::vector<double> reals(const std::string& key, std::optional<std::vector<double>> fallback) {
        std::vector<double> v;
        if (const auto* e = entry(key)) {
            v = parse_real_list(key, *e);
        } else {
            if (!fallback) fail(key, "required key is missing");
            v = *fallback;
        }
        record(key, join(v));
        return v;
    }

    std::vector<std::size_t> counts(const std::string& key, std::optional<std::vector<std::size_t>> fallback,
                                    std::size_t min_value) {
        std::vector<std::size_t> v;
        if (const auto* e = entry(key)) {
            for (long long raw : parse_integer_list(key, *e)) {
                require(raw >= static_cast<long long>(min_value), key,
                        "every value must be >= " + std::to_string(min_value));
                v.push_back(static_cast<std::size_t>(raw));
            }
        } else {
            if (!fallback) fail(key, "required key is missing");
            v = *fallback;
        }
        record(key, join(v));
        return v;
    }

    std::string word(const std::string& key, std::optional<std::string> fallback,
                     const std::vector<std::string>& allowed = {}) {
        std::string v;
        if (const auto* e = entry(key)) {
            v = e->value;
        } else {
            if (!fallback) fail(key, "required key is missing");
            v = *fallback;
        }
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
            fail(key, "unknown value '" + v + "' (" + list + ")");
        }
        if (v.find_first_of(" \t") != std::string::npos) fail(key, "value must not contain spaces");
        record(key, v);
        return v;
    }

    void finish(ExperimentKind kind) const {
        for (const auto& [key, e] : raw_.entries()) {
            if (used_.count(key)) continue;
            if (known_keys().count(key)) {
                throw ConfigError(key, e.line, std::string("not used by experiment '") + to_string(kind) + "'");
            }
            throw ConfigError(key, e.line, "unknown key");
        }
    }

private:
    const KeyValueConfig& raw_;
    ExperimentConfig& cfg_;
    std::set<std::string> used_;
};

void check_sorted_strict(Resolver& res, const std::string& key, const std::vector<std::size_t>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) res.require(v[i] > v[i - 1], key, "values must be strictly increasing");
}

void resolve_model(Resolver& res, ExperimentConfig& cfg) {
    ModelRecipe& m = cfg.model;
    m.modes = res.count("model.N", 256, 1);
    const std::string cov = res.word("model.covariance", "example5", {"example5", "constant", "custom"});
    if (cov == "constant") {
        m.covariance = ModelRecipe::Covariance::constant;
        double q = res.real("model.q", std::nullopt);
        res.require(q >= 0.0, "model.q", "covariance eigenvalues must be >= 0");
        m.q_values = {q};
    } else if (cov == "custom") {
        m.covariance = ModelRecipe::Covariance::custom;
        m.q_values = res.reals("model.q", std::nullopt);
        res.require(m.q_values.size() == m.modes, "model.q",
                    "custom covariance needs exactly model.N = " + std::to_string(m.modes) + " values");
        for (double q : m.q_values) res.require(q >= 0.0, "model.q", "covariance eigenvalues must be >= 0");
    } else {
        m.covariance = ModelRecipe::Covariance::example5;
    }

    auto per_mode = [&](const std::string& key, const std::vector<double>& v) {
        res.require(v.size() == 1 || v.size() == m.modes, key,
                    "expected 1 value or model.N = " + std::to_string(m.modes) + " values");
    };
    auto scalar_function = [&](const std::string& key) {
        std::string name = res.word(key, std::nullopt);
        try {
            find_scalar_function(name);
        } catch (const std::exception& e) {
            res.fail(key, e.what());
        }
        return name;
    };

    const std::string drift = res.word("model.drift", "zero", {"zero", "linear", "nemytskii"});
    if (drift == "linear") {
        m.drift = ModelRecipe::Drift::diagonal_linear;
        m.drift_multipliers = res.reals("model.drift.multipliers", std::nullopt);
        per_mode("model.drift.multipliers", m.drift_multipliers);
    } else if (drift == "nemytskii") {
        m.drift = ModelRecipe::Drift::nemytskii;
        m.drift_function = scalar_function("model.drift.function");
        m.drift_grid = res.count("model.drift.grid", 0, 0);
    } else {
        m.drift = ModelRecipe::Drift::zero;
    }

    const std::string diff = res.word("model.diffusion", "additive", {"additive", "multiplicative"});
    if (diff == "multiplicative") {
        m.diffusion = ModelRecipe::Diffusion::multiplicative;
        m.diffusion_function = scalar_function("model.diffusion.function");
        m.diffusion_grid = res.count("model.diffusion.grid", 0, 0);
    } else {
        m.diffusion = ModelRecipe::Diffusion::additive;
        m.diffusion_multipliers = res.reals("model.diffusion.multipliers", std::vector<double>{1.0});
        per_mode("model.diffusion.multipliers", m.diffusion_multipliers);
    }

    m.initial = res.reals("model.initial", std::vector<double>{0.0});
    res.require(m.initial.size() <= m.modes, "model.initial", "more coefficients than model.N");
    m.r = res.real("model.r", 0.0);
    res.require(m.r >= 0.0 && m.r <= 1.0, "model.r", "must lie in [0, 1]");
    m.p = res.real("model.p", 2.0);
    res.require(m.p >= 2.0, "model.p", "must be >= 2");
    try {
        (void)m.build();
    } catch (const std::exception& e) {
        throw ConfigError("model", 0, e.what());
    }
}

void resolve_seed(Resolver& res, ExperimentConfig& cfg, std::uint64_t& target) {
    if (auto s = res.seed("solver.seed")) {
        target = *s;
    } else {
        target = 0;
        cfg.warnings.push_back("solver.seed not set; using seed 0");
    }
    res.record("solver.seed", fmt::format("{}", target));
}

void check_snapshots(Resolver& res, const SolverConfig& solver, const std::string& key) {
    try {
        snapshot_steps(solver);
    } catch (const std::invalid_argument& e) {
        res.fail(key, e.what());
    }
}

void resolve_solver(Resolver& res, ExperimentConfig& cfg) {
    SolverConfig& s = cfg.solver;
    s.T = res.real("solver.T", std::nullopt);
    res.require(s.T >= 0.0, "solver.T", "must be >= 0");
    s.steps = res.count("solver.steps", std::nullopt, 1);
    res.require(s.steps <= std::numeric_limits<std::uint32_t>::max(), "solver.steps", "too many steps");
    s.paths = res.count("solver.paths", std::nullopt, 1);
    res.require(s.paths <= std::numeric_limits<std::uint32_t>::max(), "solver.paths", "too many paths");
    resolve_seed(res, cfg, s.master_seed);
    s.scheme = parse_scheme(res.word("solver.scheme", "exponential_euler", {"exponential_euler", "exact_ou"}));
    if (s.scheme == Scheme::exact_ou) {
        res.require(cfg.model.drift == ModelRecipe::Drift::zero &&
                        cfg.model.diffusion == ModelRecipe::Diffusion::additive,
                    "solver.scheme", "exact_ou needs zero drift and additive diffusion");
    }
}

void resolve_snapshots(Resolver& res, ExperimentConfig& cfg, std::vector<double> fallback) {
    cfg.solver.snapshot_times = res.reals("solver.snapshots", std::move(fallback));
    check_snapshots(res, cfg.solver, "solver.snapshots");
}

double snap_to_grid(const SolverConfig& s, double t) {
    double h = s.step_size();
    return h > 0.0 ? std::round(t / h) * h : 0.0;
}

void resolve_temporal(Resolver& res, ExperimentConfig& cfg) {
    const SolverConfig& s = cfg.solver;
    res.require(s.T > 0.0, "solver.T", "probe-temporal needs T > 0");
    cfg.probe.s = res.reals("probe.s", std::vector<double>{0.0});
    cfg.probe.anchor = res.real("probe.anchor", snap_to_grid(s, 0.5 * s.T));
    try {
        (void)grid_index(s, cfg.probe.anchor);
    } catch (const std::invalid_argument& e) {
        res.fail("probe.anchor", e.what());
    }
    if (res.present("probe.lags")) {
        for (const char* k : {"probe.lag_min", "probe.lag_max", "probe.lag_count"}) {
            if (res.present(k)) res.fail(k, "give either probe.lags or the geometric lag range, not both");
        }
        cfg.probe.lags = res.reals("probe.lags", std::nullopt);
        std::sort(cfg.probe.lags.begin(), cfg.probe.lags.end());
        cfg.probe.lags.erase(std::unique(cfg.probe.lags.begin(), cfg.probe.lags.end()), cfg.probe.lags.end());
        for (double lag : cfg.probe.lags) res.require(lag > 0.0, "probe.lags", "lags must be > 0");
    } else {
        double lag_min = res.real("probe.lag_min", s.T / 1024.0);
        double lag_max = res.real("probe.lag_max", s.T / 4.0);
        std::size_t count = res.count("probe.lag_count", 10, 2);
        res.require(lag_min > 0.0, "probe.lag_min", "must be > 0");
        res.require(lag_max > lag_min, "probe.lag_max", "must exceed probe.lag_min");
        cfg.probe.lags = geometric_lags(s, lag_min, lag_max, count);
    }
    const std::string lag_key = res.present("probe.lags") ? "probe.lags" : "probe.lag_count";
    for (double lag : cfg.probe.lags) {
        try {
            (void)grid_index(s, cfg.probe.anchor + lag);
        } catch (const std::invalid_argument& e) {
            res.fail(res.present("probe.lags") ? "probe.lags" : "probe.lag_max", e.what());
        }
    }
    res.require(cfg.probe.lags.size() >= 8, lag_key,
                "the exponent fit needs at least 8 distinct grid lags, got " + std::to_string(cfg.probe.lags.size()));
    res.require(cfg.probe.lags.back() >= 100.0 * cfg.probe.lags.front(), lag_key,
                "the lag grid must span at least two decades");
}

void resolve_spatial(Resolver& res, ExperimentConfig& cfg) {
    cfg.probe.s = res.reals("probe.s", std::vector<double>{cfg.model.r + 1.0});
    cfg.probe.modes = res.counts("probe.N_values", std::nullopt, 1);
    check_sorted_strict(res, "probe.N_values", cfg.probe.modes);
    res.require(cfg.model.extensible(), "probe.N_values",
                "the model has per-mode lists that pin the truncation; use scalar (broadcast) values");
    for (std::size_t n : cfg.probe.modes) {
        try {
            (void)cfg.model.build(n);
        } catch (const std::exception& e) {
            res.fail("probe.N_values", e.what());
        }
    }
}

void resolve_series(Resolver& res, ExperimentConfig& cfg) {
    cfg.series.r = res.reals("series.r", std::vector<double>{0.0, 0.25});
    cfg.series.t = res.real("series.t", 0.1);
    res.require(cfg.series.t > 0.0, "series.t", "must be > 0");
    cfg.series.modes = res.counts("series.N_values", std::nullopt, 2);
    check_sorted_strict(res, "series.N_values", cfg.series.modes);
}

void resolve_lemmas(Resolver& res, ExperimentConfig& cfg) {
    LemmaOptions& o = cfg.lemmas;
    o.draws = res.count("verify.draws", o.draws, 1);
    o.exactness_draws = res.count("verify.exactness_draws", o.exactness_draws, 1);
    o.modes = res.count("verify.N", o.modes, 1);
    o.mu_max = res.real("verify.mu_max", o.mu_max);
    res.require(o.mu_max >= 0.0, "verify.mu_max", "must be >= 0");
    o.t = res.real_opt("verify.t");
    if (o.t) res.require(*o.t > 0.0, "verify.t", "must be > 0");
    o.tau1 = res.real_opt("verify.tau1");
    o.tau2 = res.real_opt("verify.tau2");
    if (o.tau1.has_value() != o.tau2.has_value()) {
        res.fail(o.tau1 ? "verify.tau1" : "verify.tau2", "verify.tau1 and verify.tau2 must be given together");
    }
    if (o.tau1) {
        res.require(*o.tau1 >= 0.0, "verify.tau1", "must be >= 0");
        res.require(*o.tau2 > *o.tau1, "verify.tau2", "the interval needs tau1 < tau2");
    }
    o.tolerance = res.real("verify.tolerance", o.tolerance);
    res.require(o.tolerance > 0.0, "verify.tolerance", "must be > 0");
    o.slack = res.real("verify.slack", o.slack);
    res.require(o.slack >= 0.0, "verify.slack", "must be >= 0");
    o.p_values = res.reals("verify.p", o.p_values);
    for (double p : o.p_values) res.require(p >= 2.0, "verify.p", "Burkholder exponents must be >= 2");
    o.burkholder_times = res.reals("verify.times", o.burkholder_times);
    o.burkholder_steps = res.count("verify.steps", o.burkholder_steps, 1);
    o.paths = res.count("solver.paths", o.paths, 2);
    resolve_seed(res, cfg, o.seed);

    SolverConfig grid;
    grid.T = *std::max_element(o.burkholder_times.begin(), o.burkholder_times.end());
    grid.steps = o.burkholder_steps;
    grid.paths = o.paths;
    grid.snapshot_times = o.burkholder_times;
    for (double t : o.burkholder_times) res.require(t > 0.0, "verify.times", "times must be > 0");
    check_snapshots(res, grid, "verify.times");
    try {
        validate(o);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("verify", 0, e.what());
    }
}

bool uses_solver_paths(ExperimentKind k) {
    return k == ExperimentKind::simulate || k == ExperimentKind::probe_temporal ||
           k == ExperimentKind::probe_spatial || k == ExperimentKind::verify_lemmas;
}

bool uses_seed(ExperimentKind k) { return uses_solver_paths(k) || k == ExperimentKind::verify_assumptions; }

// ---------------------------------------------------------------- execution

CsvTable simulate_tables(const ExperimentConfig& cfg, unsigned threads, ExperimentResult& result) {
    const ModelSpec model = cfg.model.build();
    const SolverConfig& solver = cfg.solver;
    const std::size_t snaps = solver.snapshot_times.size();
    const auto& svals = cfg.simulate.s;
    const std::size_t stored = std::min(cfg.simulate.store_paths, solver.paths);

    std::vector<std::vector<std::vector<double>>> norms(
        svals.size(), std::vector<std::vector<double>>(snaps, std::vector<double>(solver.paths)));
    std::vector<Trajectory> kept(stored);
    parallel_for_paths(solver.paths, threads, [&](std::size_t path) {
        Trajectory traj = simulate(model, solver, path);
        for (std::size_t i = 0; i < svals.size(); ++i) {
            for (std::size_t j = 0; j < snaps; ++j) norms[i][j][path] = hdot_norm(model.op(), svals[i], traj.snapshots[j].state);
        }
        if (path < stored) kept[path] = std::move(traj);
    });

    // Second moment of the Gaussian solution of a linear additive model.
    const bool exact = model.is_linear_additive() && model.drift().is_zero() && model.declared_p() == 2.0;
    auto exact_l2 = [&](double s, double t) {
        auto lambda = model.op().eigenvalues();
        const auto& g = std::get<AdditiveDiagonal>(model.diffusion().form()).multipliers;
        double sum = 0.0;
        for (std::size_t k = 0; k < lambda.size(); ++k) {
            double decay = std::exp(-2.0 * lambda[k] * t);
            double x0 = model.initial()[k];
            double var = g[k] * g[k] * model.covariance()[k] * (-std::expm1(-2.0 * lambda[k] * t)) / (2.0 * lambda[k]);
            sum += std::pow(lambda[k], s) * (decay * x0 * x0 + var);
        }
        return std::sqrt(sum);
    };

    CsvTable moments{"moments", {"time", "s", "p", "estimate", "std_error"}, {}};
    if (exact) moments.columns.push_back("exact");
    for (std::size_t i = 0; i < svals.size(); ++i) {
        for (std::size_t j = 0; j < snaps; ++j) {
            LpEstimate e = estimate_lp_norm(norms[i][j], model.declared_p());
            double t = solver.snapshot_times[j];
            std::vector<std::string> row{num(t), num(svals[i]), num(model.declared_p()), num(e.estimate), num(e.std_error)};
            std::string line = fmt::format("simulate t={} s={}: estimate={} std_error={}", t, svals[i], e.estimate, e.std_error);
            if (exact) {
                double x = exact_l2(svals[i], t);
                row.push_back(num(x));
                line += fmt::format(" predicted={}", x);
            }
            moments.rows.push_back(std::move(row));
            result.summary.push_back(line);
        }
    }
    if (stored > 0) {
        CsvTable paths{"paths", {"path", "time", "mode", "coefficient"}, {}};
        for (std::size_t p = 0; p < stored; ++p) {
            for (const auto& snap : kept[p].snapshots) {
                for (std::size_t k = 0; k < snap.state.dimension(); ++k) {
                    paths.rows.push_back({num(p), num(snap.time), num(k + 1), num(snap.state[k])});
                }
            }
        }
        result.tables.push_back(std::move(paths));
    }
    return moments;
}

void temporal_tables(const ExperimentConfig& cfg, unsigned threads, ExperimentResult& result) {
    const ModelSpec model = cfg.model.build();
    TemporalProbe probe = temporal_probe(model, cfg.solver, cfg.probe.s, model.declared_p(), cfg.probe.anchor,
                                         cfg.probe.lags, threads);
    CsvTable moments{"moments", {"s", "lag", "estimate", "std_error"}, {}};
    CsvTable fit{"fit", {"s", "slope", "slope_stderr", "intercept", "predicted"}, {}};
    for (const auto& r : probe.results) {
        for (const auto& m : r.moments) moments.rows.push_back({num(r.s), num(m.lag), num(m.estimate), num(m.std_error)});
        fit.rows.push_back({num(r.s), num(r.fit.slope), num(r.fit.slope_stderr), num(r.fit.intercept), num(r.fit.predicted)});
        result.summary.push_back(fmt::format("probe-temporal s={}: slope={} predicted={} slope_stderr={}", r.s,
                                             r.fit.slope, r.fit.predicted, r.fit.slope_stderr));
    }
    result.tables.push_back(std::move(moments));
    result.tables.push_back(std::move(fit));
}

void spatial_tables(const ExperimentConfig& cfg, unsigned threads, ExperimentResult& result) {
    CsvTable sweep{"sweep", {"s", "N", "value", "std_error", "time", "relative_gap"}, {}};
    for (double s : cfg.probe.s) {
        auto points = spatial_sweep(cfg.model, cfg.solver, s, cfg.probe.modes, threads);
        std::vector<double> gaps;
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::string gap;
            if (i > 0) {
                double g = std::abs(points[i].value - points[i - 1].value) / points[i].value;
                gaps.push_back(g);
                gap = num(g);
            }
            sweep.rows.push_back({num(s), num(points[i].modes), num(points[i].value), num(points[i].std_error),
                                  num(points[i].time), gap});
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
        const auto& last = points.back();
        std::string line = fmt::format("probe-spatial s={}: N={} value={} std_error={}", s, last.modes, last.value,
                                       last.std_error);
        if (!gaps.empty()) line += fmt::format(" final_gap={} gaps_decreasing={}", gaps.back(), decreasing ? "yes" : "no");
        result.summary.push_back(line);
    }
    result.tables.push_back(std::move(sweep));
}

void series_tables(const ExperimentConfig& cfg, ExperimentResult& result) {
    CsvTable series{"series", {"r", "t", "N", "partial_sum", "increment"}, {}};
    for (double r : cfg.series.r) {
        double prev = 0.0;
        bool increasing = true;
        std::vector<double> increments;
        for (std::size_t i = 0; i < cfg.series.modes.size(); ++i) {
            double v = example_series_partial_sum(r, cfg.series.t, cfg.series.modes[i]);
            std::string inc;
            if (i > 0) {
                increments.push_back(v - prev);
                increasing = increasing && v > prev;
                inc = num(v - prev);
            }
            series.rows.push_back({num(r), num(cfg.series.t), num(cfg.series.modes[i]), num(v), inc});
            prev = v;
        }
        std::string line = fmt::format("example-section5 r={} t={}: S(N={})={}", r, cfg.series.t,
                                       cfg.series.modes.back(), prev);
        if (!increments.empty()) {
            line += fmt::format(" last_increment={} strictly_increasing={}", increments.back(), increasing ? "yes" : "no");
        }
        result.summary.push_back(line);
    }
    result.tables.push_back(std::move(series));
}

void lemma_tables(const ExperimentConfig& cfg, unsigned threads, ExperimentResult& result) {
    LemmaReport report = verify_lemmas(cfg.lemmas, threads);
    CsvTable table{"lemmas", {"part", "checks", "violations", "worst", "passed"}, {}};
    for (const auto& p : report.parts) {
        table.rows.push_back({p.name, num(p.checks), num(p.violations), num(p.worst), p.passed ? "1" : "0"});
        result.summary.push_back(fmt::format("verify-lemmas {}: {} checks={} violations={} worst={}", p.name,
                                             p.passed ? "PASS" : "FAIL", p.checks, p.violations, p.worst));
    }
    result.checks_passed = report.all_passed();
    result.tables.push_back(std::move(table));
}

void assumption_tables(const ExperimentConfig& cfg, ExperimentResult& result) {
    ValidationReport report = validate_assumptions(cfg.model, cfg.assumptions);
    CsvTable table{"assumptions", {"check", "passed", "measured", "detail"}, {}};
    for (const auto& c : report.checks) {
        table.rows.push_back({c.name, c.passed ? "1" : "0", num(c.measured), c.detail});
        result.summary.push_back(fmt::format("verify-assumptions {}: {} measured={} ({})", c.name,
                                             c.passed ? "PASS" : "FAIL", c.measured, c.detail));
    }
    result.checks_passed = report.all_passed();
    result.tables.push_back(std::move(table));
}

std::string csv_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
    switch (kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::probe_temporal: return "probe-temporal";
        case ExperimentKind::probe_spatial: return "probe-spatial";
        case ExperimentKind::verify_lemmas: return "verify-lemmas";
        case ExperimentKind::example_section5: return "example-section5";
        case ExperimentKind::verify_assumptions: return "verify-assumptions";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::simulate, ExperimentKind::probe_temporal, ExperimentKind::probe_spatial,
                   ExperimentKind::verify_lemmas, ExperimentKind::example_section5,
                   ExperimentKind::verify_assumptions}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown experiment '" + name +
                                "' (simulate | probe-temporal | probe-spatial | verify-lemmas | "
                                "example-section5 | verify-assumptions)");
}

ExperimentConfig resolve_experiment(const KeyValueConfig& raw, const Overrides& overrides,
                                    const std::string& default_prefix) {
    ExperimentConfig cfg;
    const auto* kind_entry = raw.find("experiment");
    if (!kind_entry) throw ConfigError("experiment", 0, "required key is missing");
    try {
        cfg.kind = parse_experiment_kind(kind_entry->value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("experiment", kind_entry->line, e.what());
    }

    KeyValueConfig work = raw;
    if (overrides.paths) {
        if (uses_solver_paths(cfg.kind)) {
            work.set("solver.paths", std::to_string(*overrides.paths));
        } else {
            cfg.warnings.push_back(std::string("--paths ignored: experiment '") + to_string(cfg.kind) +
                                   "' draws no paths");
        }
    }
    if (overrides.seed) {
        if (uses_seed(cfg.kind)) {
            work.set("solver.seed", std::to_string(*overrides.seed));
        } else {
            cfg.warnings.push_back(std::string("--seed ignored: experiment '") + to_string(cfg.kind) +
                                   "' is deterministic");
        }
    }

    Resolver res(work, cfg);
    res.word("experiment", std::nullopt);
    switch (cfg.kind) {
        case ExperimentKind::simulate:
            resolve_model(res, cfg);
            resolve_solver(res, cfg);
            resolve_snapshots(res, cfg, cfg.solver.T > 0.0 ? std::vector<double>{0.0, cfg.solver.T}
                                                           : std::vector<double>{0.0});
            cfg.simulate.s = res.reals("simulate.s", std::vector<double>{0.0});
            cfg.simulate.store_paths = res.count("simulate.store_paths", 0, 0);
            break;
        case ExperimentKind::probe_temporal:
            resolve_model(res, cfg);
            resolve_solver(res, cfg);
            resolve_temporal(res, cfg);
            break;
        case ExperimentKind::probe_spatial:
            resolve_model(res, cfg);
            resolve_solver(res, cfg);
            resolve_snapshots(res, cfg, std::vector<double>{cfg.solver.T});
            resolve_spatial(res, cfg);
            break;
        case ExperimentKind::verify_lemmas:
            resolve_lemmas(res, cfg);
            break;
        case ExperimentKind::example_section5:
            resolve_series(res, cfg);
            break;
        case ExperimentKind::verify_assumptions:
            resolve_model(res, cfg);
            resolve_seed(res, cfg, cfg.assumptions.seed);
            cfg.assumptions.probes = res.count("assumptions.probes", cfg.assumptions.probes, 2);
            cfg.assumptions.doublings = res.count("assumptions.doublings", cfg.assumptions.doublings, 1);
            break;
    }

    cfg.prefix = res.word("output.prefix", default_prefix);
    res.require(cfg.prefix.find_first_of("/\\") == std::string::npos, "output.prefix",
                "must be a file name prefix, not a path");
    if (const auto* e = res.entry("output.dir")) cfg.output_dir = e->value;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
    res.finish(cfg.kind);
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path, const Overrides& overrides) {
    return resolve_experiment(KeyValueConfig::load(path), overrides, path.stem().string());
}

std::string config_header(const ExperimentConfig& config) {
    std::string out = "# config:";
    for (const auto& [k, v] : config.resolved) out += " " + k + "=" + v;
    return out;
}

ExperimentResult execute_experiment(const ExperimentConfig& config, unsigned threads) {
    ExperimentResult result;
    switch (config.kind) {
        case ExperimentKind::simulate: {
            CsvTable moments = simulate_tables(config, threads, result);
            result.tables.insert(result.tables.begin(), std::move(moments));
            break;
        }
        case ExperimentKind::probe_temporal: temporal_tables(config, threads, result); break;
        case ExperimentKind::probe_spatial: spatial_tables(config, threads, result); break;
        case ExperimentKind::verify_lemmas: lemma_tables(config, threads, result); break;
        case ExperimentKind::example_section5: series_tables(config, result); break;
        case ExperimentKind::verify_assumptions: assumption_tables(config, result); break;
    }
    return result;
}

std::vector<std::filesystem::path> write_tables(const ExperimentConfig& config, const ExperimentResult& result) {
    std::filesystem::create_directories(config.output_dir);
    const std::string header = config_header(config);
    std::vector<std::filesystem::path> written;
    for (const auto& table : result.tables) {
        auto path = config.output_dir / (config.prefix + "_" + table.name + ".csv");
        std::ostringstream os;
        os << header << '\n';
        for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
        os << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << os.str();
        if (!out) throw std::runtime_error("write failed for " + path.string());
        written.push_back(path);
    }
    return written;
}

int run_experiment_file(const std::filesystem::path& path, const Overrides& overrides, unsigned threads,
                        std::ostream& out, std::ostream& err) {
    ExperimentConfig config;
    try {
        config = load_experiment(path, overrides);
    } catch (const ConfigError& e) {
        err << "config error in " << path.string() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& w : config.warnings) err << "warning: " << w << '\n';
    try {
        ExperimentResult result = execute_experiment(config, threads);
        for (const auto& line : result.summary) out << line << '\n';
        for (const auto& p : write_tables(config, result)) out << "wrote " << p.string() << '\n';
        return result.checks_passed ? 0 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace spdelab
