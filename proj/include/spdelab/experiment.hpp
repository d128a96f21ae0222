#pragma once

// Experiment runner: resolves a key=value config into typed settings, runs the
// named experiment and writes one CSV per result table.
//
// Every CSV starts with "# config: " followed by the sorted resolved key=value
// list (defaults included, seed included). output.dir and the worker count are
// left out so that moving or parallelizing a run does not change its bytes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spdelab/assumptions.hpp"
#include "spdelab/config.hpp"
#include "spdelab/lemmas.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

enum class ExperimentKind {
    simulate,
    probe_temporal,
    probe_spatial,
    verify_lemmas,
    example_section5,
    verify_assumptions,
};

const char* to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(const std::string& name);

struct SimulateSettings {
    std::vector<double> s{0.0};
    std::size_t store_paths = 0;  // coefficient dumps for the first paths
};

struct ProbeSettings {
    std::vector<double> s;
    double anchor = 0.0;
    std::vector<double> lags;        // resolved lag grid (temporal)
    std::vector<std::size_t> modes;  // truncation sweep (spatial)
};

struct SeriesSettings {
    std::vector<double> r{0.0, 0.25};
    double t = 0.1;
    std::vector<std::size_t> modes;
};

struct Overrides {
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::simulate;
    ModelRecipe model;
    SolverConfig solver;
    SimulateSettings simulate;
    ProbeSettings probe;
    SeriesSettings series;
    LemmaOptions lemmas;
    ValidationOptions assumptions;
    std::filesystem::path output_dir = ".";
    std::string prefix;
    std::map<std::string, std::string> resolved;
    std::vector<std::string> warnings;
};

/// Throws ConfigError (with key and line) for missing, malformed, unknown or
/// out-of-range keys.
ExperimentConfig resolve_experiment(const KeyValueConfig& raw, const Overrides& overrides = {},
                                    const std::string& default_prefix = "run");

/// Loads and resolves a config file; the default prefix is the file's stem.
ExperimentConfig load_experiment(const std::filesystem::path& path, const Overrides& overrides = {});

std::string config_header(const ExperimentConfig& config);

struct CsvTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
    std::vector<CsvTable> tables;
    std::vector<std::string> summary;
    bool checks_passed = true;  // verify-* experiments only
};

ExperimentResult execute_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Writes <output_dir>/<prefix>_<table>.csv for each table and returns the paths.
std::vector<std::filesystem::path> write_tables(const ExperimentConfig& config, const ExperimentResult& result);

/// The whole `run` command. Exit status 0 on success, 1 on config, validation
/// or I/O errors, 2 when a verify-* experiment reports failures.
int run_experiment_file(const std::filesystem::path& path, const Overrides& overrides, unsigned threads,
                        std::ostream& out, std::ostream& err);

}  // namespace spdelab
