#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msob/report.hpp"

namespace msob {

struct ExperimentConfig {
    std::string experiment;
    std::string space_spec = "interval:101";
    std::string field_spec = "linear";
    double q = 2.0;
    double p = 2.0;
    double lambda = 1.0;
    double tau = 0.01;
    std::size_t steps = 20;
    std::size_t count = 100;  // pairs / curves / trials, per experiment
    std::vector<double> deltas;
    std::vector<double> times;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    std::string format = "json";  // json | csv
};

/// Exit-code contract: 0 all checks pass, 1 assertion failure, 2 bad
/// configuration or parse error. Reports land in config.out_dir.
int run_experiment(const ExperimentConfig& config);

/// Deterministic serialization of a report next to the experiment outputs.
void emit_report(const Report& report, const std::string& format,
                 const std::filesystem::path& out_base);

/// Known experiment names, for CLI help and validation.
const std::vector<std::string>& experiment_names();

}  // namespace msob
