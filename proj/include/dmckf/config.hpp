#pragma once

#include "dmckf/filters.hpp"
#include "dmckf/system_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dmckf {

enum class AlgorithmSelection { DmckfDpd, StationaryDkf, Both };

/// Per directed link reception probability, one-based node indices as in
/// the config file.
struct LinkOverride {
    std::size_t receiver = 1;
    std::size_t sender = 1;
    double p = 1.0;
};

/// Full description of a Monte-Carlo run. Defaults reproduce the tracking
/// experiment at desk scale (20 trials x 1000 steps).
struct ExperimentConfig {
    // model
    double dt = 0.1;
    std::vector<double> x0{0.0, 0.0, 1.0};
    GaussianMixture process_noise{{{0.9, 0.0, 0.01}, {0.1, 0.0, 1.0}}};
    GaussianMixture measurement_noise{{{0.9, 0.0, 0.01}, {0.1, 0.0, 100.0}}};
    double initial_perturbation_variance = 0.01;
    double initial_covariance = 0.01;
    // Filter-side Q = q I and R_i = r I. Unset: moment-matched to the mixtures.
    std::optional<double> nominal_process_variance;
    std::optional<double> nominal_measurement_variance;

    // "default" or a path to an edge-list file
    std::string topology = "default";

    std::vector<double> p_values{0.8};
    std::vector<LinkOverride> link_overrides;

    std::vector<double> sigmas{2.0};
    double epsilon = 1e-6;
    int max_iterations = 100;
    double kernel_floor = 1e-12;
    CovarianceNoise covariance_noise = CovarianceNoise::Unweighted;

    std::size_t trials = 20;
    std::size_t steps = 1000;
    std::uint64_t seed = 1;
    AlgorithmSelection algorithms = AlgorithmSelection::Both;

    std::string records_csv;   // empty: no record dump
    std::string summary_json;  // empty: no summary file
    std::size_t threads = 1;   // 0: hardware concurrency

    void validate() const;
    FilterConfig filter_config(double sigma) const;
};

/// Parse the JSON config. Unknown keys are rejected. A relative topology path
/// is resolved against base_dir when it is non-empty.
ExperimentConfig parse_config(std::string_view json_text, const std::string& base_dir = {});
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

std::string_view selection_name(AlgorithmSelection selection);

}  // namespace dmckf
