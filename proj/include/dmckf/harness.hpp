#pragma once

#include "dmckf/config.hpp"
#include "dmckf/filters.hpp"
#include "dmckf/network.hpp"
#include "dmckf/system_model.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dmckf {

enum class Algorithm { DmckfDpd, StationaryDkf };

std::string_view algorithm_name(Algorithm algorithm);

/// One node at one step of one trial. trial, step and node are zero-based
/// here; the CSV dump writes step and node one-based.
struct MsdRecord {
    std::size_t trial = 0;
    std::size_t step = 0;
    std::size_t node = 0;
    Algorithm algorithm = Algorithm::DmckfDpd;
    double sigma = 0.0;
    double p = 0.0;
    double sq_error = 0.0;
    int iterations = 1;
    bool converged = true;
};

/// Aggregate over all steps and trials. node is empty for the network
/// average row.
struct SummaryRow {
    std::optional<std::size_t> node;
    Algorithm algorithm = Algorithm::DmckfDpd;
    double sigma = 0.0;
    double p = 0.0;
    double msd_db = 0.0;
    double msd_se_db = 0.0;  // delta-method standard error over trials, NaN with one trial
    double avg_iterations = 0.0;
    std::size_t non_converged = 0;
    std::size_t samples = 0;
};

struct ExperimentResult {
    std::vector<SummaryRow> rows;
    std::size_t record_count = 0;
};

Topology load_topology(const ExperimentConfig& config);
/// Tracking model with the configured mixtures. Q and R are moment-matched
/// unless nominal variances are configured.
StateSpaceModel build_model(const ExperimentConfig& config, std::size_t node_count);
DropModel build_drop_model(const ExperimentConfig& config, double p, std::size_t node_count);

/// Truth for one trial, shared by every node and algorithm.
Trajectory trial_truth(const ExperimentConfig& config, const StateSpaceModel& model, std::size_t trial);
/// x0 perturbed per component by N(0, initial_perturbation_variance).
Vector initial_estimate(const ExperimentConfig& config, std::size_t trial, std::size_t node);

/// Records ordered by p, algorithm, sigma, step, node. The baseline does not
/// depend on sigma; its records are repeated under every sigma so each
/// (node, algorithm, sigma, p) cell is populated.
std::vector<MsdRecord> run_trial(const ExperimentConfig& config, std::size_t trial);

using RecordSink = std::function<void(const std::vector<MsdRecord>&)>;

/// All trials, optionally concurrent. Records reach `sink` and the CSV file
/// one trial at a time in trial order, so output never depends on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config, const RecordSink& sink = {});

/// 10 log10 of the mean squared error over the node's records.
double msd_db(const std::vector<MsdRecord>& records, std::size_t node);
double msd_db(const std::vector<MsdRecord>& records, std::size_t node, Algorithm algorithm, double sigma,
              double p);

void write_csv_header(std::ostream& out);
void write_csv_records(std::ostream& out, const std::vector<MsdRecord>& records);
std::string summary_to_json(const ExperimentConfig& config, const ExperimentResult& result);
std::string format_number(double v);

/// Whitened regression that node `node` solves at `step` of `trial`, using
/// the first configured sigma and p.
AugmentedSystem capture_step(const ExperimentConfig& config, std::size_t trial, std::size_t step,
                             std::size_t node);

}  // namespace dmckf
