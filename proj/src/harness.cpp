#include "dmckf/harness.hpp"

#include "dmckf/errors.hpp"
#include "dmckf/random.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

namespace dmckf {

namespace {

// Child stream keys under RandomStream(seed).split(trial).
constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kDropStream = 2;
constexpr std::uint64_t kInitStream = 3;

struct Context {
    Topology topology;
    StateSpaceModel model;
    std::vector<DropModel> drops;  // one per p value
    std::vector<Algorithm> algorithms;
};

std::vector<Algorithm> selected(AlgorithmSelection s) {
    switch (s) {
        case AlgorithmSelection::DmckfDpd: return {Algorithm::DmckfDpd};
        case AlgorithmSelection::StationaryDkf: return {Algorithm::StationaryDkf};
        case AlgorithmSelection::Both: break;
    }
    return {Algorithm::DmckfDpd, Algorithm::StationaryDkf};
}

Context make_context(const ExperimentConfig& config) {
    config.validate();
    Context ctx;
    ctx.topology = load_topology(config);
    const std::size_t n = ctx.topology.node_count();
    ctx.model = build_model(config, n);
    for (double p : config.p_values) ctx.drops.push_back(build_drop_model(config, p, n));
    ctx.algorithms = selected(config.algorithms);
    return ctx;
}

FilterState initial_state(const ExperimentConfig& config, std::size_t trial, std::size_t node) {
    FilterState s;
    s.x = initial_estimate(config, trial, node);
    s.p = config.initial_covariance * Matrix::Identity(s.x.size(), s.x.size());
    return s;
}

std::vector<Vector> observations_at(const Trajectory& truth, std::size_t step) {
    std::vector<Vector> obs;
    obs.reserve(truth.observations.size());
    for (const auto& node_obs : truth.observations) obs.push_back(node_obs[step]);
    return obs;
}

std::vector<MsdRecord> run_trial_with(const ExperimentConfig& config, const Context& ctx, std::size_t trial) {
    const std::size_t nodes = ctx.topology.node_count();
    const std::size_t steps = config.steps;
    const std::size_t ns = config.sigmas.size();
    const std::size_t na = ctx.algorithms.size();
    const Trajectory truth = trial_truth(config, ctx.model, trial);
    const RandomStream root = RandomStream(config.seed).split(trial);

    std::vector<FilterState> init(nodes);
    for (std::size_t i = 0; i < nodes; ++i) init[i] = initial_state(config, trial, i);

    std::vector<FilterConfig> filter_configs;
    for (double s : config.sigmas) filter_configs.push_back(config.filter_config(s));

    std::vector<MsdRecord> records(config.p_values.size() * na * ns * steps * nodes);
    auto slot = [&](std::size_t pi, std::size_t ai, std::size_t si, std::size_t k, std::size_t i) -> MsdRecord& {
        return records[(((pi * na + ai) * ns + si) * steps + k) * nodes + i];
    };

    for (std::size_t pi = 0; pi < config.p_values.size(); ++pi) {
        const double p = config.p_values[pi];
        // Same stream for every p: the uniforms behind the drop indicators are
        // shared, so a link dropped at p is also dropped at any smaller p.
        RandomStream drop_rng = root.split(kDropStream);

        std::vector<std::vector<FilterState>> mc(ns, init);
        std::vector<FilterState> base = init;
        for (std::size_t k = 0; k < steps; ++k) {
            const DropRealization realization = sample_drops(ctx.drops[pi], ctx.topology, k, drop_rng);
            const std::vector<Vector> obs = observations_at(truth, k);
            const Vector& x_true = truth.states[k];
            for (std::size_t i = 0; i < nodes; ++i) {
                const NeighborhoodStack stack =
                    stack_neighborhood(ctx.model, ctx.topology, ctx.drops[pi], i, realization, obs);
                for (std::size_t ai = 0; ai < na; ++ai) {
                    if (ctx.algorithms[ai] == Algorithm::DmckfDpd) {
                        for (std::size_t si = 0; si < ns; ++si) {
                            StepResult r = dmckf_dpd_step(mc[si][i], ctx.model, stack, filter_configs[si]);
                            MsdRecord& rec = slot(pi, ai, si, k, i);
                            rec.sq_error = (x_true - r.state.x).squaredNorm();
                            rec.iterations = r.diagnostics.iterations;
                            rec.converged = r.diagnostics.converged;
                            mc[si][i] = std::move(r.state);
                        }
                    } else {
                        base[i] = stationary_dkf_step(base[i], ctx.model, stack);
                        const double e = (x_true - base[i].x).squaredNorm();
                        for (std::size_t si = 0; si < ns; ++si) {
                            MsdRecord& rec = slot(pi, ai, si, k, i);
                            rec.sq_error = e;
                            rec.iterations = 1;
                            rec.converged = true;
                        }
                    }
                }
            }
        }
        for (std::size_t ai = 0; ai < na; ++ai)
            for (std::size_t si = 0; si < ns; ++si)
                for (std::size_t k = 0; k < steps; ++k)
                    for (std::size_t i = 0; i < nodes; ++i) {
                        MsdRecord& rec = slot(pi, ai, si, k, i);
                        rec.trial = trial;
                        rec.step = k;
                        rec.node = i;
                        rec.algorithm = ctx.algorithms[ai];
                        rec.sigma = config.sigmas[si];
                        rec.p = p;
                    }
    }
    return records;
}

struct Accumulator {
    double sum = 0.0;        // running sum in record order
    double trial_sum = 0.0;  // current trial only
    std::size_t trial_count = 0;
    double mean_sum = 0.0;  // sum of per-trial means
    double mean_sq_sum = 0.0;
    double iterations = 0.0;
    std::size_t non_converged = 0;
    std::size_t count = 0;

    void add(const MsdRecord& r) {
        sum += r.sq_error;
        trial_sum += r.sq_error;
        ++trial_count;
        iterations += r.iterations;
        if (!r.converged) ++non_converged;
        ++count;
    }
    void close_trial() {
        if (trial_count == 0) return;
        const double m = trial_sum / static_cast<double>(trial_count);
        mean_sum += m;
        mean_sq_sum += m * m;
        trial_sum = 0.0;
        trial_count = 0;
    }
};

void check_stream(const std::ostream& out, const std::string& path) {
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
    return algorithm == Algorithm::DmckfDpd ? "dmckf-dpd" : "stationary-dkf";
}

Topology load_topology(const ExperimentConfig& config) {
    if (config.topology == "default") return default_topology();
    return Topology::load_edge_list(config.topology);
}

StateSpaceModel build_model(const ExperimentConfig& config, std::size_t node_count) {
    if (node_count == 0) throw InvalidParameter("topology has no nodes");
    StateSpaceModel model = default_tracking_model(config.dt, node_count);
    model.process_noise.assign(static_cast<std::size_t>(model.state_dim()), config.process_noise);
    model.measurement_noise.assign(node_count, config.measurement_noise);
    model.make_moment_matched();
    if (config.nominal_process_variance)
        model.q = *config.nominal_process_variance * Matrix::Identity(model.state_dim(), model.state_dim());
    if (config.nominal_measurement_variance)
        for (auto& r : model.r) r = *config.nominal_measurement_variance * Matrix::Identity(r.rows(), r.cols());
    model.validate();
    return model;
}

DropModel build_drop_model(const ExperimentConfig& config, double p, std::size_t node_count) {
    DropModel dm(p);
    for (const auto& l : config.link_overrides) {
        if (l.receiver > node_count || l.sender > node_count)
            throw ConfigError("drops.links refers to node " + std::to_string(std::max(l.receiver, l.sender)) +
                              " but the topology has " + std::to_string(node_count) + " nodes");
        dm.set_link(l.receiver - 1, l.sender - 1, l.p);
    }
    return dm;
}

Trajectory trial_truth(const ExperimentConfig& config, const StateSpaceModel& model, std::size_t trial) {
    const Vector x0 = Eigen::Map<const Vector>(config.x0.data(), static_cast<Eigen::Index>(config.x0.size()));
    return simulate_truth(model, x0, config.steps, RandomStream(config.seed).split(trial).split(kTruthStream));
}

Vector initial_estimate(const ExperimentConfig& config, std::size_t trial, std::size_t node) {
    RandomStream rng = RandomStream(config.seed).split(trial).split({kInitStream, node});
    const double sd = std::sqrt(config.initial_perturbation_variance);
    Vector x(static_cast<Eigen::Index>(config.x0.size()));
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = config.x0[static_cast<std::size_t>(j)] + sd * rng.normal();
    return x;
}

std::vector<MsdRecord> run_trial(const ExperimentConfig& config, std::size_t trial) {
    return run_trial_with(config, make_context(config), trial);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RecordSink& sink) {
    const Context ctx = make_context(config);
    const std::size_t nodes = ctx.topology.node_count();
    const std::size_t ns = config.sigmas.size();
    const std::size_t na = ctx.algorithms.size();
    const std::size_t np = config.p_values.size();

    std::ofstream csv;
    if (!config.records_csv.empty()) {
        csv.open(config.records_csv, std::ios::binary);
        if (!csv) throw IoError("cannot open '" + config.records_csv + "' for writing");
        write_csv_header(csv);
        check_stream(csv, config.records_csv);
    }

    // Cells (p, algorithm, sigma, node) with node == nodes for the network row.
    std::vector<Accumulator> acc(np * na * ns * (nodes + 1));
    auto cell = [&](std::size_t pi, std::size_t ai, std::size_t si, std::size_t i) -> Accumulator& {
        return acc[((pi * na + ai) * ns + si) * (nodes + 1) + i];
    };

    ExperimentResult result;
    auto consume = [&](const std::vector<MsdRecord>& recs) {
        std::size_t idx = 0;
        for (std::size_t pi = 0; pi < np; ++pi)
            for (std::size_t ai = 0; ai < na; ++ai)
                for (std::size_t si = 0; si < ns; ++si) {
                    for (std::size_t k = 0; k < config.steps; ++k)
                        for (std::size_t i = 0; i < nodes; ++i, ++idx) {
                            cell(pi, ai, si, i).add(recs[idx]);
                            cell(pi, ai, si, nodes).add(recs[idx]);
                        }
                    for (std::size_t i = 0; i <= nodes; ++i) cell(pi, ai, si, i).close_trial();
                }
        result.record_count += recs.size();
        if (csv.is_open()) {
            write_csv_records(csv, recs);
            check_stream(csv, config.records_csv);
        }
        if (sink) sink(recs);
    };

    std::size_t workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
    workers = std::max<std::size_t>(1, workers);
    if (workers == 1) {
        for (std::size_t t = 0; t < config.trials; ++t) consume(run_trial_with(config, ctx, t));
    } else {
        for (std::size_t first = 0; first < config.trials; first += workers) {
            const std::size_t last = std::min(config.trials, first + workers);
            std::vector<std::future<std::vector<MsdRecord>>> pending;
            for (std::size_t t = first; t < last; ++t)
                pending.push_back(std::async(std::launch::async, [&, t] { return run_trial_with(config, ctx, t); }));
            for (auto& f : pending) consume(f.get());
        }
    }
    if (csv.is_open()) {
        csv.close();
        check_stream(csv, config.records_csv);
    }

    const double trials = static_cast<double>(config.trials);
    for (std::size_t pi = 0; pi < np; ++pi)
        for (std::size_t ai = 0; ai < na; ++ai)
            for (std::size_t si = 0; si < ns; ++si)
                for (std::size_t i = 0; i <= nodes; ++i) {
                    const Accumulator& a = cell(pi, ai, si, i);
                    SummaryRow row;
                    if (i < nodes) row.node = i;
                    row.algorithm = ctx.algorithms[ai];
                    row.sigma = config.sigmas[si];
                    row.p = config.p_values[pi];
                    const double mean = a.sum / static_cast<double>(a.count);
                    row.msd_db = 10.0 * std::log10(mean);
                    row.msd_se_db = std::numeric_limits<double>::quiet_NaN();
                    if (config.trials >= 2) {
                        const double m = a.mean_sum / trials;
                        const double var = std::max(0.0, (a.mean_sq_sum - trials * m * m) / (trials - 1.0));
                        row.msd_se_db = 10.0 / std::log(10.0) * std::sqrt(var / trials) / m;
                    }
                    row.avg_iterations = a.iterations / static_cast<double>(a.count);
                    row.non_converged = a.non_converged;
                    row.samples = a.count;
                    result.rows.push_back(row);
                }

    if (!config.summary_json.empty()) {
        std::ofstream out(config.summary_json, std::ios::binary);
        if (!out) throw IoError("cannot open '" + config.summary_json + "' for writing");
        out << summary_to_json(config, result) << '\n';
        out.close();
        check_stream(out, config.summary_json);
    }
    return result;
}

double msd_db(const std::vector<MsdRecord>& records, std::size_t node) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records)
        if (r.node == node) {
            sum += r.sq_error;
            ++count;
        }
    if (count == 0) throw InvalidParameter("no records for node " + std::to_string(node + 1));
    return 10.0 * std::log10(sum / static_cast<double>(count));
}

double msd_db(const std::vector<MsdRecord>& records, std::size_t node, Algorithm algorithm, double sigma,
              double p) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records)
        if (r.node == node && r.algorithm == algorithm && r.sigma == sigma && r.p == p) {
            sum += r.sq_error;
            ++count;
        }
    if (count == 0)
        throw InvalidParameter("no records for node " + std::to_string(node + 1) + " (" +
                               std::string(algorithm_name(algorithm)) + ")");
    return 10.0 * std::log10(sum / static_cast<double>(count));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) { out << "trial,step,node,algorithm,sigma,p,sq_error,iterations\n"; }

void write_csv_records(std::ostream& out, const std::vector<MsdRecord>& records) {
    std::string line;
    for (const auto& r : records) {
        line.clear();
        line += std::to_string(r.trial);
        line += ',';
        line += std::to_string(r.step + 1);
        line += ',';
        line += std::to_string(r.node + 1);
        line += ',';
        line += algorithm_name(r.algorithm);
        line += ',';
        line += format_number(r.sigma);
        line += ',';
        line += format_number(r.p);
        line += ',';
        line += format_number(r.sq_error);
        line += ',';
        line += std::to_string(r.iterations);
        line += '\n';
        out << line;
    }
}

std::string summary_to_json(const ExperimentConfig& config, const ExperimentResult& result) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& r : result.rows) {
        json row;
        row["node"] = r.node ? json(*r.node + 1) : json("network");
        row["algorithm"] = std::string(algorithm_name(r.algorithm));
        row["sigma"] = r.sigma;
        row["p"] = r.p;
        row["msd_db"] = r.msd_db;
        row["msd_se_db"] = std::isfinite(r.msd_se_db) ? json(r.msd_se_db) : json(nullptr);
        row["avg_iterations"] = r.avg_iterations;
        row["non_converged_steps"] = r.non_converged;
        row["samples"] = r.samples;
        rows.push_back(std::move(row));
    }
    json out;
    out["config"] = json::parse(config_to_json(config));
    out["records"] = result.record_count;
    out["rows"] = std::move(rows);
    return out.dump(2);
}

AugmentedSystem capture_step(const ExperimentConfig& config, std::size_t trial, std::size_t step,
                             std::size_t node) {
    const Context ctx = make_context(config);
    if (trial >= config.trials) throw InvalidParameter("trial index out of range");
    if (step >= config.steps) throw InvalidParameter("step index out of range");
    if (node >= ctx.topology.node_count()) throw InvalidParameter("node index out of range");

    const Trajectory truth = trial_truth(config, ctx.model, trial);
    RandomStream drop_rng = RandomStream(config.seed).split(trial).split(kDropStream);
    const FilterConfig fc = config.filter_config(config.sigmas.front());
    FilterState state = initial_state(config, trial, node);
    for (std::size_t k = 0;; ++k) {
        const DropRealization realization = sample_drops(ctx.drops.front(), ctx.topology, k, drop_rng);
        const std::vector<Vector> obs = observations_at(truth, k);
        const NeighborhoodStack stack =
            stack_neighborhood(ctx.model, ctx.topology, ctx.drops.front(), node, realization, obs);
        if (k == step) {
            const Prior prior = predict(state, ctx.model.a, ctx.model.q);
            return build_augmented(prior.x, prior.p, stack);
        }
        state = dmckf_dpd_step(state, ctx.model, stack, fc).state;
    }
}

}  // namespace dmckf
