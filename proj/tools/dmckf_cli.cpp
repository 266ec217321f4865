// dmckf: command-line front end for the simulator.
//
//   dmckf simulate --config run.json [--seed N]
//   dmckf sweep-sigma [--config run.json] [--sigma ...] [--p ...]
//   dmckf convergence-check [--config run.json] [--trial --step --node | --aug file.json]
//   dmckf complexity --n 3 --m 4 --t 1.6
//   dmckf emit-default-topology [--out file]

#include "dmckf/complexity.hpp"
#include "dmckf/config.hpp"
#include "dmckf/diagnostics.hpp"
#include "dmckf/errors.hpp"
#include "dmckf/harness.hpp"
#include "dmckf/network.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace dmckf;

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> threads;
    std::vector<double> sigmas;
    std::vector<double> ps;
    std::string records_csv;
    std::string summary_json;
};

void add_common(CLI::App* cmd, Overrides& o, bool config_required) {
    auto* opt = cmd->add_option("--config", o.config_path, "JSON experiment config");
    if (config_required) opt->required();
    cmd->add_option("--seed", o.seed, "override the master seed");
    cmd->add_option("--trials", o.trials, "override the trial count");
    cmd->add_option("--steps", o.steps, "override the steps per trial");
    cmd->add_option("--threads", o.threads, "worker threads, 0 for all cores");
    cmd->add_option("--records", o.records_csv, "write the per-step CSV record dump here");
    cmd->add_option("--summary", o.summary_json, "write the JSON summary here");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.trials) cfg.trials = *o.trials;
    if (o.steps) cfg.steps = *o.steps;
    if (o.threads) cfg.threads = *o.threads;
    if (!o.sigmas.empty()) cfg.sigmas = o.sigmas;
    if (!o.ps.empty()) cfg.p_values = o.ps;
    if (!o.records_csv.empty()) cfg.records_csv = o.records_csv;
    if (!o.summary_json.empty()) cfg.summary_json = o.summary_json;
    cfg.validate();
    return cfg;
}

void print_table(const ExperimentResult& result, bool network_only) {
    std::printf("%-8s %-6s %-8s %-15s %10s %8s %10s %8s\n", "sigma", "p", "node", "algorithm", "msd_db",
                "se_db", "avg_iter", "nonconv");
    for (const auto& r : result.rows) {
        if (network_only && r.node) continue;
        const std::string node = r.node ? std::to_string(*r.node + 1) : "network";
        std::printf("%-8s %-6s %-8s %-15s %10.4f %8.4f %10.4f %8zu\n", format_number(r.sigma).c_str(),
                    format_number(r.p).c_str(), node.c_str(), std::string(algorithm_name(r.algorithm)).c_str(),
                    r.msd_db, r.msd_se_db, r.avg_iterations, r.non_converged);
    }
}

AugmentedSystem load_augmented(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("w"))
        throw ConfigError(path + ": expected an object with 'd' and 'w'");
    try {
        const auto d = j["d"].get<std::vector<double>>();
        const auto w = j["w"].get<std::vector<std::vector<double>>>();
        if (d.empty() || w.size() != d.size() || w.front().empty())
            throw ConfigError(path + ": 'w' must have one non-empty row per entry of 'd'");
        AugmentedSystem aug;
        const auto n = static_cast<Eigen::Index>(w.front().size());
        aug.d = Vector(static_cast<Eigen::Index>(d.size()));
        aug.w = Matrix(aug.d.size(), n);
        for (Eigen::Index h = 0; h < aug.d.size(); ++h) {
            const auto& row = w[static_cast<std::size_t>(h)];
            if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(path + ": ragged 'w'");
            aug.d(h) = d[static_cast<std::size_t>(h)];
            for (Eigen::Index c = 0; c < n; ++c) aug.w(h, c) = row[static_cast<std::size_t>(c)];
        }
        aug.prior = Vector::Zero(n);
        return aug;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed maximum-correntropy Kalman filtering with packet drops"};
    app.name("dmckf");
    app.require_subcommand(1);

    Overrides sim;
    auto* simulate = app.add_subcommand("simulate", "run the experiment described by a config file");
    add_common(simulate, sim, true);
    bool per_node = false;
    simulate->add_flag("--per-node", per_node, "print every node, not only the network average");

    Overrides sweep;
    sweep.sigmas = {0.4, 0.6, 1.0, 4.0, 8.0};
    sweep.ps = {0.9, 0.8, 0.7};
    auto* sweep_cmd = app.add_subcommand("sweep-sigma", "MSD and iteration counts over sigma and p grids");
    add_common(sweep_cmd, sweep, false);
    sweep_cmd->add_option("--sigma", sweep.sigmas, "kernel bandwidths")->capture_default_str();
    sweep_cmd->add_option("--p", sweep.ps, "reception probabilities")->capture_default_str();

    Overrides conv;
    std::size_t trial = 0, step = 1, node = 1;
    std::string aug_path;
    double beta_factor = 1.5, alpha = 0.5, scale = 2.0;
    std::optional<double> beta;
    std::size_t probes = 64;
    auto* conv_cmd = app.add_subcommand("convergence-check", "contraction report for one filter step");
    add_common(conv_cmd, conv, false);
    conv_cmd->add_option("--trial", trial, "trial index (0-based)")->capture_default_str();
    conv_cmd->add_option("--step", step, "time step (1-based)")->capture_default_str()->check(CLI::PositiveNumber);
    conv_cmd->add_option("--node", node, "node (1-based)")->capture_default_str()->check(CLI::PositiveNumber);
    conv_cmd->add_option("--aug", aug_path, "JSON file with whitened 'd' and 'w' instead of a captured step");
    conv_cmd->add_option("--beta", beta, "ball radius; default beta-factor * zeta");
    conv_cmd->add_option("--beta-factor", beta_factor, "beta as a multiple of zeta")->capture_default_str();
    conv_cmd->add_option("--alpha", alpha, "contraction target in (0, 1)")->capture_default_str();
    conv_cmd->add_option("--scale", scale, "sigma = scale * max(sigma*, sigma<>)")->capture_default_str();
    conv_cmd->add_option("--probes", probes, "random points in the ball")->capture_default_str();

    int n = 0, m = 0;
    double t = 1.0;
    auto* cx = app.add_subcommand("complexity", "per-node operation counts");
    cx->add_option("--n", n, "state dimension")->required();
    cx->add_option("--m", m, "stacked measurement dimension")->required();
    cx->add_option("--t", t, "average fixed-point iterations")->capture_default_str();

    std::string topo_out;
    auto* emit = app.add_subcommand("emit-default-topology", "write the shipped edge list");
    emit->add_option("--out", topo_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "dmckf: error: usage: %s\n", e.what());
        return 2;
    }

    try {
        if (simulate->parsed()) {
            const ExperimentConfig cfg = resolve(sim);
            print_table(run_experiment(cfg), !per_node);
        } else if (sweep_cmd->parsed()) {
            ExperimentConfig cfg = resolve(sweep);
            print_table(run_experiment(cfg), false);
        } else if (conv_cmd->parsed()) {
            AugmentedSystem aug;
            if (!aug_path.empty()) {
                aug = load_augmented(aug_path);
            } else {
                const ExperimentConfig cfg = resolve(conv);
                aug = capture_step(cfg, trial, step - 1, node - 1);
            }
            const double zeta = zeta_bound(aug);
            const double b = beta ? *beta : beta_factor * zeta;
            const ConvergenceReport rep = convergence_report(aug, b, alpha, scale, probes);
            std::printf("zeta=%s\nbeta=%s\nsigma_star=%s\nsigma_diamond=%s\nsigma=%s\nalpha=%s\n"
                        "max_f_l1=%s\nmax_jacobian_norm=%s\nprobes=%zu\nsatisfied=%s\n",
                        fmt(rep.zeta).c_str(), fmt(rep.beta).c_str(), fmt(rep.sigma_star).c_str(),
                        fmt(rep.sigma_diamond).c_str(), fmt(rep.sigma).c_str(), fmt(rep.alpha).c_str(),
                        fmt(rep.f_norm).c_str(), fmt(rep.jacobian_norm).c_str(), rep.probes,
                        rep.satisfied ? "true" : "false");
            return rep.satisfied ? 0 : 3;
        } else if (cx->parsed()) {
            const ComplexityCount s = sdkf_flops(n, m);
            const ComplexityCount d = dmckf_flops(n, m, t);
            std::printf("algorithm add_mult special\n");
            std::printf("stationary-dkf %s %s\n", fmt(s.add_mult).c_str(), fmt(s.special).c_str());
            std::printf("dmckf-dpd %s %s\n", fmt(d.add_mult).c_str(), fmt(d.special).c_str());
        } else if (emit->parsed()) {
            const std::string_view text = default_topology_edge_list();
            if (topo_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(topo_out, std::ios::binary);
                if (!out) throw IoError("cannot open '" + topo_out + "' for writing");
                out << text;
                if (!out) throw IoError("write failed for '" + topo_out + "'");
            }
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "dmckf: error: %s: %s\n", e.kind().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "dmckf: error: internal: %s\n", e.what());
        return 1;
    }
    return 0;
}
