#include "dmckf/config.hpp"

#include "dmckf/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dmckf {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get_as(const json& v, const std::string& where) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": wrong type");
    }
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

std::vector<double> number_or_list(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a number or a non-empty list");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

GaussianMixture parse_mixture(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty list of components");
    GaussianMixture mix;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        reject_unknown(v[i], at, {"weight", "mean", "variance"});
        MixtureComponent c;
        if (!v[i].contains("weight") || !v[i].contains("variance"))
            throw ConfigError(at + ": 'weight' and 'variance' are required");
        c.weight = get_number(v[i]["weight"], at + ".weight");
        c.variance = get_number(v[i]["variance"], at + ".variance");
        if (v[i].contains("mean")) c.mean = get_number(v[i]["mean"], at + ".mean");
        mix.components.push_back(c);
    }
    try {
        mix.validate();
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return mix;
}

json mixture_json(const GaussianMixture& mix) {
    json out = json::array();
    for (const auto& c : mix.components) out.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    return out;
}

std::size_t get_count(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(where + ": expected a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

std::string_view selection_name(AlgorithmSelection selection) {
    switch (selection) {
        case AlgorithmSelection::DmckfDpd: return "dmckf-dpd";
        case AlgorithmSelection::StationaryDkf: return "stationary-dkf";
        case AlgorithmSelection::Both: return "both";
    }
    return "both";
}

void ExperimentConfig::validate() const {
    if (!(dt >= 0.0)) throw ConfigError("model.dt must be non-negative");
    if (x0.size() != 3) throw ConfigError("model.x0 must have 3 entries");
    if (!(initial_perturbation_variance >= 0.0))
        throw ConfigError("model.initial_perturbation_variance must be non-negative");
    if (!(initial_covariance > 0.0)) throw ConfigError("model.initial_covariance must be positive");
    if (nominal_process_variance && !(*nominal_process_variance >= 0.0))
        throw ConfigError("model.nominal_process_variance must be non-negative");
    if (nominal_measurement_variance && !(*nominal_measurement_variance > 0.0))
        throw ConfigError("model.nominal_measurement_variance must be positive");
    if (p_values.empty()) throw ConfigError("drops.p must not be empty");
    for (double p : p_values)
        if (!(p > 0.0 && p <= 1.0)) throw ConfigError("drops.p values must lie in (0, 1]");
    for (const auto& l : link_overrides) {
        if (!(l.p > 0.0 && l.p <= 1.0)) throw ConfigError("drops.links p must lie in (0, 1]");
        if (l.receiver < 1 || l.sender < 1 || l.receiver == l.sender)
            throw ConfigError("drops.links need distinct 1-based node indices");
    }
    if (sigmas.empty()) throw ConfigError("filter.sigma must not be empty");
    for (double s : sigmas)
        if (!(s > 0.0)) throw ConfigError("filter.sigma values must be positive");
    try {
        filter_config(sigmas.front()).validate();
        process_noise.validate();
        measurement_noise.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (steps < 1) throw ConfigError("steps must be at least 1");
}

FilterConfig ExperimentConfig::filter_config(double sigma) const {
    FilterConfig fc;
    fc.sigma = sigma;
    fc.epsilon = epsilon;
    fc.max_iterations = max_iterations;
    fc.kernel_floor = kernel_floor;
    fc.covariance_noise = covariance_noise;
    return fc;
}

ExperimentConfig parse_config(std::string_view json_text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(root, "config",
                   {"model", "topology", "drops", "filter", "trials", "steps", "seed", "algorithms", "output",
                    "threads"});
    ExperimentConfig cfg;

    if (root.contains("model")) {
        const auto& m = root["model"];
        reject_unknown(m, "model",
                       {"dt", "x0", "process_noise", "measurement_noise", "initial_perturbation_variance",
                        "initial_covariance", "nominal_process_variance", "nominal_measurement_variance"});
        if (m.contains("dt")) cfg.dt = get_number(m["dt"], "model.dt");
        if (m.contains("x0")) cfg.x0 = number_or_list(m["x0"], "model.x0");
        if (m.contains("process_noise")) cfg.process_noise = parse_mixture(m["process_noise"], "model.process_noise");
        if (m.contains("measurement_noise"))
            cfg.measurement_noise = parse_mixture(m["measurement_noise"], "model.measurement_noise");
        if (m.contains("initial_perturbation_variance"))
            cfg.initial_perturbation_variance =
                get_number(m["initial_perturbation_variance"], "model.initial_perturbation_variance");
        if (m.contains("initial_covariance"))
            cfg.initial_covariance = get_number(m["initial_covariance"], "model.initial_covariance");
        if (m.contains("nominal_process_variance") && !m["nominal_process_variance"].is_null())
            cfg.nominal_process_variance =
                get_number(m["nominal_process_variance"], "model.nominal_process_variance");
        if (m.contains("nominal_measurement_variance") && !m["nominal_measurement_variance"].is_null())
            cfg.nominal_measurement_variance =
                get_number(m["nominal_measurement_variance"], "model.nominal_measurement_variance");
    }

    if (root.contains("topology")) {
        if (!root["topology"].is_string()) throw ConfigError("topology: expected \"default\" or a path");
        cfg.topology = root["topology"].get<std::string>();
        if (cfg.topology != "default" && !base_dir.empty() && std::filesystem::path(cfg.topology).is_relative())
            cfg.topology = (std::filesystem::path(base_dir) / cfg.topology).string();
    }

    if (root.contains("drops")) {
        const auto& d = root["drops"];
        reject_unknown(d, "drops", {"p", "links"});
        if (d.contains("p")) cfg.p_values = number_or_list(d["p"], "drops.p");
        if (d.contains("links")) {
            if (!d["links"].is_array()) throw ConfigError("drops.links: expected a list");
            for (std::size_t i = 0; i < d["links"].size(); ++i) {
                const auto& l = d["links"][i];
                const std::string at = "drops.links[" + std::to_string(i) + "]";
                reject_unknown(l, at, {"receiver", "sender", "p"});
                if (!l.contains("receiver") || !l.contains("sender") || !l.contains("p"))
                    throw ConfigError(at + ": 'receiver', 'sender' and 'p' are required");
                cfg.link_overrides.push_back(
                    {get_count(l["receiver"], at + ".receiver"), get_count(l["sender"], at + ".sender"),
                     get_number(l["p"], at + ".p")});
            }
        }
    }

    if (root.contains("filter")) {
        const auto& f = root["filter"];
        reject_unknown(f, "filter", {"sigma", "epsilon", "max_iterations", "kernel_floor", "covariance_noise"});
        if (f.contains("sigma")) cfg.sigmas = number_or_list(f["sigma"], "filter.sigma");
        if (f.contains("epsilon")) cfg.epsilon = get_number(f["epsilon"], "filter.epsilon");
        if (f.contains("max_iterations"))
            cfg.max_iterations = static_cast<int>(get_count(f["max_iterations"], "filter.max_iterations"));
        if (f.contains("kernel_floor")) cfg.kernel_floor = get_number(f["kernel_floor"], "filter.kernel_floor");
        if (f.contains("covariance_noise")) {
            const auto mode = get_as<std::string>(f["covariance_noise"], "filter.covariance_noise");
            if (mode == "unweighted")
                cfg.covariance_noise = CovarianceNoise::Unweighted;
            else if (mode == "weighted")
                cfg.covariance_noise = CovarianceNoise::Weighted;
            else
                throw ConfigError("filter.covariance_noise: expected \"unweighted\" or \"weighted\"");
        }
    }

    if (root.contains("trials")) cfg.trials = get_count(root["trials"], "trials");
    if (root.contains("steps")) cfg.steps = get_count(root["steps"], "steps");
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !(root["seed"].is_number_integer() && root["seed"].get<long long>() >= 0))
            throw ConfigError("seed: expected a non-negative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("threads")) cfg.threads = get_count(root["threads"], "threads");
    if (root.contains("algorithms")) {
        const auto a = get_as<std::string>(root["algorithms"], "algorithms");
        if (a == "both")
            cfg.algorithms = AlgorithmSelection::Both;
        else if (a == "dmckf-dpd")
            cfg.algorithms = AlgorithmSelection::DmckfDpd;
        else if (a == "stationary-dkf")
            cfg.algorithms = AlgorithmSelection::StationaryDkf;
        else
            throw ConfigError("algorithms: expected \"dmckf-dpd\", \"stationary-dkf\" or \"both\"");
    }
    if (root.contains("output")) {
        const auto& o = root["output"];
        reject_unknown(o, "output", {"records_csv", "summary_json"});
        if (o.contains("records_csv")) cfg.records_csv = get_as<std::string>(o["records_csv"], "output.records_csv");
        if (o.contains("summary_json"))
            cfg.summary_json = get_as<std::string>(o["summary_json"], "output.summary_json");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_to_json(const ExperimentConfig& c) {
    json links = json::array();
    for (const auto& l : c.link_overrides) links.push_back({{"receiver", l.receiver}, {"sender", l.sender}, {"p", l.p}});
    json out = {
        {"model",
         {{"dt", c.dt},
          {"x0", c.x0},
          {"process_noise", mixture_json(c.process_noise)},
          {"measurement_noise", mixture_json(c.measurement_noise)},
          {"initial_perturbation_variance", c.initial_perturbation_variance},
          {"initial_covariance", c.initial_covariance},
          {"nominal_process_variance", c.nominal_process_variance ? json(*c.nominal_process_variance) : json(nullptr)},
          {"nominal_measurement_variance",
           c.nominal_measurement_variance ? json(*c.nominal_measurement_variance) : json(nullptr)}}},
        {"topology", c.topology},
        {"drops", {{"p", c.p_values}, {"links", links}}},
        {"filter",
         {{"sigma", c.sigmas},
          {"epsilon", c.epsilon},
          {"max_iterations", c.max_iterations},
          {"kernel_floor", c.kernel_floor},
          {"covariance_noise", c.covariance_noise == CovarianceNoise::Weighted ? "weighted" : "unweighted"}}},
        {"trials", c.trials},
        {"steps", c.steps},
        {"seed", c.seed},
        {"algorithms", std::string(selection_name(c.algorithms))},
        {"threads", c.threads},
        {"output", {{"records_csv", c.records_csv}, {"summary_json", c.summary_json}}},
    };
    return out.dump(2);
}

}  // namespace dmckf
