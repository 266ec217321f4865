#include "dmckf/system_model.hpp"

#include "dmckf/errors.hpp"

#include <cmath>
#include <string>

namespace dmckf {

void GaussianMixture::validate() const {
    if (components.empty()) throw InvalidParameter("mixture has no components");
    double total = 0.0;
    for (const auto& comp : components) {
        if (!std::isfinite(comp.weight) || !std::isfinite(comp.mean) || !std::isfinite(comp.variance))
            throw InvalidParameter("mixture component has a non-finite parameter");
        if (comp.weight < 0.0) throw InvalidParameter("mixture weight is negative");
        if (comp.variance < 0.0) throw InvalidParameter("mixture variance is negative");
        total += comp.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw InvalidParameter("mixture weights sum to " + std::to_string(total) + ", expected 1");
}

double GaussianMixture::mean() const {
    double m = 0.0;
    for (const auto& comp : components) m += comp.weight * comp.mean;
    return m;
}

double GaussianMixture::variance() const {
    double second = 0.0;
    for (const auto& comp : components) second += comp.weight * (comp.variance + comp.mean * comp.mean);
    const double m = mean();
    return second - m * m;
}

double sample_mixture(const GaussianMixture& mix, RandomStream& rng) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    const MixtureComponent* chosen = &mix.components.back();
    for (const auto& comp : mix.components) {
        cumulative += comp.weight;
        if (u < cumulative) {
            chosen = &comp;
            break;
        }
    }
    // Draw the normal unconditionally so the stream advances identically for
    // every component choice.
    const double z = rng.normal();
    if (chosen->variance == 0.0) return chosen->mean;
    return chosen->mean + std::sqrt(chosen->variance) * z;
}

void StateSpaceModel::make_moment_matched() {
    const auto n = state_dim();
    q = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) q(k, k) = process_noise.at(static_cast<std::size_t>(k)).variance();
    r.clear();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto m = c[i].rows();
        r.push_back(measurement_noise.at(i).variance() * Matrix::Identity(m, m));
    }
}

void StateSpaceModel::validate() const {
    const auto n = state_dim();
    if (n == 0 || a.cols() != n) throw DimensionMismatch("state transition must be square and non-empty");
    if (q.rows() != n || q.cols() != n) throw DimensionMismatch("process covariance must be n x n");
    if (static_cast<Eigen::Index>(process_noise.size()) != n)
        throw DimensionMismatch("need one process-noise mixture per state coordinate");
    if (measurement_noise.size() != c.size() || r.size() != c.size())
        throw DimensionMismatch("need one measurement mixture and covariance per node");
    for (const auto& mix : process_noise) mix.validate();
    for (const auto& mix : measurement_noise) mix.validate();

    auto check_psd = [](const Matrix& m, const std::string& name) {
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
            throw InvalidParameter(name + " is not symmetric");
        if (m.rows() > 0 && min_eigenvalue_sym(m) < -1e-12) throw InvalidParameter(name + " is not PSD");
    };
    check_psd(q, "process covariance");
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto m = c[i].rows();
        if (c[i].cols() != n)
            throw DimensionMismatch("observation matrix of node " + std::to_string(i + 1) + " has wrong width");
        if (r[i].rows() != m || r[i].cols() != m)
            throw DimensionMismatch("measurement covariance of node " + std::to_string(i + 1) + " has wrong size");
        check_psd(r[i], "measurement covariance of node " + std::to_string(i + 1));
        Eigen::FullPivLU<Matrix> lu(c[i]);
        if (lu.rank() != m)
            throw InvalidParameter("observation matrix of node " + std::to_string(i + 1) +
                                   " must have full row rank");
    }
}

StateSpaceModel default_tracking_model(double dt, std::size_t node_count) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be non-negative");
    StateSpaceModel model;
    model.a = Matrix::Identity(3, 3);
    model.a(0, 1) = dt;
    model.a(0, 2) = dt * dt / 2.0;
    model.a(1, 2) = dt;

    const GaussianMixture process{{{0.9, 0.0, 0.01}, {0.1, 0.0, 1.0}}};
    const GaussianMixture measurement{{{0.9, 0.0, 0.01}, {0.1, 0.0, 100.0}}};
    model.process_noise.assign(3, process);

    Matrix c(1, 3);
    c << 0.0, 1.0, 0.0;
    model.c.assign(node_count, c);
    model.measurement_noise.assign(node_count, measurement);
    model.make_moment_matched();
    return model;
}

Vector sample_process_noise(const StateSpaceModel& model, RandomStream& rng) {
    Vector w(model.state_dim());
    for (Eigen::Index k = 0; k < w.size(); ++k)
        w(k) = sample_mixture(model.process_noise[static_cast<std::size_t>(k)], rng);
    return w;
}

Vector observe(const StateSpaceModel& model, std::size_t node, const Vector& x, RandomStream& rng,
               FlopCounter* counter) {
    const auto m = model.measurement_dim(node);
    Vector v(m);
    for (Eigen::Index k = 0; k < m; ++k) v(k) = sample_mixture(model.measurement_noise[node], rng);
    return counted_multiply_add(model.c[node], x, v, counter);
}

Trajectory simulate_truth(const StateSpaceModel& model, const Vector& x0, std::size_t steps,
                          const RandomStream& rng) {
    if (x0.size() != model.state_dim()) throw DimensionMismatch("initial state has wrong length");
    if (steps == 0) throw InvalidParameter("simulate_truth: steps must be at least 1");

    RandomStream process = rng.split(0);
    std::vector<RandomStream> sensors;
    sensors.reserve(model.node_count());
    for (std::size_t i = 0; i < model.node_count(); ++i) sensors.push_back(rng.split(1 + i));

    Trajectory traj;
    traj.states.reserve(steps);
    traj.process_noise.reserve(steps);
    traj.observations.assign(model.node_count(), {});
    for (auto& obs : traj.observations) obs.reserve(steps);

    Vector x = x0;
    for (std::size_t k = 0; k < steps; ++k) {
        Vector w = sample_process_noise(model, process);
        x = model.a * x + w;
        traj.states.push_back(x);
        traj.process_noise.push_back(std::move(w));
        for (std::size_t i = 0; i < model.node_count(); ++i)
            traj.observations[i].push_back(observe(model, i, x, sensors[i]));
    }
    return traj;
}

}  // namespace dmckf
