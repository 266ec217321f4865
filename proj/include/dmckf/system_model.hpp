#pragma once

#include "dmckf/linalg.hpp"
#include "dmckf/random.hpp"

#include <vector>

namespace dmckf {

struct MixtureComponent {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Finite mixture of scalar normals. Weights sum to one (1e-12), variances are
/// non-negative, and there is at least one component.
struct GaussianMixture {
    std::vector<MixtureComponent> components;

    static GaussianMixture gaussian(double variance, double mean = 0.0) {
        return GaussianMixture{{{1.0, mean, variance}}};
    }

    void validate() const;
    double mean() const;
    /// Total variance: sum w (var + mean^2) - (sum w mean)^2.
    double variance() const;
};

/// Draw a component by weight, then a normal variate from it.
double sample_mixture(const GaussianMixture& mix, RandomStream& rng);

/// Linear time-invariant dynamics observed by a set of sensor nodes.
///
/// process_noise holds one mixture per state coordinate (sampled
/// independently); measurement_noise holds one mixture per node, applied
/// independently to each measurement row of that node. q and r are the
/// covariances the filters use; make_moment_matched() derives them from the
/// mixtures.
struct StateSpaceModel {
    Matrix a;
    std::vector<Matrix> c;
    std::vector<GaussianMixture> process_noise;
    std::vector<GaussianMixture> measurement_noise;
    Matrix q;
    std::vector<Matrix> r;

    Eigen::Index state_dim() const { return a.rows(); }
    std::size_t node_count() const { return c.size(); }
    Eigen::Index measurement_dim(std::size_t node) const { return c.at(node).rows(); }

    /// Fill q and r with diagonal moment-matched covariances of the mixtures.
    void make_moment_matched();
    void validate() const;
};

/// Constant-acceleration target with velocity-only sensors, impulsive
/// mixture noise, and moment-matched covariances.
StateSpaceModel default_tracking_model(double dt, std::size_t node_count = 20);

/// x_k = A x_{k-1} + q_k over k = 1..K, with y_k^i = C_i x_k + v_k^i per node.
struct Trajectory {
    std::vector<Vector> states;
    std::vector<Vector> process_noise;
    std::vector<std::vector<Vector>> observations;  // [node][step]
};

/// Sampled process noise, one independent draw per coordinate.
Vector sample_process_noise(const StateSpaceModel& model, RandomStream& rng);

/// y = C_i x + v with independent measurement noise per row.
Vector observe(const StateSpaceModel& model, std::size_t node, const Vector& x, RandomStream& rng,
               FlopCounter* counter = nullptr);

/// Generate a trajectory. Process noise uses rng.split(0); node i's
/// measurement noise uses rng.split(1 + i).
Trajectory simulate_truth(const StateSpaceModel& model, const Vector& x0, std::size_t steps,
                          const RandomStream& rng);

}  // namespace dmckf
