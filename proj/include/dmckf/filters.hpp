#pragma once

#include "dmckf/linalg.hpp"
#include "dmckf/network.hpp"
#include "dmckf/system_model.hpp"

namespace dmckf {

/// Which measurement covariance enters the Joseph-form posterior covariance.
/// Unweighted uses R of the neighborhood stack; Weighted uses the
/// kernel-inflated covariance of the final iteration.
enum class CovarianceNoise { Unweighted, Weighted };

struct FilterConfig {
    double sigma = 2.0;        // kernel bandwidth
    double epsilon = 1e-6;     // relative-change termination threshold
    int max_iterations = 100;  // fixed-point evaluations per step
    double kernel_floor = 1e-12;
    CovarianceNoise covariance_noise = CovarianceNoise::Unweighted;

    void validate() const;
};

struct FilterState {
    Vector x;
    Matrix p;
};

struct Prior {
    Vector x;
    Matrix p;
};

/// x = A x, P = A P A^T + Q (symmetrized). The counter, when given, tallies
/// the state mean propagation only.
Prior predict(const FilterState& state, const Matrix& a, const Matrix& q,
              FlopCounter* counter = nullptr);

/// Whitened regression of one node at one step.
///
/// With B = blockdiag(B_P, B_R), where B_P B_P^T = P_{k|k-1} and
/// B_R B_R^T = D_p R D_p:
///   d = B^{-1} [prior; s],   w = B^{-1} [I; D_gamma C].
struct AugmentedSystem {
    Vector prior;
    Matrix prior_cov;
    Matrix b_p;
    Matrix b_r;
    Matrix h;  // D_gamma C
    Vector s;
    Matrix r;  // unweighted stacked R
    Vector d;
    Matrix w;

    Eigen::Index state_dim() const { return prior.size(); }
    Eigen::Index stacked_dim() const { return s.size(); }
    Eigen::Index size() const { return d.size(); }
};

AugmentedSystem build_augmented(const Vector& prior, const Matrix& prior_cov,
                                const NeighborhoodStack& stack);

struct StepDiagnostics {
    int iterations = 0;   // reported fixed-point iterations, see fixed_point_update
    int evaluations = 0;  // raw evaluations of the fixed-point map
    bool converged = false;
    double final_change = 0.0;
    Vector lambda;  // kernel weights that produced the returned estimate
};

struct FixedPointResult {
    Vector x;
    Matrix gain;
    Matrix weighted_noise;  // R-tilde of the final evaluation
    StepDiagnostics diagnostics;
};

/// Kernel weights max(G_sigma(d_h - w_h x), floor) for every row h.
Vector kernel_weights(const AugmentedSystem& aug, const Vector& x, double sigma, double floor);

/// Maximum-correntropy cost (1/L) sum_h G_sigma(d_h - w_h x).
double mc_cost(const AugmentedSystem& aug, const Vector& x, double sigma);

struct GainSolution {
    Vector x;
    Matrix gain;
    Matrix weighted_noise;
};

/// x = prior + K (s - D_gamma C prior) with
///   P~ = B_P Lx^{-1} B_P^T,  R~ = B_R Ly^{-1} B_R^T,
///   K  = P~ H^T (H P~ H^T + R~)^{-1}.
GainSolution gain_form_update(const AugmentedSystem& aug, const Vector& lambda);

/// [W^T L W]^{-1} W^T L D through an SPD solve.
Vector direct_mc_solve(const AugmentedSystem& aug, const Vector& lambda);

/// Fixed-point iteration from the prior.
///
/// Each evaluation forms kernel weights at the current iterate and applies
/// gain_form_update. The loop stops once
///   ||x_{t+1} - x_t|| / ||x_t|| <= epsilon
/// (absolute change when ||x_t|| == 0) or after max_iterations evaluations.
/// The confirming evaluation whose output no longer moves is not counted in
/// diagnostics.iterations, which is max(1, evaluations - 1) on convergence
/// and max_iterations otherwise.
FixedPointResult fixed_point_update(const AugmentedSystem& aug, const FilterConfig& config);

/// Joseph form (I - K H) P (I - K H)^T + K N K^T, symmetrized.
Matrix update_covariance(const Matrix& gain, const Matrix& h, const Matrix& noise,
                         const Matrix& prior_cov);
/// Joseph form with H = D_gamma C and N = R of the stack.
Matrix update_covariance(const Matrix& gain, const NeighborhoodStack& stack, const Matrix& prior_cov);

struct StepResult {
    FilterState state;
    StepDiagnostics diagnostics;
};

/// predict -> build_augmented -> fixed_point_update -> update_covariance.
StepResult dmckf_dpd_step(const FilterState& state, const StateSpaceModel& model,
                          const NeighborhoodStack& stack, const FilterConfig& config);

/// Baseline: the same pipeline with unit kernel weights and one evaluation.
FilterState stationary_dkf_step(const FilterState& state, const StateSpaceModel& model,
                                const NeighborhoodStack& stack);

}  // namespace dmckf
