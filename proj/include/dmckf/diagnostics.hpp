#pragma once

#include "dmckf/filters.hpp"

#include <cstdint>
#include <limits>
#include <optional>

namespace dmckf {

// Sufficient-condition checks for convergence of the fixed-point map
//   f(x) = [sum_h G(e_h) w_h^T w_h]^{-1} sum_h G(e_h) w_h^T d_h,  e_h = d_h - w_h x,
// on the l1 ball of radius beta. Row norms ||w_h||_1 are vector l1 norms;
// ||w_h^T w_h||_1 is the matrix one-norm. Kernels here are never floored.

/// sqrt(n) sum_h ||w_h||_1 |d_h| / lambda_min(W^T W).
double zeta_bound(const AugmentedSystem& aug);

/// zeta's numerator over lambda_min(sum_h G_sigma(beta ||w_h||_1 + |d_h|) w_h^T w_h).
/// Returns +inf when every kernel underflows.
double phi(double sigma, double beta, const AugmentedSystem& aug);

/// Jacobian-bound function:
///   sqrt(n) sum_h (beta||w_h||_1 + |d_h|) ||w_h||_1 (beta ||w_h^T w_h||_1 + ||w_h^T d_h||_1)
///   / (sigma^2 lambda_min(sum_h G_sigma(beta ||w_h||_1 + |d_h|) w_h^T w_h)).
double psi(double sigma, double beta, const AugmentedSystem& aug);

struct SigmaThresholds {
    double sigma_star = 0.0;     // phi(sigma*) = beta
    double sigma_diamond = 0.0;  // psi(sigma_diamond) = alpha
};

/// Bisection roots of phi = beta and psi = alpha. The bracket is found by
/// doubling from 1e-3 (at most 60 doublings).
SigmaThresholds solve_sigma_thresholds(double beta, double alpha, const AugmentedSystem& aug);

/// The unfloored fixed-point map f(x).
Vector fixed_point_map(const Vector& x, const AugmentedSystem& aug, double sigma);

/// n x n Jacobian of f at x; column j is d f / d x_j.
Matrix jacobian_f(const Vector& x, const AugmentedSystem& aug, double sigma);

struct ConvergenceReport {
    double zeta = 0.0;
    double beta = 0.0;
    double sigma = 0.0;  // bandwidth the probes were evaluated at
    double sigma_star = std::numeric_limits<double>::quiet_NaN();
    double sigma_diamond = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double f_norm = 0.0;         // max ||f(x)||_1 over probes
    double jacobian_norm = 0.0;  // max ||grad f(x)||_1 over probes
    std::size_t probes = 0;
    bool satisfied = false;
};

inline constexpr std::size_t kDefaultProbes = 64;
inline constexpr std::uint64_t kDefaultProbeSeed = 0x5eed'c0de;

/// Evaluate ||f||_1 and ||grad f||_1 at probe points drawn uniformly from the
/// l1 ball of radius beta. satisfied means max ||f||_1 <= beta and
/// max ||grad f||_1 < 1 (and <= alpha when alpha is given). With zero probes
/// the maxima are vacuously zero. Requires beta > zeta.
ConvergenceReport verify_contraction(const AugmentedSystem& aug, double sigma, double beta,
                                     std::size_t probes = kDefaultProbes,
                                     std::optional<double> alpha = std::nullopt,
                                     std::uint64_t seed = kDefaultProbeSeed);

/// Solve the thresholds, then verify at sigma = scale * max(sigma*, sigma_diamond).
ConvergenceReport convergence_report(const AugmentedSystem& aug, double beta, double alpha,
                                     double scale = 1.0, std::size_t probes = kDefaultProbes,
                                     std::uint64_t seed = kDefaultProbeSeed);

}  // namespace dmckf
