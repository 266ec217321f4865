#include "dmckf/filters.hpp"

#include "dmckf/correntropy.hpp"
#include "dmckf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dmckf {

void FilterConfig::validate() const {
    if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    if (max_iterations < 1) throw InvalidParameter("max_iterations must be at least 1");
    if (!(kernel_floor > 0.0 && kernel_floor < 1.0))
        throw InvalidParameter("kernel_floor must lie in (0, 1)");
}

Prior predict(const FilterState& state, const Matrix& a, const Matrix& q, FlopCounter* counter) {
    const auto n = state.x.size();
    if (a.rows() != n || a.cols() != n || state.p.rows() != n || state.p.cols() != n ||
        q.rows() != n || q.cols() != n)
        throw DimensionMismatch("predict: state, transition and process covariance disagree");
    Prior prior;
    prior.x = counted_multiply(a, state.x, counter);
    prior.p = symmetrize(a * state.p * a.transpose() + q);
    return prior;
}

AugmentedSystem build_augmented(const Vector& prior, const Matrix& prior_cov,
                                const NeighborhoodStack& stack) {
    const auto n = prior.size();
    const auto m = stack.stacked_dim();
    if (prior_cov.rows() != n || prior_cov.cols() != n || stack.c.cols() != n)
        throw DimensionMismatch("build_augmented: prior and stack disagree on the state dimension");

    AugmentedSystem aug;
    aug.prior = prior;
    aug.prior_cov = prior_cov;
    aug.h = stack.d_gamma * stack.c;
    aug.s = stack.s;
    aug.r = stack.r;
    try {
        aug.b_p = cholesky(prior_cov);
    } catch (const DecompositionFailure& e) {
        throw DecompositionFailure(std::string("state block: ") + e.what(), e.pivot());
    }
    try {
        aug.b_r = cholesky(symmetrize(stack.d_p * stack.r * stack.d_p));
    } catch (const DecompositionFailure& e) {
        throw DecompositionFailure(std::string("measurement block: ") + e.what(), e.pivot());
    }

    aug.d.resize(n + m);
    aug.d.head(n) = solve_lower(aug.b_p, prior);
    aug.d.tail(m) = solve_lower(aug.b_r, aug.s);
    aug.w.resize(n + m, n);
    aug.w.topRows(n) = solve_lower(aug.b_p, Matrix(Matrix::Identity(n, n)));
    aug.w.bottomRows(m) = solve_lower(aug.b_r, aug.h);
    return aug;
}

Vector kernel_weights(const AugmentedSystem& aug, const Vector& x, double sigma, double floor) {
    const Vector e = aug.d - aug.w * x;
    Vector lambda(e.size());
    for (Eigen::Index h = 0; h < e.size(); ++h) lambda(h) = std::max(gaussian_kernel(e(h), sigma), floor);
    return lambda;
}

double mc_cost(const AugmentedSystem& aug, const Vector& x, double sigma) {
    const Vector e = aug.d - aug.w * x;
    double acc = 0.0;
    for (Eigen::Index h = 0; h < e.size(); ++h) acc += gaussian_kernel(e(h), sigma);
    return acc / static_cast<double>(e.size());
}

GainSolution gain_form_update(const AugmentedSystem& aug, const Vector& lambda) {
    const auto n = aug.state_dim();
    const auto m = aug.stacked_dim();
    if (lambda.size() != n + m) throw DimensionMismatch("gain_form_update: weight vector has wrong length");
    if ((lambda.array() <= 0.0).any()) throw InvalidParameter("gain_form_update: weights must be positive");

    const Vector inv_x = lambda.head(n).cwiseInverse();
    const Vector inv_y = lambda.tail(m).cwiseInverse();
    const Matrix p_tilde = symmetrize(aug.b_p * inv_x.asDiagonal() * aug.b_p.transpose());

    GainSolution out;
    out.weighted_noise = symmetrize(aug.b_r * inv_y.asDiagonal() * aug.b_r.transpose());

    // K = P~ H^T (H P~ H^T + R~)^-1 evaluated in whitened coordinates. With
    // S = Lambda_y^1/2 B_r^-1 H the innovation covariance is
    // B_r Lambda_y^-1/2 (I + S P~ S^T) Lambda_y^-1/2 B_r^T, and the middle
    // factor stays well conditioned when some weights sit at the floor.
    const Vector root_y = lambda.tail(m).cwiseSqrt();
    const Matrix wy = aug.w.bottomRows(m);
    const Matrix sw = root_y.asDiagonal() * wy;
    const Matrix ps = p_tilde * sw.transpose();  // n x m
    const Matrix inner = symmetrize(Matrix::Identity(m, m) + sw * ps);
    Matrix solved;
    try {
        solved = spd_solve(inner, Matrix(ps.transpose()));
    } catch (const DecompositionFailure& e) {
        throw SingularUpdate(std::string("innovation covariance is not invertible: ") + e.what());
    }
    const Matrix whitened_gain = (root_y.asDiagonal() * solved).transpose();  // K B_r
    out.gain = aug.b_r.transpose().triangularView<Eigen::Upper>().solve(whitened_gain.transpose()).transpose();
    out.x = aug.prior + whitened_gain * (aug.d.tail(m) - wy * aug.prior);
    return out;
}

Vector direct_mc_solve(const AugmentedSystem& aug, const Vector& lambda) {
    if (lambda.size() != aug.size()) throw DimensionMismatch("direct_mc_solve: weight vector has wrong length");
    if ((lambda.array() <= 0.0).any()) throw InvalidParameter("direct_mc_solve: weights must be positive");
    const Matrix weighted = lambda.asDiagonal() * aug.w;
    const Matrix normal = symmetrize(aug.w.transpose() * weighted);
    try {
        return spd_solve(normal, Vector(weighted.transpose() * aug.d));
    } catch (const DecompositionFailure& e) {
        throw SingularUpdate(std::string("normal matrix is singular: ") + e.what());
    }
}

FixedPointResult fixed_point_update(const AugmentedSystem& aug, const FilterConfig& config) {
    config.validate();
    FixedPointResult out;
    Vector current = aug.prior;
    auto& diag = out.diagnostics;
    while (diag.evaluations < config.max_iterations) {
        Vector lambda = kernel_weights(aug, current, config.sigma, config.kernel_floor);
        GainSolution next = gain_form_update(aug, lambda);
        ++diag.evaluations;

        const double step = (next.x - current).norm();
        const double scale = current.norm();
        diag.final_change = scale > 0.0 ? step / scale : step;

        out.x = std::move(next.x);
        out.gain = std::move(next.gain);
        out.weighted_noise = std::move(next.weighted_noise);
        diag.lambda = std::move(lambda);
        current = out.x;
        if (diag.final_change <= config.epsilon) {
            diag.converged = true;
            break;
        }
    }
    diag.iterations = diag.converged ? std::max(1, diag.evaluations - 1) : diag.evaluations;
    return out;
}

Matrix update_covariance(const Matrix& gain, const Matrix& h, const Matrix& noise,
                         const Matrix& prior_cov) {
    const auto n = prior_cov.rows();
    if (gain.rows() != n || gain.cols() != h.rows() || h.cols() != n || noise.rows() != h.rows() ||
        noise.cols() != h.rows())
        throw DimensionMismatch("update_covariance: gain, observation and covariance disagree");
    const Matrix ikh = Matrix::Identity(n, n) - gain * h;
    return symmetrize(ikh * prior_cov * ikh.transpose() + gain * noise * gain.transpose());
}

Matrix update_covariance(const Matrix& gain, const NeighborhoodStack& stack, const Matrix& prior_cov) {
    return update_covariance(gain, stack.d_gamma * stack.c, stack.r, prior_cov);
}

StepResult dmckf_dpd_step(const FilterState& state, const StateSpaceModel& model,
                          const NeighborhoodStack& stack, const FilterConfig& config) {
    const Prior prior = predict(state, model.a, model.q);
    const AugmentedSystem aug = build_augmented(prior.x, prior.p, stack);
    FixedPointResult fp = fixed_point_update(aug, config);
    const Matrix& noise =
        config.covariance_noise == CovarianceNoise::Weighted ? fp.weighted_noise : aug.r;
    StepResult out;
    out.state.x = std::move(fp.x);
    out.state.p = update_covariance(fp.gain, aug.h, noise, prior.p);
    out.diagnostics = std::move(fp.diagnostics);
    return out;
}

FilterState stationary_dkf_step(const FilterState& state, const StateSpaceModel& model,
                                const NeighborhoodStack& stack) {
    const Prior prior = predict(state, model.a, model.q);
    const AugmentedSystem aug = build_augmented(prior.x, prior.p, stack);
    GainSolution sol = gain_form_update(aug, Vector::Ones(aug.size()));
    FilterState out;
    out.x = std::move(sol.x);
    out.p = update_covariance(sol.gain, aug.h, aug.r, prior.p);
    return out;
}

}  // namespace dmckf
