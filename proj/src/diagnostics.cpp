#include "dmckf/diagnostics.hpp"

#include "dmckf/correntropy.hpp"
#include "dmckf/errors.hpp"
#include "dmckf/random.hpp"

#include <cmath>
#include <functional>

namespace dmckf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double unweighted_min_eigenvalue(const AugmentedSystem& aug) {
    const double lmin = min_eigenvalue_sym(symmetrize(aug.w.transpose() * aug.w));
    if (!(lmin > 1e-14 * std::max(1.0, aug.w.squaredNorm())))
        throw RankDeficiency("sum of w_h^T w_h is singular (lambda_min = " + std::to_string(lmin) + ")");
    return lmin;
}

double zeta_numerator(const AugmentedSystem& aug) {
    double acc = 0.0;
    for (Eigen::Index h = 0; h < aug.size(); ++h) acc += aug.w.row(h).cwiseAbs().sum() * std::abs(aug.d(h));
    return std::sqrt(static_cast<double>(aug.state_dim())) * acc;
}

// lambda_min of sum_h G_sigma(beta ||w_h||_1 + |d_h|) w_h^T w_h, returned as
// rel * exp(-decay). The kernels are normalised by the largest one
// first so small sigma does not underflow; a relative eigenvalue below solver
// resolution counts as zero.
struct ScaledEigen {
    double rel = 0.0;
    double decay = 0.0;  // arg_min^2 / (2 sigma^2)
};

ScaledEigen weighted_min_eigenvalue(double sigma, double beta, const AugmentedSystem& aug) {
    const auto n = aug.state_dim();
    Vector args(aug.size());
    for (Eigen::Index h = 0; h < aug.size(); ++h)
        args(h) = beta * aug.w.row(h).cwiseAbs().sum() + std::abs(aug.d(h));
    const double amin = args.minCoeff();
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index h = 0; h < aug.size(); ++h) {
        const double g = std::exp(-(args(h) - amin) * (args(h) + amin) / (2.0 * sigma * sigma));
        if (g > 0.0) m.noalias() += g * aug.w.row(h).transpose() * aug.w.row(h);
    }
    double rel = min_eigenvalue_sym(symmetrize(m));
    if (!(rel > 1e-13 * m.trace())) rel = 0.0;
    return {rel, amin * amin / (2.0 * sigma * sigma)};
}

// num / lambda_min without forming the underflowing kernel product.
double over_weighted(double num, const ScaledEigen& e) {
    if (!(e.rel > 0.0)) return kInf;
    return std::exp(std::log(num / e.rel) + e.decay);
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidParameter(std::string(name) + " must be positive and finite");
}

// Smallest sigma on the doubling grid with fn(sigma) <= target, refined by
// bisection. fn is expected to decrease through the target.
double bisect_root(const std::function<double(double)>& fn, double target, const char* name) {
    double lo = 0.0;
    double hi = 1e-3;
    int doublings = 0;
    while (!(fn(hi) <= target)) {
        if (++doublings > 60)
            throw NoRoot(std::string(name) + ": no bracket within 60 doublings from sigma = 1e-3");
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 300 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (fn(mid) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

double zeta_bound(const AugmentedSystem& aug) { return zeta_numerator(aug) / unweighted_min_eigenvalue(aug); }

double phi(double sigma, double beta, const AugmentedSystem& aug) {
    check_positive(sigma, "sigma");
    check_positive(beta, "beta");
    unweighted_min_eigenvalue(aug);
    const double num = zeta_numerator(aug);
    if (num == 0.0) return 0.0;
    return over_weighted(num, weighted_min_eigenvalue(sigma, beta, aug));
}

double psi(double sigma, double beta, const AugmentedSystem& aug) {
    check_positive(sigma, "sigma");
    check_positive(beta, "beta");
    unweighted_min_eigenvalue(aug);
    double num = 0.0;
    for (Eigen::Index h = 0; h < aug.size(); ++h) {
        const double w1 = aug.w.row(h).cwiseAbs().sum();
        const double d = std::abs(aug.d(h));
        const double outer = aug.w.row(h).cwiseAbs().maxCoeff() * w1;  // ||w^T w||_1
        num += (beta * w1 + d) * w1 * (beta * outer + d * w1);
    }
    num *= std::sqrt(static_cast<double>(aug.state_dim()));
    if (num == 0.0) return 0.0;
    return over_weighted(num / (sigma * sigma), weighted_min_eigenvalue(sigma, beta, aug));
}

SigmaThresholds solve_sigma_thresholds(double beta, double alpha, const AugmentedSystem& aug) {
    check_positive(beta, "beta");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    const double zeta = zeta_bound(aug);
    if (!(beta > zeta))
        throw PreconditionViolated("beta = " + std::to_string(beta) + " must exceed zeta = " +
                                   std::to_string(zeta));
    SigmaThresholds out;
    out.sigma_star = bisect_root([&](double s) { return phi(s, beta, aug); }, beta, "phi(sigma) = beta");
    out.sigma_diamond =
        bisect_root([&](double s) { return psi(s, beta, aug); }, alpha, "psi(sigma) = alpha");
    return out;
}

namespace {

struct MapParts {
    Matrix normal;  // sum G w^T w
    Vector rhs;     // sum G w^T d
    Vector e;
    Vector g;
};

MapParts map_parts(const Vector& x, const AugmentedSystem& aug, double sigma) {
    if (x.size() != aug.state_dim()) throw DimensionMismatch("probe point has wrong length");
    MapParts p;
    p.e = aug.d - aug.w * x;
    p.g.resize(p.e.size());
    for (Eigen::Index h = 0; h < p.e.size(); ++h) p.g(h) = gaussian_kernel(p.e(h), sigma);
    p.normal = symmetrize(aug.w.transpose() * p.g.asDiagonal() * aug.w);
    p.rhs = aug.w.transpose() * p.g.cwiseProduct(aug.d);
    return p;
}

Vector solve_normal(const Matrix& normal, const Vector& rhs) {
    try {
        return spd_solve(normal, rhs);
    } catch (const DecompositionFailure& e) {
        throw SingularUpdate(std::string("kernel-weighted normal matrix is singular: ") + e.what());
    }
}

}  // namespace

Vector fixed_point_map(const Vector& x, const AugmentedSystem& aug, double sigma) {
    const MapParts p = map_parts(x, aug, sigma);
    return solve_normal(p.normal, p.rhs);
}

Matrix jacobian_f(const Vector& x, const AugmentedSystem& aug, double sigma) {
    const MapParts p = map_parts(x, aug, sigma);
    const auto n = aug.state_dim();
    Matrix l;
    try {
        l = cholesky(p.normal);
    } catch (const DecompositionFailure& e) {
        throw SingularUpdate(std::string("kernel-weighted normal matrix is singular: ") + e.what());
    }
    auto t_g = [&](const Vector& v) -> Vector { return solve_lower_transposed(l, solve_lower(l, v)); };
    const Vector f = t_g(p.rhs);
    const double inv_s2 = 1.0 / (sigma * sigma);

    Matrix jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        // sum_h e_h w_hj G_h w_h^T (w_h f - d_h)
        Vector acc = Vector::Zero(n);
        for (Eigen::Index h = 0; h < aug.size(); ++h) {
            const double c = p.e(h) * aug.w(h, j) * p.g(h);
            if (c == 0.0) continue;
            acc += c * aug.w.row(h).transpose() * (aug.w.row(h).dot(f) - aug.d(h));
        }
        jac.col(j) = -inv_s2 * t_g(acc);
    }
    return jac;
}

ConvergenceReport verify_contraction(const AugmentedSystem& aug, double sigma, double beta,
                                     std::size_t probes, std::optional<double> alpha,
                                     std::uint64_t seed) {
    check_positive(sigma, "sigma");
    check_positive(beta, "beta");
    if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");

    ConvergenceReport rep;
    rep.zeta = zeta_bound(aug);
    rep.beta = beta;
    rep.sigma = sigma;
    rep.probes = probes;
    if (alpha) rep.alpha = *alpha;
    if (!(beta > rep.zeta))
        throw PreconditionViolated("beta = " + std::to_string(beta) + " must exceed zeta = " +
                                   std::to_string(rep.zeta));

    const auto n = aug.state_dim();
    RandomStream rng(seed);
    Vector x(n);
    for (std::size_t k = 0; k < probes; ++k) {
        // Uniform on the l1 ball: normalized exponential spacings with random signs.
        double total = rng.exponential();
        for (Eigen::Index j = 0; j < n; ++j) {
            x(j) = rng.exponential();
            total += x(j);
        }
        for (Eigen::Index j = 0; j < n; ++j) x(j) *= (rng.uniform() < 0.5 ? -beta : beta) / total;
        rep.f_norm = std::max(rep.f_norm, l1_norm(fixed_point_map(x, aug, sigma)));
        rep.jacobian_norm = std::max(rep.jacobian_norm, one_norm(jacobian_f(x, aug, sigma)));
    }
    const double limit = alpha ? *alpha : 1.0;
    rep.satisfied = rep.f_norm <= beta && rep.jacobian_norm < 1.0 && rep.jacobian_norm <= limit;
    return rep;
}

ConvergenceReport convergence_report(const AugmentedSystem& aug, double beta, double alpha, double scale,
                                     std::size_t probes, std::uint64_t seed) {
    check_positive(scale, "scale");
    const SigmaThresholds th = solve_sigma_thresholds(beta, alpha, aug);
    const double sigma = scale * std::max(th.sigma_star, th.sigma_diamond);
    ConvergenceReport rep = verify_contraction(aug, sigma, beta, probes, alpha, seed);
    rep.sigma_star = th.sigma_star;
    rep.sigma_diamond = th.sigma_diamond;
    return rep;
}

}  // namespace dmckf
