#include "dmckf/correntropy.hpp"

#include "dmckf/errors.hpp"

#include <cmath>

namespace dmckf {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameter("kernel bandwidth must be positive, got " + std::to_string(sigma));
}

void check_pairs(const Vector& xs, const Vector& ys) {
    if (xs.size() == 0) throw InvalidParameter("correntropy: empty sample");
    if (xs.size() != ys.size())
        throw InvalidParameter("correntropy: sample lengths differ (" + std::to_string(xs.size()) +
                               " vs " + std::to_string(ys.size()) + ")");
}

}  // namespace

double gaussian_kernel(double e, double sigma) {
    check_sigma(sigma);
    return std::exp(-(e * e) / (2.0 * sigma * sigma));
}

double sample_correntropy(const Vector& xs, const Vector& ys, double sigma) {
    check_sigma(sigma);
    check_pairs(xs, ys);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) acc += gaussian_kernel(xs(i) - ys(i), sigma);
    return acc / static_cast<double>(xs.size());
}

double correntropy_taylor(const Vector& xs, const Vector& ys, double sigma, int order) {
    check_sigma(sigma);
    check_pairs(xs, ys);
    if (order < 0) throw InvalidParameter("correntropy_taylor: order must be non-negative");

    const Vector sq = (xs - ys).array().square().matrix();
    const double scale = 2.0 * sigma * sigma;
    Vector power = Vector::Ones(xs.size());  // (x - y)^{2n}
    double coeff = 1.0;                      // (-1)^n / (scale^n n!)
    double total = 0.0;
    for (int n = 0; n <= order; ++n) {
        if (n > 0) {
            power = power.cwiseProduct(sq);
            coeff *= -1.0 / (scale * n);
        }
        total += coeff * power.mean();
    }
    return total;
}

}  // namespace dmckf
