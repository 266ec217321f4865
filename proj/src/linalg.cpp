#include "dmckf/linalg.hpp"

#include "dmckf/errors.hpp"

#include <cmath>
#include <string>

namespace dmckf {

namespace {

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_symmetric(const Matrix& a, double tol) {
    const double scale = std::max(1.0, max_abs(a));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol * scale) return false;
    return true;
}

}  // namespace

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionMismatch("cholesky: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected square");
    if (!a.allFinite()) throw InvalidParameter("cholesky: non-finite entry");
    if (!is_symmetric(a, 1e-12)) throw InvalidParameter("cholesky: matrix is not symmetric");

    const Eigen::Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot >= kCholeskyPivotFloor))
            throw DecompositionFailure(
                "cholesky: non-positive pivot " + std::to_string(pivot) + " at index " +
                    std::to_string(j),
                static_cast<long>(j));
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / d;
        }
    }
    return l;
}

double one_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

double l1_norm(const Vector& v) { return v.cwiseAbs().sum(); }

double min_eigenvalue_sym(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("min_eigenvalue_sym: matrix is not square");
    if (a.rows() == 0) throw InvalidParameter("min_eigenvalue_sym: empty matrix");
    if (!is_symmetric(a, 1e-10)) throw InvalidParameter("min_eigenvalue_sym: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix solve_lower(const Matrix& lower, const Matrix& rhs) {
    return lower.triangularView<Eigen::Lower>().solve(rhs);
}

Vector solve_lower(const Matrix& lower, const Vector& rhs) {
    return lower.triangularView<Eigen::Lower>().solve(rhs);
}

Matrix solve_lower_transposed(const Matrix& lower, const Matrix& rhs) {
    return lower.transpose().triangularView<Eigen::Upper>().solve(rhs);
}

Vector solve_lower_transposed(const Matrix& lower, const Vector& rhs) {
    return lower.transpose().triangularView<Eigen::Upper>().solve(rhs);
}

Matrix spd_solve(const Matrix& a, const Matrix& rhs) {
    const Matrix l = cholesky(a);
    return solve_lower_transposed(l, solve_lower(l, rhs));
}

Vector spd_solve(const Matrix& a, const Vector& rhs) {
    const Matrix l = cholesky(a);
    return solve_lower_transposed(l, solve_lower(l, rhs));
}

Vector counted_multiply(const Matrix& a, const Vector& x, FlopCounter* counter) {
    if (a.cols() != x.size()) throw DimensionMismatch("counted_multiply: inner dimensions differ");
    Vector y = Vector::Zero(a.rows());
    if (a.cols() == 0) return y;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double acc = a(i, 0) * x(0);
        for (Eigen::Index j = 1; j < a.cols(); ++j) acc += a(i, j) * x(j);
        y(i) = acc;
    }
    if (counter != nullptr && a.cols() > 0)
        counter->add_mult += static_cast<std::uint64_t>(a.rows() * (2 * a.cols() - 1));
    return y;
}

Vector counted_multiply_add(const Matrix& a, const Vector& x, const Vector& b,
                            FlopCounter* counter) {
    if (b.size() != a.rows()) throw DimensionMismatch("counted_multiply_add: offset length differs");
    Vector y = counted_multiply(a, x, counter) + b;
    if (counter != nullptr) counter->add_mult += static_cast<std::uint64_t>(a.rows());
    return y;
}

}  // namespace dmckf
