#include "dmckf/errors.hpp"
#include "dmckf/linalg.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace dmckf;
using testing::max_abs_diff;
using testing::random_matrix;
using testing::random_spd;
using testing::random_vector;

namespace {

// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
double jacobi_min_eigenvalue(Matrix a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    return a.diagonal().minCoeff();
}

}  // namespace

TEST_CASE("cholesky reconstructs random SPD matrices") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 12; ++n) {
        const Matrix a = random_spd(rng, n);
        const Matrix l = cholesky(a);
        CHECK(max_abs_diff(l * l.transpose(), a) < 1e-12 * a.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(l(i, i) > 0.0);
            for (Eigen::Index j = i + 1; j < n; ++j) CHECK(l(i, j) == 0.0);
        }
    }
}

TEST_CASE("cholesky of a diagonal matrix is the elementwise square root") {
    Matrix a = Matrix::Zero(3, 3);
    a.diagonal() << 4.0, 9.0, 0.25;
    const Matrix l = cholesky(a);
    CHECK(l(0, 0) == 2.0);
    CHECK(l(1, 1) == 3.0);
    CHECK(l(2, 2) == 0.5);
}

TEST_CASE("cholesky rejects indefinite, singular, asymmetric and non-square input") {
    Matrix indefinite(2, 2);
    indefinite << 1.0, 0.0, 0.0, -1.0;
    try {
        cholesky(indefinite);
        FAIL("expected DecompositionFailure");
    } catch (const DecompositionFailure& e) {
        CHECK(e.pivot() == 1);
    }

    Matrix singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(cholesky(singular), DecompositionFailure);

    Matrix asym(2, 2);
    asym << 2.0, 1.0, 0.0, 2.0;
    CHECK_THROWS_AS(cholesky(asym), InvalidParameter);
    CHECK_THROWS_AS(cholesky(Matrix::Identity(2, 3)), DimensionMismatch);

    Matrix tiny = Matrix::Identity(2, 2);
    tiny(1, 1) = 1e-16;
    CHECK_THROWS_AS(cholesky(tiny), DecompositionFailure);
}

TEST_CASE("one_norm small cases") {
    CHECK(one_norm(Matrix::Identity(4, 4)) == 1.0);
    Matrix a(2, 2);
    a << 1.0, -2.0, 3.0, 4.0;
    CHECK(one_norm(a) == 6.0);
}

TEST_CASE("one_norm and l1_norm match direct summation") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_matrix(rng, 1 + trial % 5, 1 + trial % 7);
        double best = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            double col = 0.0;
            for (Eigen::Index i = 0; i < a.rows(); ++i) col += std::abs(a(i, j));
            best = std::max(best, col);
        }
        CHECK(one_norm(a) == doctest::Approx(best).epsilon(1e-14));

        const Vector v = random_vector(rng, 1 + trial);
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) s += std::abs(v(i));
        CHECK(l1_norm(v) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("min_eigenvalue_sym agrees with a Jacobi eigenvalue oracle") {
    CHECK(min_eigenvalue_sym(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 2.0, 5.0;
    CHECK(min_eigenvalue_sym(d) == doctest::Approx(2.0));
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 8; ++n) {
        const Matrix g = random_matrix(rng, n, n);
        const Matrix a = 0.5 * (g + g.transpose());
        CHECK(min_eigenvalue_sym(a) == doctest::Approx(jacobi_min_eigenvalue(a)).epsilon(1e-10));
    }
    Matrix asym(2, 2);
    asym << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(min_eigenvalue_sym(asym), InvalidParameter);
}

TEST_CASE("triangular and SPD solves satisfy their equations") {
    std::mt19937_64 rng(8);
    for (int n = 1; n <= 9; ++n) {
        const Matrix a = random_spd(rng, n);
        const Matrix l = cholesky(a);
        const Vector b = random_vector(rng, n);
        CHECK(max_abs_diff(l * solve_lower(l, b), b) < 1e-10);
        CHECK(max_abs_diff(l.transpose() * solve_lower_transposed(l, b), b) < 1e-10);
        CHECK(max_abs_diff(a * spd_solve(a, b), b) < 1e-9);
        const Matrix bm = random_matrix(rng, n, 3);
        CHECK(max_abs_diff(a * spd_solve(a, bm), bm) < 1e-9);
    }
}

TEST_CASE("counted_multiply tallies rows * (2 cols - 1)") {
    std::mt19937_64 rng(9);
    FlopCounter counter;
    const Matrix a = random_matrix(rng, 4, 3);
    const Vector x = random_vector(rng, 3);
    const Vector y = counted_multiply(a, x, &counter);
    CHECK(max_abs_diff(y, a * x) < 1e-14);
    CHECK(counter.add_mult == 4u * 5u);

    counter.reset();
    const Vector b = random_vector(rng, 4);
    const Vector z = counted_multiply_add(a, x, b, &counter);
    CHECK(max_abs_diff(z, a * x + b) < 1e-14);
    CHECK(counter.add_mult == 4u * 6u);

    CHECK(counted_multiply(a, x, nullptr).size() == 4);
    CHECK(counted_multiply(Matrix(2, 0), Vector(0), &counter).isZero());
}

TEST_CASE("symmetrize averages with the transpose") {
    Matrix a(2, 2);
    a << 1.0, 2.0, 4.0, 3.0;
    const Matrix s = symmetrize(a);
    CHECK(s(0, 1) == 3.0);
    CHECK(s(1, 0) == 3.0);
}
