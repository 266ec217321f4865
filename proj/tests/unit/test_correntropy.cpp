#include "dmckf/correntropy.hpp"
#include "dmckf/errors.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace dmckf;

TEST_CASE("gaussian_kernel closed forms") {
    CHECK(gaussian_kernel(0.0, 1.0) == 1.0);
    for (double s : {0.1, 1.0, 7.5}) CHECK(gaussian_kernel(s, s) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(gaussian_kernel(3.0, 2.0) == doctest::Approx(std::exp(-9.0 / 8.0)).epsilon(1e-15));
    CHECK(gaussian_kernel(-3.0, 2.0) == gaussian_kernel(3.0, 2.0));
    CHECK_THROWS_AS(gaussian_kernel(1.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(gaussian_kernel(1.0, -1.0), InvalidParameter);
}

TEST_CASE("sample_correntropy") {
    Vector a(4);
    a << 1.0, -2.0, 0.5, 3.0;
    CHECK(sample_correntropy(a, a, 0.3) == 1.0);

    Vector one(1), zero(1);
    one << 1.0;
    zero << 0.0;
    CHECK(sample_correntropy(one, zero, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector xs = testing::random_vector(rng, 5);
        const Vector ys = testing::random_vector(rng, 5);
        const double sigma = 0.5 + trial;
        double direct = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double e = xs(i) - ys(i);
            direct += std::exp(-e * e / (2.0 * sigma * sigma));
        }
        direct /= 5.0;
        CHECK(std::abs(sample_correntropy(xs, ys, sigma) - direct) < 1e-12);
    }

    CHECK_THROWS_AS(sample_correntropy(Vector(0), Vector(0), 1.0), InvalidParameter);
    CHECK_THROWS_AS(sample_correntropy(a, one, 1.0), InvalidParameter);
}

TEST_CASE("correntropy_taylor") {
    std::mt19937_64 rng(4);
    const Vector xs = testing::random_vector(rng, 6);
    const Vector ys = testing::random_vector(rng, 6);
    CHECK(correntropy_taylor(xs, ys, 0.7, 0) == 1.0);
    for (int order : {0, 3, 8}) CHECK(correntropy_taylor(xs, xs, 0.7, order) == 1.0);

    // Small errors: the truncated series converges to the direct estimate.
    for (int trial = 0; trial < 10; ++trial) {
        const double sigma = 0.5 + trial;
        std::uniform_real_distribution<double> u(-0.1 * sigma, 0.1 * sigma);
        Vector a(8), b = Vector::Zero(8);
        for (int i = 0; i < 8; ++i) a(i) = u(rng);
        CHECK(std::abs(correntropy_taylor(a, b, sigma, 8) - sample_correntropy(a, b, sigma)) < 1e-10);
    }

    // Term-by-term: order 2 is 1 - E[e^2]/(2 s^2) + E[e^4]/(8 s^4).
    const double s = 1.3;
    const Vector e = xs - ys;
    const double m2 = e.array().square().mean();
    const double m4 = e.array().pow(4).mean();
    CHECK(correntropy_taylor(xs, ys, s, 2) ==
          doctest::Approx(1.0 - m2 / (2 * s * s) + m4 / (8 * s * s * s * s)).epsilon(1e-13));
    CHECK_THROWS_AS(correntropy_taylor(xs, ys, s, -1), InvalidParameter);
}
