#include "dmckf/errors.hpp"
#include "dmckf/random.hpp"
#include "dmckf/system_model.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace dmckf;

namespace {

double sample_variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size() - 1);
}

StateSpaceModel noiseless(StateSpaceModel m) {
    const GaussianMixture zero = GaussianMixture::gaussian(0.0);
    m.process_noise.assign(m.process_noise.size(), zero);
    m.measurement_noise.assign(m.measurement_noise.size(), zero);
    m.make_moment_matched();
    return m;
}

}  // namespace

TEST_CASE("sample_mixture variances") {
    RandomStream rng(17);
    const GaussianMixture narrow = GaussianMixture::gaussian(0.01);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_mixture(narrow, rng);
    const double v = sample_variance(xs);
    CHECK(v >= 0.0095);
    CHECK(v <= 0.0105);

    const GaussianMixture impulsive{{{0.9, 0.0, 0.01}, {0.1, 0.0, 100.0}}};
    CHECK(impulsive.variance() == doctest::Approx(10.009).epsilon(1e-14));
    std::vector<double> ys(1000000);
    for (auto& y : ys) y = sample_mixture(impulsive, rng);
    CHECK(std::abs(sample_variance(ys) - 10.009) <= 0.05 * 10.009);
}

TEST_CASE("mixture total variance includes the spread of the means") {
    const GaussianMixture m{{{0.5, -1.0, 0.25}, {0.5, 1.0, 0.25}}};
    CHECK(m.mean() == doctest::Approx(0.0));
    CHECK(m.variance() == doctest::Approx(1.25));
}

TEST_CASE("degenerate component returns its mean") {
    RandomStream rng(2);
    const GaussianMixture point = GaussianMixture::gaussian(0.0, 3.5);
    for (int i = 0; i < 100; ++i) CHECK(sample_mixture(point, rng) == 3.5);
}

TEST_CASE("mixture validation") {
    CHECK_THROWS_AS((GaussianMixture{{{0.5, 0.0, 1.0}}}.validate()), InvalidParameter);
    CHECK_THROWS_AS((GaussianMixture{{{1.0, 0.0, -1.0}}}.validate()), InvalidParameter);
    CHECK_THROWS_AS((GaussianMixture{}.validate()), InvalidParameter);
    CHECK_NOTHROW((GaussianMixture{{{0.9, 0.0, 0.01}, {0.1, 0.0, 1.0}}}.validate()));
}

TEST_CASE("default tracking model") {
    const StateSpaceModel m = default_tracking_model(0.1);
    CHECK(m.node_count() == 20);
    CHECK(m.a(0, 0) == 1.0);
    CHECK(m.a(0, 1) == doctest::Approx(0.1));
    CHECK(m.a(0, 2) == doctest::Approx(0.005));
    CHECK(m.a(1, 2) == doctest::Approx(0.1));
    CHECK(m.a(2, 2) == 1.0);
    for (const auto& c : m.c) {
        REQUIRE(c.rows() == 1);
        CHECK(c(0, 0) == 0.0);
        CHECK(c(0, 1) == 1.0);
        CHECK(c(0, 2) == 0.0);
    }
    CHECK(m.q(0, 0) == doctest::Approx(0.109));
    CHECK(m.q(0, 1) == 0.0);
    CHECK(m.r[0](0, 0) == doctest::Approx(10.009));
    CHECK_NOTHROW(m.validate());

    const StateSpaceModel still = default_tracking_model(0.0, 3);
    CHECK(still.a.isIdentity());
}

TEST_CASE("model validation rejects rank-deficient observation rows") {
    StateSpaceModel m = default_tracking_model(0.1, 2);
    m.c[1] = Matrix::Zero(2, 3);
    m.measurement_noise[1] = GaussianMixture::gaussian(1.0);
    m.make_moment_matched();
    CHECK_THROWS_AS(m.validate(), InvalidParameter);
}

TEST_CASE("noiseless trajectories follow the deterministic recursion") {
    StateSpaceModel still = noiseless(default_tracking_model(0.0, 2));
    Vector x0(3);
    x0 << 1.0, -2.0, 0.5;
    const Trajectory t = simulate_truth(still, x0, 10, RandomStream(1));
    REQUIRE(t.states.size() == 10);
    for (const auto& x : t.states) CHECK(x == x0);

    StateSpaceModel moving = noiseless(default_tracking_model(0.1, 2));
    Vector start(3);
    start << 0.0, 0.0, 1.0;
    const Trajectory u = simulate_truth(moving, start, 3, RandomStream(1));
    CHECK(u.states[0](0) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(u.states[0](1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(u.states[0](2) == 1.0);
    CHECK(u.observations[1][0](0) == u.states[0](1));
}

TEST_CASE("trajectory satisfies the recursion for its sampled noise and is reproducible") {
    const StateSpaceModel m = default_tracking_model(0.1, 4);
    Vector x0(3);
    x0 << 0.0, 0.0, 1.0;
    const Trajectory a = simulate_truth(m, x0, 50, RandomStream(99));
    const Trajectory b = simulate_truth(m, x0, 50, RandomStream(99));
    Vector prev = x0;
    for (std::size_t k = 0; k < 50; ++k) {
        CHECK(a.states[k] == m.a * prev + a.process_noise[k]);
        CHECK(a.states[k] == b.states[k]);
        for (std::size_t i = 0; i < 4; ++i) CHECK(a.observations[i][k] == b.observations[i][k]);
        prev = a.states[k];
    }
    const Trajectory c = simulate_truth(m, x0, 50, RandomStream(100));
    CHECK(c.states[49] != a.states[49]);
    CHECK_THROWS_AS(simulate_truth(m, x0, 0, RandomStream(1)), InvalidParameter);
    CHECK_THROWS_AS(simulate_truth(m, Vector::Zero(2), 5, RandomStream(1)), DimensionMismatch);
}

TEST_CASE("Gaussian process noise has the configured covariance") {
    StateSpaceModel m = default_tracking_model(0.1, 1);
    m.process_noise.assign(3, GaussianMixture::gaussian(0.04));
    m.make_moment_matched();
    const Trajectory t = simulate_truth(m, Vector::Zero(3), 100000, RandomStream(5));
    Matrix cov = Matrix::Zero(3, 3);
    for (const auto& w : t.process_noise) cov += w * w.transpose();
    cov /= static_cast<double>(t.process_noise.size());
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(cov(i, i) - 0.04) <= 0.05 * 0.04);
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(cov(i, j)) < 0.05 * 0.04);
    }
}

TEST_CASE("random streams: identical paths agree, split children differ") {
    RandomStream a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
    RandomStream c = RandomStream(7).split(1), d = RandomStream(7).split(2);
    RandomStream e = RandomStream(7).split({1, 3}), f = RandomStream(7).split(1).split(3);
    CHECK(c.uniform() != d.uniform());
    CHECK(e.uniform() == f.uniform());
}
