#include "dmckf/complexity.hpp"
#include "dmckf/errors.hpp"
#include "dmckf/filters.hpp"
#include "dmckf/network.hpp"
#include "dmckf/random.hpp"
#include "dmckf/system_model.hpp"
#include "test_support.hpp"

#include <vector>

using namespace dmckf;

namespace {

// Term-by-term sums of the per-operation rows.
double sdkf_terms(double n, double m) {
    const std::vector<double> terms = {
        11 * n * n * n, 12 * m * m * n, 10 * m * n * n, 4 * m * m, -2 * m * n, -n * n, -2 * n, -m,
    };
    double s = 0;
    for (double t : terms) s += t;
    return s;
}

double dmckf_terms(double n, double m, double t) {
    const std::vector<double> terms = {
        6 * t * m * m * m, 6 * t * n * n * n, 16 * t * m * m * n, 10 * t * m * n * n,
        2 * m * m,         -3 * t * m * m,    2 * n * n,          2 * m * n,
        -3 * t * m * n,    6 * t * m,         -m,                 6 * t * n,
        -n,
    };
    double s = 0;
    for (double v : terms) s += v;
    return s;
}

}  // namespace

TEST_CASE("stationary DKF count") {
    CHECK(sdkf_flops(3, 1).add_mult == sdkf_terms(3, 1));
    CHECK(sdkf_flops(3, 1).add_mult == 405);
    CHECK(sdkf_flops(3, 1).special == 2);
    for (int n = 1; n <= 6; ++n)
        for (int m = 1; m <= 6; ++m) {
            CHECK(sdkf_flops(n, m).add_mult == sdkf_terms(n, m));
            CHECK(sdkf_flops(n, m).special == 2.0 * m * m * m);
        }
    // Leading cubic term scales by 8 when n doubles.
    auto cubic = [](double n, double m) {
        return sdkf_flops(static_cast<int>(n), static_cast<int>(m)).add_mult -
               (12 * m * m * n + 10 * m * n * n + 4 * m * m - 2 * m * n - n * n - 2 * n - m);
    };
    CHECK(cubic(6, 2) == 8 * cubic(3, 2));
    CHECK(cubic(3, 2) == 11 * 27);
    CHECK_THROWS_AS(sdkf_flops(0, 1), InvalidParameter);
    CHECK_THROWS_AS(sdkf_flops(1, 0), InvalidParameter);
}

TEST_CASE("DMCKF-DPD count") {
    CHECK(dmckf_flops(3, 1, 2).add_mult == dmckf_terms(3, 1, 2));
    CHECK(dmckf_flops(3, 1, 2).add_mult == 658);
    CHECK(dmckf_flops(3, 1, 2).special == 56);
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m) {
            const double nn = n, mm = m;
            const double slope = 6 * mm * mm * mm + 6 * nn * nn * nn + 16 * mm * mm * nn + 10 * mm * nn * nn -
                                 3 * mm * mm - 3 * mm * nn + 6 * mm + 6 * nn;
            CHECK(dmckf_flops(n, m, 2).add_mult - dmckf_flops(n, m, 1).add_mult == slope);
        }
    CHECK_THROWS_AS(dmckf_flops(3, 1, 0), InvalidParameter);
    CHECK_THROWS_AS(dmckf_flops(3, 1, 0.5), InvalidParameter);
}

TEST_CASE("instrumented kernels reproduce the per-operation rows") {
    for (int nodes = 1; nodes <= 4; ++nodes) {
        const StateSpaceModel model = default_tracking_model(0.1, static_cast<std::size_t>(nodes));
        const Eigen::Index n = model.state_dim();
        FlopCounter counter;

        // State prediction: 2n^2 - n.
        predict(FilterState{Vector::Ones(n), Matrix::Identity(n, n)}, model.a, model.q, &counter);
        CHECK(counter.add_mult == static_cast<std::uint64_t>(2 * n * n - n));

        // Observation of one sensor: 2 n m.
        counter.reset();
        RandomStream rng(1);
        observe(model, 0, Vector::Ones(n), rng, &counter);
        CHECK(counter.add_mult == static_cast<std::uint64_t>(2 * n * model.measurement_dim(0)));

        // Drop matrix applied to the stacked observations: 2 m^2 - m.
        Topology t(static_cast<std::size_t>(nodes));
        for (int j = 1; j < nodes; ++j) t.add_edge(0, static_cast<std::size_t>(j));
        RandomStream drng(2);
        const DropModel dm(0.8);
        const DropRealization r = sample_drops(dm, t, 0, drng);
        std::vector<Vector> obs(static_cast<std::size_t>(nodes), Vector::Ones(1));
        counter.reset();
        const NeighborhoodStack st = stack_neighborhood(model, t, dm, 0, r, obs, &counter);
        const auto m = static_cast<std::uint64_t>(st.stacked_dim());
        CHECK(counter.add_mult == 2 * m * m - m);
    }
}
