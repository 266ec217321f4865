#include "dmckf/complexity.hpp"

#include "dmckf/errors.hpp"

#include <cmath>

namespace dmckf {

namespace {

void check_dims(int n, int m) {
    if (n < 1) throw InvalidParameter("state dimension must be at least 1");
    if (m < 1) throw InvalidParameter("stacked measurement dimension must be at least 1");
}

}  // namespace

ComplexityCount sdkf_flops(int n, int m) {
    check_dims(n, m);
    const double N = n, M = m;
    ComplexityCount c;
    c.add_mult = 11 * N * N * N + 12 * M * M * N + 10 * M * N * N + 4 * M * M - 2 * M * N - N * N -
                 2 * N - M;
    c.special = 2 * M * M * M;
    return c;
}

ComplexityCount dmckf_flops(int n, int m, double t) {
    check_dims(n, m);
    if (!(t >= 1.0) || !std::isfinite(t)) throw InvalidParameter("average iteration count must be at least 1");
    const double N = n, M = m;
    ComplexityCount c;
    c.add_mult = 6 * t * M * M * M + 6 * t * N * N * N + 16 * t * M * M * N + 10 * t * M * N * N +
                 (2 - 3 * t) * M * M + 2 * N * N + (2 - 3 * t) * M * N + (6 * t - 1) * M +
                 (6 * t - 1) * N;
    c.special = t * (N * N * N + M * M * M);
    return c;
}

}  // namespace dmckf
