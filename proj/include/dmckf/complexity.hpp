#pragma once

namespace dmckf {

/// Operation counts per node and time step. add_mult counts additions,
/// subtractions and multiplications; special collects the cubic terms that
/// stand for inversions and Cholesky factorizations, each taken with a unit
/// constant. Counts are doubles because the iteration count may be an average.
struct ComplexityCount {
    double add_mult = 0.0;
    double special = 0.0;
};

/// Stationary DKF: 11n^3 + 12m^2 n + 10m n^2 + 4m^2 - 2mn - n^2 - 2n - m,
/// special 2m^3, with m the stacked measurement dimension.
ComplexityCount sdkf_flops(int n, int m);

/// DMCKF-DPD with average iteration count t >= 1:
///   6t m^3 + 6t n^3 + 16t m^2 n + 10t m n^2 + (2 - 3t) m^2 + 2n^2
///   + (2 - 3t) m n + (6t - 1) m + (6t - 1) n,
/// special t (n^3 + m^3).
ComplexityCount dmckf_flops(int n, int m, double t);

}  // namespace dmckf
