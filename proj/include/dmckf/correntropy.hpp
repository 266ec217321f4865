#pragma once

#include "dmckf/linalg.hpp"

namespace dmckf {

/// exp(-e^2 / (2 sigma^2)); sigma must be positive.
double gaussian_kernel(double e, double sigma);

/// Mean kernel value over paired samples. Inputs must be non-empty and of
/// equal length.
double sample_correntropy(const Vector& xs, const Vector& ys, double sigma);

/// Truncated even-moment series of the sample correntropy,
///   sum_{n=0}^{order} (-1)^n / (2^n sigma^{2n} n!) * mean((x - y)^{2n}).
/// Truncation is only accurate when every |x_i - y_i| is well below sigma;
/// that is not checked.
double correntropy_taylor(const Vector& xs, const Vector& ys, double sigma, int order);

}  // namespace dmckf
