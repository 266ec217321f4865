#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace dmckf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Lower-triangular Cholesky factor L with L * L^T == a.
///
/// The input must be square and symmetric to within 1e-12 (relative to its
/// largest entry). A pivot below 1e-14 raises DecompositionFailure carrying
/// the zero-based pivot index; pivots are never clamped.
Matrix cholesky(const Matrix& a);

inline constexpr double kCholeskyPivotFloor = 1e-14;

/// Maximum absolute column sum.
double one_norm(const Matrix& a);

/// Sum of absolute entries.
double l1_norm(const Vector& v);

/// Smallest eigenvalue of a symmetric matrix (symmetry checked to 1e-10).
double min_eigenvalue_sym(const Matrix& a);

Matrix symmetrize(const Matrix& a);

// Triangular solves against a lower factor L.
Matrix solve_lower(const Matrix& lower, const Matrix& rhs);
Vector solve_lower(const Matrix& lower, const Vector& rhs);
Matrix solve_lower_transposed(const Matrix& lower, const Matrix& rhs);
Vector solve_lower_transposed(const Matrix& lower, const Vector& rhs);

// Solve a * x = rhs for SPD a through its Cholesky factor.
Matrix spd_solve(const Matrix& a, const Matrix& rhs);
Vector spd_solve(const Matrix& a, const Vector& rhs);

/// Addition/multiplication tally for instrumented kernels.
struct FlopCounter {
    std::uint64_t add_mult = 0;
    void reset() { add_mult = 0; }
};

/// y = a * x, tallying rows*cols multiplications and rows*(cols-1) additions.
Vector counted_multiply(const Matrix& a, const Vector& x, FlopCounter* counter);

/// y = a * x + b, as counted_multiply plus rows additions.
Vector counted_multiply_add(const Matrix& a, const Vector& x, const Vector& b,
                            FlopCounter* counter);

}  // namespace dmckf
