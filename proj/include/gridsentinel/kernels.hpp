#pragma once

#include <span>

#include "gridsentinel/preprocess.hpp"

namespace gridsentinel {

/// (sum |x_i - y_i|^p)^(1/p); p = 1 and p = 2 take exact fast paths.
double minkowski(std::span<const double> x, std::span<const double> y, double p);

/// D(i, j) = minkowski(a.row(i), b.row(j), p). Rows of `a` are distributed over OpenMP threads;
/// every entry is computed by the same scalar routine, so the result is thread-count independent.
Matrix pairwise_minkowski(const Matrix& a, const Matrix& b, double p);
Matrix pairwise_minkowski_serial(const Matrix& a, const Matrix& b, double p);

/// D(i, j) = |a_i - b_j|^2 via |a|^2 + |b|^2 - 2 a.b, clamped at 0. Work is cut into fixed
/// row blocks of `a`, so serial and parallel results are bit-identical.
Matrix pairwise_sq_euclidean(const Matrix& a, const Matrix& b);
Matrix pairwise_sq_euclidean_serial(const Matrix& a, const Matrix& b);

/// exp(-gamma * d) elementwise.
Matrix rbf_from_sq_distances(const Matrix& sq, double gamma);

inline constexpr Eigen::Index kKernelBlockRows = 64;

}  // namespace gridsentinel
