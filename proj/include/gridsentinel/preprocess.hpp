#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridsentinel/dataset.hpp"

namespace gridsentinel {

/// Row-major so that one sample is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using LabelVector = std::vector<int>;

Matrix feature_matrix(const Dataset& data);
Matrix take_rows(const Matrix& x, std::span<const std::size_t> rows);
LabelVector take(const LabelVector& y, std::span<const std::size_t> rows);

/// Sorted distinct labels.
std::vector<int> distinct_labels(const LabelVector& y);

inline constexpr double kStdFloor = 1e-12;

/// Per-feature standardization fitted on a training split (population standard deviation).
struct Scaler {
    std::vector<double> mean;
    std::vector<double> std;

    static Scaler fit(const Matrix& x);
    std::size_t size() const { return mean.size(); }
    Matrix apply(const Matrix& x) const;
    void apply_inplace(std::span<double> row) const;
    bool operator==(const Scaler&) const = default;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Seeded shuffle split. Stratified: the training total is floor(n * fraction); each class
/// gets floor(n_c * fraction) plus at most one of the leftover slots (largest fractional
/// part first, seeded order among equals). Both index lists are returned ascending.
SplitIndices split_indices(const LabelVector& y, double train_fraction, std::uint64_t seed, bool stratified = true);

}  // namespace gridsentinel
