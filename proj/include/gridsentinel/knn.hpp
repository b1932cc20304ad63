#pragma once

#include <span>
#include <vector>

#include "gridsentinel/preprocess.hpp"

namespace gridsentinel {

struct KnnConfig {
    int k = 5;
    double p = 2.0;

    void validate() const;
    bool operator==(const KnnConfig&) const = default;
};

struct KnnModel {
    KnnConfig cfg;
    Matrix train;  // standardized training rows
    LabelVector labels;

    std::size_t size() const { return labels.size(); }
    int predict(std::span<const double> x) const;
    LabelVector predict(const Matrix& x) const;         // OpenMP over queries
    LabelVector predict_serial(const Matrix& x) const;  // reference
    bool operator==(const KnnModel&) const = default;
};

KnnModel train_knn(const Matrix& x, const LabelVector& y, const KnnConfig& cfg);

/// Majority label among the k nearest (distance, then lower training index, decides who is
/// nearest); ties go to the smaller summed distance, then the lowest class id.
int knn_vote(std::span<const double> distances, const LabelVector& labels, int k);

}  // namespace gridsentinel
