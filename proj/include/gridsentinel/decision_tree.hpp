#pragma once

#include <span>
#include <vector>

#include "gridsentinel/preprocess.hpp"

namespace gridsentinel {

/// 1 - sum p_j^2. Throws on an all-zero count vector.
double gini(std::span<const long> counts);

struct DtConfig {
    int max_depth = 16;
    int min_samples_split = 2;
    double min_impurity_decrease = 0.0;

    void validate() const;
    bool operator==(const DtConfig&) const = default;
};

struct DtNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;  // x[feature] <= threshold
    int right = -1;
    std::vector<long> counts;  // per entry of DecisionTree::classes

    bool is_leaf() const { return feature < 0; }
    bool operator==(const DtNode&) const = default;
};

struct DecisionTree {
    std::vector<int> classes;
    std::vector<DtNode> nodes;  // nodes[0] is the root

    int depth() const;
    const DtNode& leaf_for(std::span<const double> x) const;
    int predict(std::span<const double> x) const;
    bool operator==(const DecisionTree&) const = default;
};

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // gini(node) - (n_l gini_l + n_r gini_r) / n
};

/// Best split of `rows` over all features and midpoints between consecutive distinct values;
/// ties go to the lowest feature, then the lowest threshold. `cls` maps each row to a class index.
SplitChoice best_split(const Matrix& x, std::span<const int> cls, int n_classes, std::span<const std::size_t> rows);

DecisionTree train_decision_tree(const Matrix& x, const LabelVector& y, const DtConfig& cfg);

}  // namespace gridsentinel
