#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridsentinel/metrics.hpp"
#include "gridsentinel/model.hpp"

namespace gridsentinel {

/// DT: max_depth {8,16,32} x min_samples_split {2,8}; SVM: C {1,10,100} x gamma {0.01,0.1,1};
/// KNN: k {1,3,5,7} x p {1,2}; ANN: hidden {[128,64],[64,32]} x lr {1e-3,3e-4}.
std::vector<ModelConfig> default_grid(ModelKind kind, std::uint64_t seed);

struct GridTrial {
    ModelConfig config;
    EvalReport inner;
};

struct GridSearchResult {
    ModelConfig best;
    std::size_t best_index = 0;
    std::vector<GridTrial> trials;
};

/// Scores every config on one seeded inner 80/20 split of the training rows; highest accuracy
/// wins, then macro F1, then grid order.
GridSearchResult grid_search(const Matrix& raw, const LabelVector& y, const std::vector<ModelConfig>& grid,
                             std::uint64_t seed);

struct ModelOutcome {
    ModelKind kind = ModelKind::DecisionTree;
    ModelConfig config;
    std::optional<TrainedModel> model;
    EvalReport report;
    double seconds = 0.0;
    std::vector<GridTrial> trials;
};

struct ComparisonRow {
    ModelKind kind;
    double accuracy, precision, recall, f1;
};

/// Index into `outcomes` of the winner: accuracy, then macro F1, then ANN > SVM > KNN > DT.
std::size_t select_best(const std::vector<ModelOutcome>& outcomes);

/// One row per outcome, ordered DT, SVM, KNN, ANN.
std::vector<ComparisonRow> comparison_table(const std::vector<ModelOutcome>& outcomes);

struct SelectionOptions {
    double train_fraction = 0.9;
    std::uint64_t seed = 42;
    std::vector<ModelKind> kinds = {ModelKind::DecisionTree, ModelKind::Svm, ModelKind::Knn, ModelKind::Ann};
    bool tune = true;  // grid search; otherwise the first grid entry is used
};

struct SelectionResult {
    SplitIndices split;
    std::vector<ModelOutcome> outcomes;
    std::size_t best = 0;
};

/// Split, tune, train on the full training portion and evaluate on the held-out rows.
SelectionResult run_selection(const Dataset& data, const SelectionOptions& opt);

nlohmann::json comparison_to_json(const SelectionResult& r);
std::string comparison_to_markdown(const std::vector<ComparisonRow>& rows, const std::string& title);

}  // namespace gridsentinel
