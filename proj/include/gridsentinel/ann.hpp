#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridsentinel/preprocess.hpp"

namespace gridsentinel {

struct AnnConfig {
    std::vector<int> hidden = {128, 64};
    double lr = 1e-3;
    int batch = 64;
    int epochs = 200;
    int patience = 10;
    std::uint64_t seed = 42;

    void validate() const;
    bool operator==(const AnnConfig&) const = default;
};

struct DenseLayer {
    Eigen::MatrixXd w;  // fan_in x fan_out
    Eigen::VectorXd b;

    bool operator==(const DenseLayer& o) const { return w == o.w && b == o.b; }
};

struct AnnModel {
    std::vector<int> classes;
    std::vector<DenseLayer> layers;  // ReLU after every layer but the last, softmax on the last

    std::size_t input_size() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().w.rows()); }
    std::size_t parameter_count() const;
    Matrix logits(const Matrix& x) const;
    Matrix probabilities(const Matrix& x) const;
    int predict(std::span<const double> x) const;
    LabelVector predict(const Matrix& x) const;
    bool operator==(const AnnModel&) const = default;
};

struct AnnTrainReport {
    int epochs_run = 0;
    int best_epoch = 0;  // 0 = the initial weights
    double initial_inner_loss = 0.0;
    double best_inner_loss = 0.0;
    std::vector<double> inner_loss;  // per epoch, entry 0 before any update
};

/// Uniform(-l, l) with l = sqrt(6 / fan_in) for hidden layers and sqrt(3 / fan_in) for the output.
AnnModel init_ann(std::size_t inputs, const std::vector<int>& hidden, std::vector<int> classes, std::uint64_t seed);

/// Row-wise softmax with the maximum subtracted first.
Matrix softmax(const Matrix& logits);

/// Mean cross-entropy of `targets` (indices into model.classes); fills the flat gradient when asked.
double ann_loss(const AnnModel& model, const Matrix& x, std::span<const int> targets, std::vector<double>* grad = nullptr);

/// Flat parameter view, layer by layer: w (column-major) then b.
std::vector<double> ann_parameters(const AnnModel& model);
void set_ann_parameters(AnnModel& model, std::span<const double> params);

/// Adam on mini-batches with early stopping on a stratified 10% inner slice (the whole set when
/// it is too small to slice); returns the weights of the best inner-validation loss.
AnnModel train_ann(const Matrix& x, const LabelVector& y, const AnnConfig& cfg, AnnTrainReport* report = nullptr);

}  // namespace gridsentinel
