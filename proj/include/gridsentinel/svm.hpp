#pragma once

#include <span>
#include <vector>

#include "gridsentinel/preprocess.hpp"

namespace gridsentinel {

struct SvmConfig {
    double C = 10.0;
    double gamma = 0.1;
    double tol = 1e-3;
    int max_passes = 1000;  // iteration cap = max_passes * machine size

    void validate() const;
    bool operator==(const SvmConfig&) const = default;
};

struct SmoStats {
    long iterations = 0;
    double kkt_gap = 0.0;          // max violating-pair gap at exit
    double min_ascent = 0.0;       // smallest dual objective change over accepted steps
    double max_step_drift = 0.0;   // largest |change of sum(alpha y)| caused by a single step
    double dual_objective = 0.0;
    bool converged = false;

    bool operator==(const SmoStats&) const = default;
};

struct BinarySvmSolution {
    std::vector<double> alpha;
    double bias = 0.0;  // decision f(x) = sum alpha_i y_i K(x_i, x) + bias
    SmoStats stats;
};

class SvmNotConverged : public NumericalError {
public:
    SvmNotConverged(const std::string& what, double gap) : NumericalError(what), gap_(gap) {}
    double kkt_gap() const { return gap_; }

private:
    double gap_;
};

/// Soft-margin dual by SMO with second-order working-set selection. `gram` is the kernel over
/// all training rows; the machine uses `rows` with labels `y` in {+1, -1}.
BinarySvmSolution smo_solve(const Matrix& gram, std::span<const std::size_t> rows, std::span<const int> y, double C,
                            double tol, long max_iter);

/// Largest per-sample KKT violation of (alpha, bias), recomputed from scratch.
double kkt_violation(const Matrix& gram, std::span<const std::size_t> rows, std::span<const int> y,
                     std::span<const double> alpha, double bias, double C);

struct SvmMachine {
    int positive = 0;  // class label voted for when the decision value is > 0
    int negative = 0;
    std::vector<int> sv;       // indices into SvmModel::support
    std::vector<double> coef;  // alpha_i * y_i
    double bias = 0.0;
    SmoStats stats;

    bool operator==(const SvmMachine&) const = default;
};

struct SvmModel {
    double gamma = 0.1;
    double C = 10.0;
    std::vector<int> classes;
    Matrix support;  // standardized support vectors shared by all machines
    std::vector<SvmMachine> machines;

    /// Rows = samples, columns = machines.
    Matrix decision_values(const Matrix& x) const;
    int predict(std::span<const double> x) const;
    LabelVector predict(const Matrix& x) const;
    LabelVector predict_serial(const Matrix& x) const;
    bool operator==(const SvmModel& o) const {
        return gamma == o.gamma && C == o.C && classes == o.classes && support == o.support && machines == o.machines;
    }
};

/// One-vs-one over every pair of classes present in `y`.
SvmModel train_svm(const Matrix& x, const LabelVector& y, const SvmConfig& cfg);

/// Same, reusing precomputed pairwise squared distances of the training rows.
SvmModel train_svm_from_distances(const Matrix& x, const LabelVector& y, const Matrix& sq_dist, const SvmConfig& cfg,
                                  std::vector<std::size_t>* support_rows = nullptr);

/// Prediction from precomputed squared distances to every training row; `support_rows` are
/// the training rows behind model.support, as reported by train_svm_from_distances.
LabelVector predict_from_train_distances(const SvmModel& model, const Matrix& sq_to_train,
                                        std::span<const std::size_t> support_rows);

/// Vote with ties broken by summed decision values, then the lowest class id.
int ovo_vote(const std::vector<int>& classes, const std::vector<SvmMachine>& machines, std::span<const double> dec);

}  // namespace gridsentinel
