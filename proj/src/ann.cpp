#include "gridsentinel/ann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridsentinel/rng.hpp"

namespace gridsentinel {

void AnnConfig::validate() const {
    if (hidden.empty()) throw ValidationError("ANN needs at least one hidden layer");
    for (int h : hidden)
        if (h < 1) throw ValidationError("ANN hidden sizes must be positive");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("ANN learning rate must be positive");
    if (batch < 1) throw ValidationError("ANN batch size must be >= 1");
    if (epochs < 1) throw ValidationError("ANN epochs must be >= 1");
    if (patience < 1) throw ValidationError("ANN patience must be >= 1");
}

std::size_t AnnModel::parameter_count() const {
    std::size_t n = 0;
    for (const DenseLayer& l : layers) n += static_cast<std::size_t>(l.w.size() + l.b.size());
    return n;
}

namespace {

void check_input(const AnnModel& m, Eigen::Index cols) {
    if (m.layers.empty()) throw ValidationError("ANN has no layers");
    if (cols != m.layers.front().w.rows()) throw ValidationError("ANN: feature width mismatch");
}

struct Forward {
    std::vector<Matrix> act;  // act[0] = input, act[l + 1] = output of layer l (logits for the last)
};

Forward forward(const AnnModel& m, const Matrix& x) {
    Forward f;
    f.act.reserve(m.layers.size() + 1);
    f.act.push_back(x);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        Matrix z = f.act.back() * m.layers[l].w;
        z.rowwise() += m.layers[l].b.transpose();
        if (l + 1 < m.layers.size()) z = z.cwiseMax(0.0);
        f.act.push_back(std::move(z));
    }
    return f;
}

int argmax_row(const Matrix& z, Eigen::Index i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < z.cols(); ++c)
        if (z(i, c) > z(i, best)) best = c;
    return static_cast<int>(best);
}

}  // namespace

Matrix softmax(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        double s = 0.0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c) s += (p(i, c) = std::exp(logits(i, c) - m));
        p.row(i) /= s;
    }
    return p;
}

Matrix AnnModel::logits(const Matrix& x) const {
    check_input(*this, x.cols());
    return forward(*this, x).act.back();
}

Matrix AnnModel::probabilities(const Matrix& x) const { return softmax(logits(x)); }

int AnnModel::predict(std::span<const double> x) const {
    Matrix row(1, static_cast<Eigen::Index>(x.size()));
    std::copy(x.begin(), x.end(), row.data());
    return predict(row).front();
}

LabelVector AnnModel::predict(const Matrix& x) const {
    // Softmax is monotone, so the logit argmax (first maximum = lowest class) is the prediction.
    const Matrix z = logits(x);
    LabelVector out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) out[i] = classes[argmax_row(z, i)];
    return out;
}

AnnModel init_ann(std::size_t inputs, const std::vector<int>& hidden, std::vector<int> classes, std::uint64_t seed) {
    AnnModel m;
    m.classes = std::move(classes);
    Rng rng(seed);
    std::vector<int> sizes(hidden);
    sizes.push_back(static_cast<int>(m.classes.size()));
    Eigen::Index fan_in = static_cast<Eigen::Index>(inputs);
    for (std::size_t l = 0; l < sizes.size(); ++l) {
        const bool last = l + 1 == sizes.size();
        const double limit = std::sqrt((last ? 3.0 : 6.0) / static_cast<double>(fan_in));
        DenseLayer layer;
        layer.w.resize(fan_in, sizes[l]);
        for (Eigen::Index i = 0; i < fan_in; ++i)
            for (Eigen::Index j = 0; j < sizes[l]; ++j) layer.w(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
        layer.b = Eigen::VectorXd::Zero(sizes[l]);
        m.layers.push_back(std::move(layer));
        fan_in = sizes[l];
    }
    return m;
}

std::vector<double> ann_parameters(const AnnModel& model) {
    std::vector<double> p;
    p.reserve(model.parameter_count());
    for (const DenseLayer& l : model.layers) {
        p.insert(p.end(), l.w.data(), l.w.data() + l.w.size());
        p.insert(p.end(), l.b.data(), l.b.data() + l.b.size());
    }
    return p;
}

void set_ann_parameters(AnnModel& model, std::span<const double> params) {
    if (params.size() != model.parameter_count()) throw ValidationError("ANN parameter count mismatch");
    std::size_t k = 0;
    for (DenseLayer& l : model.layers) {
        std::copy_n(params.begin() + static_cast<long>(k), l.w.size(), l.w.data());
        k += static_cast<std::size_t>(l.w.size());
        std::copy_n(params.begin() + static_cast<long>(k), l.b.size(), l.b.data());
        k += static_cast<std::size_t>(l.b.size());
    }
}

double ann_loss(const AnnModel& model, const Matrix& x, std::span<const int> targets, std::vector<double>* grad) {
    check_input(model, x.cols());
    if (static_cast<std::size_t>(x.rows()) != targets.size() || targets.empty())
        throw ValidationError("ANN loss: row/target count mismatch");
    const Forward f = forward(model, x);
    const Matrix& z = f.act.back();
    const auto n = static_cast<double>(x.rows());
    double loss = 0.0;
    Matrix dz = softmax(z);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const int t = targets[i];
        if (t < 0 || t >= z.cols()) throw ValidationError("ANN loss: target out of range");
        const double m = z.row(i).maxCoeff();
        double s = 0.0;
        for (Eigen::Index c = 0; c < z.cols(); ++c) s += std::exp(z(i, c) - m);
        loss += m + std::log(s) - z(i, t);
        dz(i, t) -= 1.0;
    }
    loss /= n;
    if (!grad) return loss;

    dz /= n;
    std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> g(model.layers.size());
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        g[l].first = f.act[l].transpose() * dz;
        g[l].second = dz.colwise().sum().transpose();
        if (l == 0) break;
        Matrix dh = dz * model.layers[l].w.transpose();
        const Matrix& h = f.act[l];
        for (Eigen::Index i = 0; i < dh.rows(); ++i)
            for (Eigen::Index c = 0; c < dh.cols(); ++c)
                if (!(h(i, c) > 0.0)) dh(i, c) = 0.0;
        dz = std::move(dh);
    }
    grad->clear();
    grad->reserve(model.parameter_count());
    for (const auto& [gw, gb] : g) {
        grad->insert(grad->end(), gw.data(), gw.data() + gw.size());
        grad->insert(grad->end(), gb.data(), gb.data() + gb.size());
    }
    return loss;
}

AnnModel train_ann(const Matrix& x, const LabelVector& y, const AnnConfig& cfg, AnnTrainReport* report) {
    cfg.validate();
    if (x.rows() == 0) throw ValidationError("ANN: empty training set");
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ValidationError("ANN: row/label count mismatch");
    const std::vector<int> classes = distinct_labels(y);
    std::vector<int> target(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        target[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());

    // Inner slice for early stopping.
    std::vector<std::size_t> fit_rows, inner_rows;
    if (x.rows() >= 10) {
        try {
            SplitIndices s = split_indices(y, 0.9, derive_seed(cfg.seed, 1), true);
            fit_rows = std::move(s.train);
            inner_rows = std::move(s.validation);
        } catch (const ValidationError&) {
            SplitIndices s = split_indices(y, 0.9, derive_seed(cfg.seed, 1), false);
            fit_rows = std::move(s.train);
            inner_rows = std::move(s.validation);
        }
    }
    if (inner_rows.empty()) {
        fit_rows.resize(y.size());
        std::iota(fit_rows.begin(), fit_rows.end(), 0);
        inner_rows = fit_rows;
    }
    const Matrix inner_x = take_rows(x, inner_rows);
    std::vector<int> inner_t;
    for (std::size_t r : inner_rows) inner_t.push_back(target[r]);

    AnnModel model = init_ann(static_cast<std::size_t>(x.cols()), cfg.hidden, classes, derive_seed(cfg.seed, 0));
    std::vector<double> params = ann_parameters(model);
    std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0), grad;
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double b1t = 1.0, b2t = 1.0;

    AnnTrainReport rep;
    rep.initial_inner_loss = ann_loss(model, inner_x, inner_t);
    rep.best_inner_loss = rep.initial_inner_loss;
    rep.inner_loss.push_back(rep.initial_inner_loss);
    std::vector<double> best_params = params;
    int since_best = 0;

    Rng rng(derive_seed(cfg.seed, 2));
    std::vector<std::size_t> order = fit_rows;
    Matrix bx;
    std::vector<int> bt;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t len = std::min(static_cast<std::size_t>(cfg.batch), order.size() - start);
            const std::span<const std::size_t> rows(order.data() + start, len);
            bx = take_rows(x, rows);
            bt.clear();
            for (std::size_t r : rows) bt.push_back(target[r]);
            const double loss = ann_loss(model, bx, bt, &grad);
            if (!std::isfinite(loss)) throw NumericalError("ANN training diverged (non-finite loss)");
            b1t *= beta1;
            b2t *= beta2;
            for (std::size_t k = 0; k < params.size(); ++k) {
                m1[k] = beta1 * m1[k] + (1.0 - beta1) * grad[k];
                m2[k] = beta2 * m2[k] + (1.0 - beta2) * grad[k] * grad[k];
                const double mh = m1[k] / (1.0 - b1t), vh = m2[k] / (1.0 - b2t);
                params[k] -= cfg.lr * mh / (std::sqrt(vh) + eps);
            }
            set_ann_parameters(model, params);
        }
        const double inner = ann_loss(model, inner_x, inner_t);
        if (!std::isfinite(inner)) throw NumericalError("ANN training diverged (non-finite loss)");
        rep.inner_loss.push_back(inner);
        rep.epochs_run = epoch;
        if (inner < rep.best_inner_loss) {
            rep.best_inner_loss = inner;
            rep.best_epoch = epoch;
            best_params = params;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    set_ann_parameters(model, best_params);
    if (report) *report = std::move(rep);
    return model;
}

}  // namespace gridsentinel
