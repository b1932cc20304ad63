#include "gridsentinel/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

#include "gridsentinel/kernels.hpp"
#include "gridsentinel/rng.hpp"

namespace gridsentinel {

using nlohmann::json;

std::vector<ModelConfig> default_grid(ModelKind kind, std::uint64_t seed) {
    std::vector<ModelConfig> grid;
    switch (kind) {
        case ModelKind::DecisionTree:
            for (int depth : {8, 16, 32})
                for (int split : {2, 8}) grid.push_back(DtConfig{depth, split, 0.0});
            break;
        case ModelKind::Svm:
            for (double c : {1.0, 10.0, 100.0})
                for (double g : {0.01, 0.1, 1.0}) {
                    SvmConfig cfg;
                    cfg.C = c;
                    cfg.gamma = g;
                    grid.push_back(cfg);
                }
            break;
        case ModelKind::Knn:
            for (int k : {1, 3, 5, 7})
                for (double p : {1.0, 2.0}) grid.push_back(KnnConfig{k, p});
            break;
        case ModelKind::Ann:
            for (const std::vector<int>& h : {std::vector<int>{128, 64}, std::vector<int>{64, 32}})
                for (double lr : {1e-3, 3e-4}) {
                    AnnConfig cfg;
                    cfg.hidden = h;
                    cfg.lr = lr;
                    cfg.seed = seed;
                    grid.push_back(cfg);
                }
            break;
    }
    return grid;
}

namespace {

SplitIndices inner_split(const LabelVector& y, std::uint64_t seed) {
    const std::uint64_t s = derive_seed(seed, 0x696e6e6572ULL);
    try {
        return split_indices(y, 0.8, s, true);
    } catch (const ValidationError&) {
        return split_indices(y, 0.8, s, false);  // some class is too small to stratify
    }
}

bool better(const EvalReport& a, const EvalReport& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.f1 > b.f1;
}

LabelVector predict_params(const ModelParameters& p, const Matrix& x) {
    return std::visit(
        [&](const auto& m) -> LabelVector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                LabelVector out(static_cast<std::size_t>(x.rows()));
                for (Eigen::Index i = 0; i < x.rows(); ++i)
                    out[i] = m.predict({x.row(i).data(), static_cast<std::size_t>(x.cols())});
                return out;
            } else {
                return m.predict(x);
            }
        },
        p);
}

}  // namespace

GridSearchResult grid_search(const Matrix& raw, const LabelVector& y, const std::vector<ModelConfig>& grid,
                             std::uint64_t seed) {
    if (grid.empty()) throw ValidationError("grid search needs at least one configuration");
    const ModelKind kind = kind_of(grid.front());
    for (const ModelConfig& c : grid)
        if (kind_of(c) != kind) throw ValidationError("grid mixes model kinds");

    const SplitIndices s = inner_split(y, seed);
    const Matrix raw_fit = take_rows(raw, s.train);
    const LabelVector y_fit = take(y, s.train), y_val = take(y, s.validation);
    const Scaler scaler = Scaler::fit(raw_fit);
    const Matrix x_fit = scaler.apply(raw_fit);
    const Matrix x_val = scaler.apply(take_rows(raw, s.validation));

    // Distances shared across configurations.
    std::optional<Matrix> sq_fit, sq_val;
    std::map<double, Matrix> knn_dist;

    GridSearchResult out;
    for (const ModelConfig& cfg : grid) {
        LabelVector pred;
        switch (kind) {
            case ModelKind::DecisionTree:
                pred = predict_params(train_decision_tree(x_fit, y_fit, std::get<DtConfig>(cfg)), x_val);
                break;
            case ModelKind::Svm:
            {
                if (!sq_fit) {
                    sq_fit = pairwise_sq_euclidean(x_fit, x_fit);
                    sq_val = pairwise_sq_euclidean(x_val, x_fit);
                }
                std::vector<std::size_t> sv_rows;
                const SvmModel m = train_svm_from_distances(x_fit, y_fit, *sq_fit, std::get<SvmConfig>(cfg), &sv_rows);
                pred = predict_from_train_distances(m, *sq_val, sv_rows);
                break;
            }
            case ModelKind::Knn: {
                const KnnConfig& k = std::get<KnnConfig>(cfg);
                const KnnModel model = train_knn(x_fit, y_fit, k);
                auto it = knn_dist.find(k.p);
                if (it == knn_dist.end()) it = knn_dist.emplace(k.p, pairwise_minkowski(x_val, x_fit, k.p)).first;
                pred.resize(y_val.size());
                for (Eigen::Index i = 0; i < it->second.rows(); ++i)
                    pred[i] = knn_vote({it->second.row(i).data(), static_cast<std::size_t>(it->second.cols())},
                                       model.labels, k.k);
                break;
            }
            case ModelKind::Ann: pred = train_ann(x_fit, y_fit, std::get<AnnConfig>(cfg)).predict(x_val); break;
        }
        out.trials.push_back({cfg, evaluate(y_val, pred)});
        if (out.trials.size() == 1 || better(out.trials.back().inner, out.trials[out.best_index].inner))
            out.best_index = out.trials.size() - 1;
    }
    out.best = out.trials[out.best_index].config;
    return out;
}

namespace {

int tie_rank(ModelKind k) {
    switch (k) {
        case ModelKind::Ann: return 0;
        case ModelKind::Svm: return 1;
        case ModelKind::Knn: return 2;
        case ModelKind::DecisionTree: return 3;
    }
    return 4;
}

}  // namespace

std::size_t select_best(const std::vector<ModelOutcome>& outcomes) {
    if (outcomes.empty()) throw ValidationError("no models to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < outcomes.size(); ++i) {
        const EvalReport &a = outcomes[i].report, &b = outcomes[best].report;
        if (a.accuracy != b.accuracy) {
            if (a.accuracy > b.accuracy) best = i;
        } else if (a.f1 != b.f1) {
            if (a.f1 > b.f1) best = i;
        } else if (tie_rank(outcomes[i].kind) < tie_rank(outcomes[best].kind)) {
            best = i;
        }
    }
    return best;
}

std::vector<ComparisonRow> comparison_table(const std::vector<ModelOutcome>& outcomes) {
    std::vector<ComparisonRow> rows;
    for (ModelKind k : kAllModelKinds)
        for (const ModelOutcome& o : outcomes)
            if (o.kind == k)
                rows.push_back({k, o.report.accuracy, o.report.precision, o.report.recall, o.report.f1});
    return rows;
}

SelectionResult run_selection(const Dataset& data, const SelectionOptions& opt) {
    if (data.samples.empty()) throw ValidationError("dataset is empty");
    if (opt.kinds.empty()) throw ValidationError("no model kinds requested");
    const Matrix raw = feature_matrix(data);
    const LabelVector y = data.labels();
    const std::string hash = schema_hash(data.schema);

    SelectionResult r;
    r.split = split_indices(y, opt.train_fraction, opt.seed, true);
    const Matrix raw_train = take_rows(raw, r.split.train), raw_val = take_rows(raw, r.split.validation);
    const LabelVector y_train = take(y, r.split.train), y_val = take(y, r.split.validation);

    for (ModelKind kind : opt.kinds) {
        const auto t0 = std::chrono::steady_clock::now();
        ModelOutcome o;
        o.kind = kind;
        const std::vector<ModelConfig> grid = default_grid(kind, opt.seed);
        if (opt.tune) {
            GridSearchResult g = grid_search(raw_train, y_train, grid, opt.seed);
            o.config = g.best;
            o.trials = std::move(g.trials);
        } else {
            o.config = grid.front();
        }
        json meta = {{"seed", opt.seed},
                     {"train_fraction", opt.train_fraction},
                     {"campaign", to_string(data.meta.campaign)},
                     {"dataset_seed", data.meta.master_seed}};
        o.model = train_model(raw_train, y_train, hash, o.config, meta);
        o.report = evaluate(y_val, o.model->predict(raw_val, hash));
        o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.outcomes.push_back(std::move(o));
    }
    r.best = select_best(r.outcomes);
    return r;
}

json comparison_to_json(const SelectionResult& r) {
    json rows = json::array();
    for (const ComparisonRow& c : comparison_table(r.outcomes))
        rows.push_back({{"model", to_string(c.kind)},
                        {"accuracy", c.accuracy},
                        {"precision", c.precision},
                        {"recall", c.recall},
                        {"f1", c.f1}});
    json models = json::array();
    for (const ModelOutcome& o : r.outcomes) {
        json trials = json::array();
        for (const GridTrial& t : o.trials)
            trials.push_back({{"config", config_to_json(t.config)}, {"accuracy", t.inner.accuracy}, {"f1", t.inner.f1}});
        models.push_back({{"model", to_string(o.kind)},
                          {"config", config_to_json(o.config)},
                          {"report", report_to_json(o.report)},
                          {"grid", trials},
                          {"seconds", o.seconds}});
    }
    return {{"best", to_string(r.outcomes.at(r.best).kind)},
            {"train_size", r.split.train.size()},
            {"validation_size", r.split.validation.size()},
            {"table", rows},
            {"models", models}};
}

std::string comparison_to_markdown(const std::vector<ComparisonRow>& rows, const std::string& title) {
    std::string out = "## " + title + "\n\n| Model | Accuracy | Precision | Recall | F1 |\n|---|---|---|---|---|\n";
    char buf[160];
    for (const ComparisonRow& r : rows) {
        std::snprintf(buf, sizeof buf, "| %s | %.2f | %.2f | %.2f | %.2f |\n", to_string(r.kind), r.accuracy,
                      r.precision, r.recall, r.f1);
        out += buf;
    }
    return out;
}

}  // namespace gridsentinel
