#include "gridsentinel/model.hpp"

#include "gridsentinel/dataset.hpp"

namespace gridsentinel {

using nlohmann::json;

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::DecisionTree: return "dt";
        case ModelKind::Svm: return "svm";
        case ModelKind::Knn: return "knn";
        case ModelKind::Ann: return "ann";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    for (ModelKind k : kAllModelKinds)
        if (s == to_string(k)) return k;
    throw ValidationError("unknown model kind '" + s + "'");
}

ModelKind kind_of(const ModelConfig& cfg) { return static_cast<ModelKind>(cfg.index()); }

json config_to_json(const ModelConfig& cfg) {
    return std::visit(
        [](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, DtConfig>)
                return {{"max_depth", c.max_depth},
                        {"min_samples_split", c.min_samples_split},
                        {"min_impurity_decrease", c.min_impurity_decrease}};
            else if constexpr (std::is_same_v<T, SvmConfig>)
                return {{"C", c.C}, {"gamma", c.gamma}, {"tol", c.tol}, {"max_passes", c.max_passes}};
            else if constexpr (std::is_same_v<T, KnnConfig>)
                return {{"k", c.k}, {"p", c.p}};
            else
                return {{"hidden", c.hidden}, {"lr", c.lr},           {"batch", c.batch},
                        {"epochs", c.epochs}, {"patience", c.patience}, {"seed", c.seed}};
        },
        cfg);
}

ModelConfig config_from_json(ModelKind kind, const json& j) {
    try {
        switch (kind) {
            case ModelKind::DecisionTree: {
                DtConfig c;
                c.max_depth = j.value("max_depth", c.max_depth);
                c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
                c.min_impurity_decrease = j.value("min_impurity_decrease", c.min_impurity_decrease);
                c.validate();
                return c;
            }
            case ModelKind::Svm: {
                SvmConfig c;
                c.C = j.value("C", c.C);
                c.gamma = j.value("gamma", c.gamma);
                c.tol = j.value("tol", c.tol);
                c.max_passes = j.value("max_passes", c.max_passes);
                c.validate();
                return c;
            }
            case ModelKind::Knn: {
                KnnConfig c;
                c.k = j.value("k", c.k);
                c.p = j.value("p", c.p);
                c.validate();
                return c;
            }
            case ModelKind::Ann: {
                AnnConfig c;
                c.hidden = j.value("hidden", c.hidden);
                c.lr = j.value("lr", c.lr);
                c.batch = j.value("batch", c.batch);
                c.epochs = j.value("epochs", c.epochs);
                c.patience = j.value("patience", c.patience);
                c.seed = j.value("seed", c.seed);
                c.validate();
                return c;
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model hyperparameters: ") + e.what());
    }
    throw ValidationError("unknown model kind");
}

namespace {

Matrix standardize(const TrainedModel& m, const Matrix& raw, const std::string& hash) {
    if (hash != m.schema_hash)
        throw ValidationError("feature schema hash " + hash + " does not match the model's " + m.schema_hash);
    return m.scaler.apply(raw);
}

}  // namespace

LabelVector TrainedModel::predict(const Matrix& raw, const std::string& hash) const {
    const Matrix x = standardize(*this, raw, hash);
    return std::visit(
        [&](const auto& p) -> LabelVector {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                LabelVector out(static_cast<std::size_t>(x.rows()));
                for (Eigen::Index i = 0; i < x.rows(); ++i)
                    out[i] = p.predict({x.row(i).data(), static_cast<std::size_t>(x.cols())});
                return out;
            } else {
                return p.predict(x);
            }
        },
        params);
}

int TrainedModel::predict(std::span<const double> raw, const std::string& hash) const {
    Matrix row(1, static_cast<Eigen::Index>(raw.size()));
    std::copy(raw.begin(), raw.end(), row.data());
    return predict(row, hash).front();
}

TrainedModel train_model(const Matrix& raw, const LabelVector& y, const std::string& schema_hash,
                         const ModelConfig& cfg, json train_meta) {
    TrainedModel m;
    m.config = cfg;
    m.schema_hash = schema_hash;
    m.scaler = Scaler::fit(raw);
    const Matrix x = m.scaler.apply(raw);
    switch (kind_of(cfg)) {
        case ModelKind::DecisionTree: m.params = train_decision_tree(x, y, std::get<DtConfig>(cfg)); break;
        case ModelKind::Svm: m.params = train_svm(x, y, std::get<SvmConfig>(cfg)); break;
        case ModelKind::Knn: m.params = train_knn(x, y, std::get<KnnConfig>(cfg)); break;
        case ModelKind::Ann: {
            AnnTrainReport rep;
            m.params = train_ann(x, y, std::get<AnnConfig>(cfg), &rep);
            train_meta["ann_best_epoch"] = rep.best_epoch;
            train_meta["ann_epochs_run"] = rep.epochs_run;
            train_meta["ann_initial_inner_loss"] = rep.initial_inner_loss;
            train_meta["ann_best_inner_loss"] = rep.best_inner_loss;
            break;
        }
    }
    train_meta["train_size"] = y.size();
    m.train_meta = std::move(train_meta);
    return m;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
        throw ValidationError("model: matrix size mismatch");
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

json params_json(const ModelParameters& params) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                json nodes = json::array();
                for (const DtNode& n : p.nodes)
                    nodes.push_back({{"feature", n.feature},
                                     {"threshold", n.threshold},
                                     {"left", n.left},
                                     {"right", n.right},
                                     {"counts", n.counts}});
                return {{"classes", p.classes}, {"nodes", nodes}};
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                json machines = json::array();
                for (const SvmMachine& m : p.machines)
                    machines.push_back({{"positive", m.positive},
                                        {"negative", m.negative},
                                        {"sv", m.sv},
                                        {"coef", m.coef},
                                        {"bias", m.bias},
                                        {"iterations", m.stats.iterations},
                                        {"kkt_gap", m.stats.kkt_gap}});
                return {{"classes", p.classes},
                        {"gamma", p.gamma},
                        {"C", p.C},
                        {"support", matrix_json(p.support)},
                        {"machines", machines}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return {{"k", p.cfg.k}, {"p", p.cfg.p}, {"train", matrix_json(p.train)}, {"labels", p.labels},
                        {"size", p.size()}};
            } else {
                json layers = json::array();
                for (const DenseLayer& l : p.layers)
                    layers.push_back({{"fan_in", l.w.rows()},
                                      {"fan_out", l.w.cols()},
                                      {"w", std::vector<double>(l.w.data(), l.w.data() + l.w.size())},
                                      {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}});
                return {{"classes", p.classes}, {"activation", "relu"}, {"output", "softmax"}, {"layers", layers}};
            }
        },
        params);
}

ModelParameters params_from(ModelKind kind, const json& j) {
    switch (kind) {
        case ModelKind::DecisionTree: {
            DecisionTree t;
            t.classes = j.at("classes").get<std::vector<int>>();
            for (const json& n : j.at("nodes")) {
                DtNode node;
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                node.counts = n.at("counts").get<std::vector<long>>();
                t.nodes.push_back(std::move(node));
            }
            const int count = static_cast<int>(t.nodes.size());
            if (count == 0) throw ValidationError("model: empty tree");
            for (const DtNode& n : t.nodes) {
                if (n.counts.size() != t.classes.size()) throw ValidationError("model: tree leaf width mismatch");
                if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count ||
                                     !std::isfinite(n.threshold)))
                    throw ValidationError("model: malformed tree node");
            }
            return t;
        }
        case ModelKind::Svm: {
            SvmModel s;
            s.classes = j.at("classes").get<std::vector<int>>();
            s.gamma = j.at("gamma").get<double>();
            s.C = j.at("C").get<double>();
            s.support = matrix_from(j.at("support"));
            for (const json& m : j.at("machines")) {
                SvmMachine mc;
                mc.positive = m.at("positive").get<int>();
                mc.negative = m.at("negative").get<int>();
                mc.sv = m.at("sv").get<std::vector<int>>();
                mc.coef = m.at("coef").get<std::vector<double>>();
                mc.bias = m.at("bias").get<double>();
                mc.stats.iterations = m.value("iterations", 0L);
                mc.stats.kkt_gap = m.value("kkt_gap", 0.0);
                mc.stats.converged = true;
                if (mc.sv.size() != mc.coef.size()) throw ValidationError("model: SVM machine size mismatch");
                for (int v : mc.sv)
                    if (v < 0 || v >= s.support.rows()) throw ValidationError("model: SVM support index out of range");
                s.machines.push_back(std::move(mc));
            }
            return s;
        }
        case ModelKind::Knn: {
            KnnModel k;
            k.cfg.k = j.at("k").get<int>();
            k.cfg.p = j.at("p").get<double>();
            k.train = matrix_from(j.at("train"));
            k.labels = j.at("labels").get<LabelVector>();
            if (static_cast<std::size_t>(k.train.rows()) != k.labels.size())
                throw ValidationError("model: KNN label count mismatch");
            return k;
        }
        case ModelKind::Ann: {
            AnnModel a;
            a.classes = j.at("classes").get<std::vector<int>>();
            Eigen::Index prev = -1;
            for (const json& l : j.at("layers")) {
                DenseLayer layer;
                const auto in = l.at("fan_in").get<Eigen::Index>(), out = l.at("fan_out").get<Eigen::Index>();
                const auto w = l.at("w").get<std::vector<double>>();
                const auto b = l.at("b").get<std::vector<double>>();
                if ((prev >= 0 && in != prev) || static_cast<std::size_t>(in * out) != w.size() ||
                    static_cast<std::size_t>(out) != b.size())
                    throw ValidationError("model: ANN layer shapes do not chain");
                layer.w = Eigen::Map<const Eigen::MatrixXd>(w.data(), in, out);
                layer.b = Eigen::Map<const Eigen::VectorXd>(b.data(), out);
                a.layers.push_back(std::move(layer));
                prev = out;
            }
            if (a.layers.empty() || prev != static_cast<Eigen::Index>(a.classes.size()))
                throw ValidationError("model: ANN output width does not match the class list");
            return a;
        }
    }
    throw ValidationError("unknown model kind");
}

}  // namespace

std::string model_to_json(const TrainedModel& m) {
    const json doc = {{"format", "gridsentinel-model"},
                      {"version", kModelFormatVersion},
                      {"kind", to_string(m.kind())},
                      {"hyperparameters", config_to_json(m.config)},
                      {"scaler", {{"mean", m.scaler.mean}, {"std", m.scaler.std}}},
                      {"schema_hash", m.schema_hash},
                      {"parameters", params_json(m.params)},
                      {"train_meta", m.train_meta}};
    return doc.dump();
}

TrainedModel model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("model parse error: ") + e.what());
    }
    try {
        if (doc.value("format", "") != "gridsentinel-model") throw ValidationError("not a model document");
        if (doc.at("version").get<int>() != kModelFormatVersion)
            throw ValidationError("unsupported model version " + doc.at("version").dump());
        TrainedModel m;
        const ModelKind kind = parse_model_kind(doc.at("kind").get<std::string>());
        m.config = config_from_json(kind, doc.at("hyperparameters"));
        m.scaler.mean = doc.at("scaler").at("mean").get<std::vector<double>>();
        m.scaler.std = doc.at("scaler").at("std").get<std::vector<double>>();
        if (m.scaler.mean.size() != m.scaler.std.size()) throw ValidationError("model: scaler size mismatch");
        m.schema_hash = doc.at("schema_hash").get<std::string>();
        m.params = params_from(kind, doc.at("parameters"));
        m.train_meta = doc.value("train_meta", json::object());
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }
}

void save_model(const TrainedModel& m, const std::string& path) { write_text_file(path, model_to_json(m)); }

TrainedModel load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

}  // namespace gridsentinel
