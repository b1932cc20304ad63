#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "gridsentinel/ann.hpp"
#include "gridsentinel/decision_tree.hpp"
#include "gridsentinel/knn.hpp"
#include "gridsentinel/svm.hpp"

namespace gridsentinel {

enum class ModelKind { DecisionTree, Svm, Knn, Ann };

inline constexpr ModelKind kAllModelKinds[4] = {ModelKind::DecisionTree, ModelKind::Svm, ModelKind::Knn,
                                                ModelKind::Ann};

const char* to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

using ModelConfig = std::variant<DtConfig, SvmConfig, KnnConfig, AnnConfig>;
using ModelParameters = std::variant<DecisionTree, SvmModel, KnnModel, AnnModel>;

ModelKind kind_of(const ModelConfig& cfg);
nlohmann::json config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(ModelKind kind, const nlohmann::json& j);

inline constexpr int kModelFormatVersion = 1;

/// Classifier plus everything needed to apply it to raw feature vectors.
struct TrainedModel {
    ModelConfig config;
    ModelParameters params;
    Scaler scaler;
    std::string schema_hash;
    nlohmann::json train_meta;

    ModelKind kind() const { return kind_of(config); }

    /// Raw (unscaled) features; throws ValidationError unless `hash` equals schema_hash.
    int predict(std::span<const double> raw, const std::string& hash) const;
    LabelVector predict(const Matrix& raw, const std::string& hash) const;
};

/// Fits the scaler on `raw`, then trains the configured classifier on the standardized rows.
TrainedModel train_model(const Matrix& raw, const LabelVector& y, const std::string& schema_hash,
                         const ModelConfig& cfg, nlohmann::json train_meta = nlohmann::json::object());

/// Versioned JSON document: {format, kind, hyperparameters, scaler, schema_hash, parameters, train_meta}.
/// Doubles are written with 17 significant digits, so a reload predicts bit-identically.
std::string model_to_json(const TrainedModel& m);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace gridsentinel
