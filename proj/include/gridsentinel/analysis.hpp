#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridsentinel/model.hpp"
#include "gridsentinel/window.hpp"

namespace gridsentinel {

inline constexpr double kDefaultTau = 0.05;  // p.u.

struct BusDeviation {
    int bus = 0;
    double max_dev = 0.0;  // p.u.
};

struct DeviationSummary {
    std::vector<BusDeviation> ranked;  // descending deviation, ties by bus id
    std::vector<int> exceed;           // ascending bus ids with deviation > tau
    double tau = kDefaultTau;
};

/// Baseline is the mean pre-trip magnitude per bus and phase; the deviation of a bus is the
/// largest |V - baseline| over all frames and phases.
DeviationSummary deviation_localize(const EventWindow& window, double tau = kDefaultTau);

struct Verdict {
    enum class Decision { Normal, Fault, CyberAttack } decision = Decision::Normal;
    FaultType ftype = FaultType::AG;  // fault only
    int line = -1;                    // fault only
    std::optional<int> suspect_bus;   // cyber attack only
    int event12 = 0;
    int combined202 = 0;
    std::string model_id;
    DeviationSummary deviation;
    bool agreement = false;
};

const char* to_string(Verdict::Decision d);

/// Maps a predicted combined class to a verdict and cross-checks it against the localizer.
/// Models trained on the 4-class simultaneous labels are rejected.
Verdict analyze(const TrainedModel& model, const EventWindow& window, double tau = kDefaultTau,
                std::string model_id = {});

nlohmann::json verdict_to_json(const Verdict& v);

/// Stable identifier for a model artifact: kind plus FNV-1a of its serialized text.
std::string model_id(ModelKind kind, std::string_view artifact_text);
std::string model_id(const TrainedModel& model);

}  // namespace gridsentinel
