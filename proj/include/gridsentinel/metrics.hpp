#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gridsentinel/preprocess.hpp"

namespace gridsentinel {

struct ClassMetrics {
    int label = 0;
    long support = 0;    // true count
    long predicted = 0;  // predicted count
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const ClassMetrics&) const = default;
};

/// All percentages. Macro averages run over the classes present in the truth vector; a
/// class that is never predicted has precision 0.
struct EvalReport {
    long count = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;           // mean of per-class F1 (reported)
    double f1_harmonic = 0.0;  // harmonic mean of macro precision and macro recall
    std::vector<int> classes;  // confusion axes: union of true and predicted labels, ascending
    std::vector<std::vector<long>> confusion;  // [true][predicted]
    std::vector<ClassMetrics> per_class;

    bool operator==(const EvalReport&) const = default;
};

EvalReport evaluate(const LabelVector& truth, const LabelVector& predicted);

nlohmann::json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

}  // namespace gridsentinel
