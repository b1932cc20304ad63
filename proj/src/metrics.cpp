#include "gridsentinel/metrics.hpp"

#include <algorithm>
#include <map>

namespace gridsentinel {

using nlohmann::json;

namespace {

double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

EvalReport evaluate(const LabelVector& truth, const LabelVector& predicted) {
    if (truth.size() != predicted.size()) throw ValidationError("truth and prediction lengths differ");
    if (truth.empty()) throw ValidationError("cannot evaluate an empty set");
    EvalReport r;
    r.count = static_cast<long>(truth.size());
    LabelVector both = truth;
    both.insert(both.end(), predicted.begin(), predicted.end());
    r.classes = distinct_labels(both);
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < r.classes.size(); ++i) pos[r.classes[i]] = i;

    const std::size_t k = r.classes.size();
    r.confusion.assign(k, std::vector<long>(k, 0));
    long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++r.confusion[pos[truth[i]]][pos[predicted[i]]];
        correct += truth[i] == predicted[i];
    }
    r.accuracy = 100.0 * ratio(correct, r.count);

    double sp = 0.0, sr = 0.0, sf = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics m;
        m.label = r.classes[c];
        for (std::size_t j = 0; j < k; ++j) {
            m.support += r.confusion[c][j];
            m.predicted += r.confusion[j][c];
        }
        if (m.support == 0) continue;
        const long tp = r.confusion[c][c];
        m.precision = 100.0 * ratio(tp, m.predicted);
        m.recall = 100.0 * ratio(tp, m.support);
        m.f1 = harmonic(m.precision, m.recall);
        sp += m.precision;
        sr += m.recall;
        sf += m.f1;
        r.per_class.push_back(m);
    }
    const auto n = static_cast<double>(r.per_class.size());
    r.precision = sp / n;
    r.recall = sr / n;
    r.f1 = sf / n;
    r.f1_harmonic = harmonic(r.precision, r.recall);
    return r;
}

json report_to_json(const EvalReport& r) {
    json per = json::array();
    for (const ClassMetrics& m : r.per_class)
        per.push_back({{"label", m.label},
                       {"support", m.support},
                       {"predicted", m.predicted},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1}});
    return {{"count", r.count},         {"accuracy", r.accuracy},   {"precision", r.precision},
            {"recall", r.recall},       {"f1", r.f1},               {"f1_harmonic", r.f1_harmonic},
            {"classes", r.classes},     {"confusion", r.confusion}, {"per_class", per}};
}

EvalReport report_from_json(const json& j) {
    try {
        EvalReport r;
        r.count = j.at("count").get<long>();
        r.accuracy = j.at("accuracy").get<double>();
        r.precision = j.at("precision").get<double>();
        r.recall = j.at("recall").get<double>();
        r.f1 = j.at("f1").get<double>();
        r.f1_harmonic = j.at("f1_harmonic").get<double>();
        r.classes = j.at("classes").get<std::vector<int>>();
        r.confusion = j.at("confusion").get<std::vector<std::vector<long>>>();
        for (const json& m : j.at("per_class"))
            r.per_class.push_back({m.at("label").get<int>(), m.at("support").get<long>(), m.at("predicted").get<long>(),
                                   m.at("precision").get<double>(), m.at("recall").get<double>(),
                                   m.at("f1").get<double>()});
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("eval report: ") + e.what());
    }
}

}  // namespace gridsentinel
