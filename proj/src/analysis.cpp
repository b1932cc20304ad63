#include "gridsentinel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gridsentinel/dataset.hpp"

namespace gridsentinel {

using nlohmann::json;

DeviationSummary deviation_localize(const EventWindow& window, double tau) {
    check_window_shape(window);
    if (window.trip_index < 1) throw ValidationError("deviation baseline needs at least one pre-trip frame");
    if (!(tau >= 0.0)) throw ValidationError("tau must be non-negative");
    const int buses = window.bus_count();

    DeviationSummary out;
    out.tau = tau;
    for (int b = 0; b < buses; ++b) {
        double base[3] = {0, 0, 0};
        for (int f = 0; f < window.trip_index; ++f)
            for (int p = 0; p < 3; ++p) base[p] += window.frames[f][b].v[p].mag;
        for (double& x : base) x /= window.trip_index;

        double dev = 0.0;
        for (const Frame& frame : window.frames)
            for (int p = 0; p < 3; ++p) dev = std::max(dev, std::abs(frame[b].v[p].mag - base[p]));
        out.ranked.push_back({b, dev});
        if (dev > tau) out.exceed.push_back(b);
    }
    std::stable_sort(out.ranked.begin(), out.ranked.end(),
                     [](const BusDeviation& a, const BusDeviation& b) { return a.max_dev > b.max_dev; });
    return out;
}

const char* to_string(Verdict::Decision d) {
    switch (d) {
        case Verdict::Decision::Normal: return "normal";
        case Verdict::Decision::Fault: return "fault";
        case Verdict::Decision::CyberAttack: return "cyber_attack";
    }
    return "?";
}

std::string model_id(const TrainedModel& model) { return model_id(model.kind(), model_to_json(model)); }

std::string model_id(ModelKind kind, std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(to_string(kind)) + "-" + buf;
}

Verdict analyze(const TrainedModel& model, const EventWindow& window, double tau, std::string id) {
    const auto& meta = model.train_meta;
    if (meta.is_object() && meta.contains("campaign") && meta.at("campaign") == to_string(Campaign::Simultaneous))
        throw ValidationError("analyze needs a model trained on combined classes, not simultaneous labels");

    const std::vector<std::string> schema = feature_schema(window.frame_count(), window.bus_count());
    const std::vector<double> x = featurize(window, schema);

    Verdict v;
    v.combined202 = model.predict(x, schema_hash(schema));
    v.model_id = id.empty() ? model_id(model) : std::move(id);
    v.deviation = deviation_localize(window, tau);

    const DecodedClass d = decode_combined(v.combined202);
    switch (d.kind) {
        case DecodedClass::Kind::Normal:
            v.decision = Verdict::Decision::Normal;
            v.event12 = kNormalClass;
            break;
        case DecodedClass::Kind::Fault:
            v.decision = Verdict::Decision::Fault;
            v.ftype = d.type;
            v.line = d.line;
            v.event12 = class_index(d.type);
            break;
        case DecodedClass::Kind::Attack:
            v.decision = Verdict::Decision::CyberAttack;
            v.event12 = kAttackEventClass;
            // A lone exceeding bus is the spliced one; otherwise take the largest deviation.
            v.suspect_bus = v.deviation.exceed.size() == 1 ? v.deviation.exceed.front()
                                                            : v.deviation.ranked.front().bus;
            break;
    }
    v.agreement = (v.decision == Verdict::Decision::CyberAttack) == (v.deviation.exceed.size() == 1);
    return v;
}

json verdict_to_json(const Verdict& v) {
    json decision = {{"type", to_string(v.decision)}};
    if (v.decision == Verdict::Decision::Fault) {
        decision["ftype"] = to_string(v.ftype);
        decision["line"] = v.line;
    }
    if (v.suspect_bus) decision["suspect_bus"] = *v.suspect_bus;

    json ranked = json::array();
    for (const BusDeviation& d : v.deviation.ranked) ranked.push_back({{"bus", d.bus}, {"max_dev", d.max_dev}});
    return {{"decision", decision},
            {"event12", v.event12},
            {"combined202", v.combined202},
            {"model_id", v.model_id},
            {"deviation", {{"tau", v.deviation.tau}, {"per_bus", ranked}, {"exceed", v.deviation.exceed}}},
            {"agreement", v.agreement}};
}

}  // namespace gridsentinel
