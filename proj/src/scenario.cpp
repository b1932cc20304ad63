#include "gridsentinel/scenario.hpp"

#include "gridsentinel/rng.hpp"

namespace gridsentinel {

const char* to_string(Campaign c) {
    switch (c) {
        case Campaign::Single: return "single";
        case Campaign::N1: return "n1";
        case Campaign::Simultaneous: return "simultaneous";
    }
    return "?";
}

Campaign parse_campaign(const std::string& s) {
    if (s == "single") return Campaign::Single;
    if (s == "n1") return Campaign::N1;
    if (s == "simultaneous") return Campaign::Simultaneous;
    throw ValidationError("unknown campaign '" + s + "'");
}

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Normal: return "normal";
        case ScenarioKind::Fault: return "fault";
        case ScenarioKind::Attack: return "attack";
        case ScenarioKind::DualFault: return "dual_fault";
        case ScenarioKind::DualAttack: return "dual_attack";
        case ScenarioKind::FaultAttack: return "fault_attack";
    }
    return "?";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
    for (ScenarioKind k : {ScenarioKind::Normal, ScenarioKind::Fault, ScenarioKind::Attack, ScenarioKind::DualFault,
                           ScenarioKind::DualAttack, ScenarioKind::FaultAttack})
        if (s == to_string(k)) return k;
    throw ValidationError("unknown scenario kind '" + s + "'");
}

const char* to_string(AttackKind k) { return k == AttackKind::Replay ? "replay" : "fdi"; }

AttackKind parse_attack_kind(const std::string& s) {
    if (s == "replay") return AttackKind::Replay;
    if (s == "fdi") return AttackKind::Fdi;
    throw ValidationError("unknown attack kind '" + s + "'");
}

DecodedClass decode_combined(int combined) {
    DecodedClass d;
    if (combined == kNormalClass) return d;
    if (combined == kAttackCombinedClass) {
        d.kind = DecodedClass::Kind::Attack;
        return d;
    }
    if (combined < 1 || combined > 200) throw ValidationError("combined class out of range: " + std::to_string(combined));
    d.kind = DecodedClass::Kind::Fault;
    d.line = (combined - 1) / 10;
    d.type = fault_type_from_class(combined - 10 * d.line);
    return d;
}

Labels labels_for(const EventScenario& s, Campaign campaign) {
    Labels l;
    switch (s.kind) {
        case ScenarioKind::Normal: break;
        case ScenarioKind::Fault:
            l.event12 = class_index(s.faults.at(0).type);
            l.combined202 = combined_class(s.faults[0].line, s.faults[0].type);
            break;
        case ScenarioKind::DualFault:
            l.event12 = class_index(s.faults.at(0).type);
            l.combined202 = combined_class(s.faults[0].line, s.faults[0].type);
            l.target = static_cast<int>(SimultaneousClass::DualFault);
            break;
        case ScenarioKind::Attack:
        case ScenarioKind::DualAttack:
        case ScenarioKind::FaultAttack:
            l.event12 = kAttackEventClass;
            l.combined202 = kAttackCombinedClass;
            if (s.kind == ScenarioKind::DualAttack) l.target = static_cast<int>(SimultaneousClass::DualAttack);
            if (s.kind == ScenarioKind::FaultAttack) l.target = static_cast<int>(SimultaneousClass::FaultAttack);
            break;
    }
    if (campaign != Campaign::Simultaneous) l.target = l.combined202;
    return l;
}

namespace {

std::vector<EventScenario> enumerate_grid(const NetworkModel& net, std::optional<int> outage,
                                          const EnumerationOptions& opt) {
    std::vector<FaultSpec> faults;
    for (const Line& line : net.lines) {
        if (!line.in_service || (outage && line.id == *outage)) continue;
        for (FaultType t : kAllFaultTypes)
            for (double d : kDefaultLocations)
                for (double zf : kDefaultImpedances) faults.push_back({line.id, d, t, zf});
    }
    std::vector<EventScenario> out;
    out.reserve(2 * faults.size() + opt.n_normal);
    for (const FaultSpec& f : faults) out.push_back({ScenarioKind::Fault, {f}, {}, outage});
    for (size_t i = 0; i < faults.size(); ++i) {
        const FaultSpec& f = faults[i];
        // Replay and FDI produce identical windows here; alternate the provenance tag.
        const AttackKind kind = i % 2 == 0 ? AttackKind::Replay : AttackKind::Fdi;
        out.push_back({ScenarioKind::Attack, {}, {AttackSpec{net.lines[f.line].from, f, kind}}, outage});
    }
    for (int i = 0; i < opt.n_normal; ++i) out.push_back({ScenarioKind::Normal, {}, {}, outage});
    return out;
}

}  // namespace

std::vector<EventScenario> enumerate_single(const NetworkModel& net, const EnumerationOptions& opt) {
    return enumerate_grid(net, std::nullopt, opt);
}

std::vector<EventScenario> enumerate_n1(const NetworkModel& net, int outage, const EnumerationOptions& opt) {
    const NetworkModel checked = apply_outage(net, outage);  // rejects disconnecting outages
    (void)checked;
    return enumerate_grid(net, outage, opt);
}

std::vector<EventScenario> enumerate_simultaneous(const NetworkModel& net, int k, std::uint64_t seed,
                                                  const EnumerationOptions& opt) {
    if (k <= 0) throw ValidationError("simultaneous campaign needs k > 0");
    std::vector<int> lines;
    for (const Line& l : net.lines)
        if (l.in_service) lines.push_back(l.id);
    if (lines.size() < 2) throw ValidationError("simultaneous campaign needs two in-service lines");

    Rng rng(derive_seed(seed, 0x5157ULL));
    auto draw_fault = [&](int line) {
        FaultSpec f;
        f.line = line;
        f.d = kDefaultLocations[rng.below(4)];
        f.zf = kDefaultImpedances[rng.below(4)];
        f.type = kAllFaultTypes[rng.below(10)];
        return f;
    };

    std::vector<EventScenario> out;
    out.reserve(k + opt.n_normal);
    const ScenarioKind cycle[3] = {ScenarioKind::DualFault, ScenarioKind::DualAttack, ScenarioKind::FaultAttack};
    for (int i = 0; i < k; ++i) {
        const ScenarioKind kind = cycle[i % 3];
        int a = 0, b = 0;
        for (;;) {
            a = lines[rng.below(lines.size())];
            b = lines[rng.below(lines.size())];
            if (a == b) continue;
            // Two attacked substations must be distinct.
            if (kind == ScenarioKind::DualAttack && net.lines[a].from == net.lines[b].from) continue;
            break;
        }
        const FaultSpec fa = draw_fault(a), fb = draw_fault(b);
        EventScenario s;
        s.kind = kind;
        switch (kind) {
            case ScenarioKind::DualFault: s.faults = {fa, fb}; break;
            case ScenarioKind::DualAttack:
                s.attacks = {AttackSpec{net.lines[a].from, fa, AttackKind::Fdi},
                             AttackSpec{net.lines[b].from, fb, AttackKind::Fdi}};
                break;
            default:
                s.faults = {fa};
                s.attacks = {AttackSpec{net.lines[b].from, fb, AttackKind::Fdi}};
        }
        out.push_back(std::move(s));
    }
    for (int i = 0; i < opt.n_normal; ++i) out.push_back({ScenarioKind::Normal, {}, {}, std::nullopt});
    return out;
}

}  // namespace gridsentinel
