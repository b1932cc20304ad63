#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridsentinel/fault.hpp"

namespace gridsentinel {

enum class AttackKind { Replay, Fdi };

/// Fault-like measurements injected into one substation's sampled-value stream.
struct AttackSpec {
    int target_bus = 0;
    FaultSpec donor;
    AttackKind kind = AttackKind::Replay;

    bool operator==(const AttackSpec&) const = default;
};

enum class ScenarioKind { Normal, Fault, Attack, DualFault, DualAttack, FaultAttack };

struct EventScenario {
    ScenarioKind kind = ScenarioKind::Normal;
    std::vector<FaultSpec> faults;    // genuine faults solved on the grid
    std::vector<AttackSpec> attacks;  // spliced into single buses
    std::optional<int> outage;

    bool operator==(const EventScenario&) const = default;
};

enum class Campaign { Single, N1, Simultaneous };

const char* to_string(Campaign c);
Campaign parse_campaign(const std::string& s);
const char* to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& s);
const char* to_string(AttackKind k);
AttackKind parse_attack_kind(const std::string& s);

inline constexpr int kNormalClass = 0;
inline constexpr int kAttackEventClass = 11;
inline constexpr int kAttackCombinedClass = 201;
inline constexpr int kCombinedClassCount = 202;
inline constexpr int kEventClassCount = 12;

/// Simultaneous-campaign labels.
enum class SimultaneousClass : int { Normal = 0, DualFault = 1, DualAttack = 2, FaultAttack = 3 };
inline constexpr int kSimultaneousClassCount = 4;

/// 1..200: line * 10 + fault class index.
inline int combined_class(int line, FaultType t) { return line * 10 + class_index(t); }

struct DecodedClass {
    enum class Kind { Normal, Fault, Attack } kind = Kind::Normal;
    int line = -1;
    FaultType type = FaultType::AG;
};
DecodedClass decode_combined(int combined);

struct Labels {
    int event12 = 0;
    int combined202 = 0;
    int target = 0;  // the class the campaign trains on
};

Labels labels_for(const EventScenario& s, Campaign campaign);

/// Default grids for the paper campaign.
inline constexpr double kDefaultLocations[4] = {0.2, 0.4, 0.6, 0.8};
inline constexpr double kDefaultImpedances[4] = {0.001, 0.05, 0.1, 0.15};

struct EnumerationOptions {
    int n_normal = 320;
};

/// 20 lines x 4 locations x 4 impedances x 10 types faults, one attack per fault
/// case (target = donor line's from-bus), then n_normal normal windows.
std::vector<EventScenario> enumerate_single(const NetworkModel& net, const EnumerationOptions& opt = {});

/// Same grid over the lines left in service after `outage`; every scenario carries the tag.
std::vector<EventScenario> enumerate_n1(const NetworkModel& net, int outage, const EnumerationOptions& opt = {});

/// k stratified draws (class = index mod 3) of two-event scenarios on distinct lines, then normals.
std::vector<EventScenario> enumerate_simultaneous(const NetworkModel& net, int k, std::uint64_t seed,
                                                  const EnumerationOptions& opt = {});

}  // namespace gridsentinel
