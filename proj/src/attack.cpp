#include "gridsentinel/attack.hpp"

namespace gridsentinel {

EventWindow splice_attack(const EventWindow& normal, const EventWindow& fault, int target_bus) {
    check_window_shape(normal);
    check_window_shape(fault);
    if (normal.frame_count() != fault.frame_count() || normal.bus_count() != fault.bus_count() ||
        normal.frame_rate != fault.frame_rate)
        throw ValidationError("splice: window shapes differ");
    if (target_bus < 0 || target_bus >= normal.bus_count())
        throw ValidationError("splice: unknown bus " + std::to_string(target_bus));
    EventWindow out = normal;
    for (int f = 0; f < out.frame_count(); ++f) out.frames[f][target_bus] = fault.frames[f][target_bus];
    out.trip_index = fault.trip_index;
    return out;
}

void check_attack(const NetworkModel& net, const AttackSpec& spec) {
    if (spec.donor.line < 0 || spec.donor.line >= net.line_count())
        throw ValidationError("attack donor line does not exist");
    const Line& l = net.lines[spec.donor.line];
    if (spec.target_bus != l.from && spec.target_bus != l.to)
        throw ValidationError("attack target bus " + std::to_string(spec.target_bus) +
                              " is not an endpoint of donor line " + std::to_string(l.id));
}

EventWindow craft_attack_window(const GridContext& ctx, const AttackSpec& spec, const WindowingConfig& w,
                                const NoiseConfig& noise, std::uint64_t seed) {
    EventScenario s;
    s.kind = ScenarioKind::Attack;
    s.attacks = {spec};
    s.outage = ctx.outage;
    return synthesize_window(ctx, s, w, noise, seed);
}

EventWindow replay_attack_window(const GridContext& ctx, const EventWindow& captured_fault, int target_bus,
                                 const WindowingConfig& w, const NoiseConfig& noise, std::uint64_t seed) {
    EventWindow win = splice_attack(clean_normal_window(ctx, w), captured_fault, target_bus);
    apply_noise(win, noise, seed);
    return win;
}

}  // namespace gridsentinel
