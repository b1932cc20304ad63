#pragma once

#include <cstdint>

#include "gridsentinel/synthesis.hpp"

namespace gridsentinel {

/// Copies the target bus's V, I and frequency (and the trip index) from `fault` into
/// a copy of `normal`; every other bus stays untouched.
EventWindow splice_attack(const EventWindow& normal, const EventWindow& fault, int target_bus);

/// Throws ValidationError unless the target bus terminates the donor line.
void check_attack(const NetworkModel& net, const AttackSpec& spec);

/// Normal window + donor fault window spliced at the target, then noise over the result.
EventWindow craft_attack_window(const GridContext& ctx, const AttackSpec& spec, const WindowingConfig& w,
                                const NoiseConfig& noise, std::uint64_t seed);

/// Replay variant: splices a previously captured clean donor window instead of re-solving.
EventWindow replay_attack_window(const GridContext& ctx, const EventWindow& captured_fault, int target_bus,
                                 const WindowingConfig& w, const NoiseConfig& noise, std::uint64_t seed);

}  // namespace gridsentinel
