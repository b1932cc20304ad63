#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridsentinel/rng.hpp"
#include "gridsentinel/scenario.hpp"
#include "gridsentinel/window.hpp"

namespace gridsentinel {

/// Topology-specific state shared by every scenario of a campaign. Immutable.
struct GridContext {
    NetworkModel net;
    PowerFlowSolution pf;
    FaultSolution prefault;
    std::optional<int> outage;

    static GridContext make(const NetworkModel& base, std::optional<int> outage = std::nullopt);
};

/// Pre-fault window: every frame is the operating point.
EventWindow clean_normal_window(const GridContext& ctx, const WindowingConfig& w);

/// Frames before the trip hold the operating point, later frames the faulted solution.
EventWindow clean_fault_window(const GridContext& ctx, std::span<const FaultSpec> faults,
                               const WindowingConfig& w);

/// Measurement window for one scenario; noise is drawn from a stream seeded with `seed`.
EventWindow synthesize_window(const GridContext& ctx, const EventScenario& s, const WindowingConfig& w,
                              const NoiseConfig& noise, std::uint64_t seed);

/// Per-scenario stream seed: counter-derived from the master seed and scenario index.
inline std::uint64_t scenario_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

}  // namespace gridsentinel
