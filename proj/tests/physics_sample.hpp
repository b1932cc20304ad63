#pragma once

// Seeded window samples shared by the localizer tests and the acceptance run.

#include <vector>

#include "gridsentinel/analysis.hpp"
#include "gridsentinel/synthesis.hpp"

namespace sample {

using namespace gridsentinel;

enum class Kind { Normal, BoltedFault, Attack };

inline EventScenario draw(const NetworkModel& net, Kind kind, Rng& rng, int i) {
    FaultSpec f;
    f.line = static_cast<int>(rng.below(static_cast<std::uint64_t>(net.line_count())));
    f.type = kAllFaultTypes[rng.below(10)];
    f.d = kDefaultLocations[rng.below(4)];
    f.zf = kDefaultImpedances[rng.below(4)];
    switch (kind) {
        case Kind::Normal: return {ScenarioKind::Normal, {}, {}, std::nullopt};
        case Kind::BoltedFault:
            f.zf = 0.001;
            return {ScenarioKind::Fault, {f}, {}, std::nullopt};
        case Kind::Attack:
            return {ScenarioKind::Attack,
                    {},
                    {AttackSpec{net.lines[f.line].from, f, i % 2 ? AttackKind::Fdi : AttackKind::Replay}},
                    std::nullopt};
    }
    return {};
}

/// `n` windows of one kind on the base topology, default windowing and noise.
inline std::vector<EventWindow> windows(const GridContext& ctx, Kind kind, int n, std::uint64_t seed,
                                        std::vector<EventScenario>* scenarios = nullptr) {
    Rng rng(derive_seed(seed, 0x706879ULL + static_cast<std::uint64_t>(kind)));
    NoiseConfig noise;
    noise.seed = seed;
    std::vector<EventWindow> out;
    for (int i = 0; i < n; ++i) {
        const EventScenario s = draw(ctx.net, kind, rng, i);
        const std::uint64_t stream = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(kind) + 1), i);
        out.push_back(synthesize_window(ctx, s, WindowingConfig{}, noise, stream));
        if (scenarios) scenarios->push_back(s);
    }
    return out;
}

}  // namespace sample
