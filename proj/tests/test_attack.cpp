#include <gtest/gtest.h>

#include "gridsentinel/attack.hpp"

using namespace gridsentinel;

namespace {

const GridContext& base_ctx() {
    static const GridContext ctx = GridContext::make(ieee14());
    return ctx;
}

}  // namespace

TEST(Splice, SelfSpliceIsIdentity) {
    const EventWindow n = clean_normal_window(base_ctx(), {});
    EXPECT_EQ(splice_attack(n, n, 4), n);
}

TEST(Splice, OnlyTargetBusChanges) {
    const GridContext& ctx = base_ctx();
    const FaultSpec donor{2, 0.4, FaultType::AG, 0.001};
    EventWindow normal = clean_normal_window(ctx, {});
    apply_noise(normal, {}, 11);
    const EventWindow fault = clean_fault_window(ctx, std::span(&donor, 1), {});
    const int target = ctx.net.lines[2].from;
    const EventWindow out = splice_attack(normal, fault, target);
    for (int f = 0; f < out.frame_count(); ++f)
        for (int b = 0; b < out.bus_count(); ++b) {
            if (b == target)
                EXPECT_EQ(out.frames[f][b], fault.frames[f][b]);
            else
                EXPECT_EQ(out.frames[f][b], normal.frames[f][b]);
        }
    EXPECT_EQ(out.trip_index, fault.trip_index);
}

TEST(Splice, ShapeAndBusErrors) {
    const EventWindow n = clean_normal_window(base_ctx(), {});
    const EventWindow longer = clean_normal_window(base_ctx(), {2, 5, 30.0});
    EXPECT_THROW(splice_attack(n, longer, 0), ValidationError);
    EXPECT_THROW(splice_attack(n, n, 14), ValidationError);
    EXPECT_THROW(splice_attack(n, n, -1), ValidationError);
    EventWindow other_rate = n;
    other_rate.frame_rate = 60.0;
    EXPECT_THROW(splice_attack(n, other_rate, 0), ValidationError);
}

TEST(Craft, TargetMatchesDonorWithNoiseOff) {
    const GridContext& ctx = base_ctx();
    const AttackSpec spec{ctx.net.lines[7].to, FaultSpec{7, 0.8, FaultType::AB, 0.05}, AttackKind::Fdi};
    const EventWindow w = craft_attack_window(ctx, spec, {}, NoiseConfig::off(), 3);
    const EventWindow donor = clean_fault_window(ctx, std::span(&spec.donor, 1), {});
    const EventWindow normal = clean_normal_window(ctx, {});
    for (int f = 0; f < w.frame_count(); ++f)
        for (int b = 0; b < w.bus_count(); ++b)
            EXPECT_EQ(w.frames[f][b], (b == spec.target_bus ? donor : normal).frames[f][b]);
}

TEST(Craft, DeterministicAndReplayMatchesFdi) {
    const GridContext& ctx = base_ctx();
    const FaultSpec donor{10, 0.2, FaultType::BCG, 0.1};
    const int target = ctx.net.lines[10].from;
    const AttackSpec spec{target, donor, AttackKind::Replay};
    const EventWindow a = craft_attack_window(ctx, spec, {}, {}, 8);
    EXPECT_EQ(a, craft_attack_window(ctx, spec, {}, {}, 8));
    const EventWindow captured = clean_fault_window(ctx, std::span(&donor, 1), {});
    EXPECT_EQ(replay_attack_window(ctx, captured, target, {}, {}, 8), a);
}

TEST(Craft, TargetMustTerminateDonorLine) {
    const GridContext& ctx = base_ctx();
    const AttackSpec far{13, FaultSpec{0, 0.5, FaultType::AG, 0.01}, AttackKind::Fdi};
    EXPECT_THROW(craft_attack_window(ctx, far, {}, {}, 1), ValidationError);
    const AttackSpec bad_line{0, FaultSpec{40, 0.5, FaultType::AG, 0.01}, AttackKind::Fdi};
    EXPECT_THROW(check_attack(ctx.net, bad_line), ValidationError);
}
