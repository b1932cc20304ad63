#include "gridsentinel/synthesis.hpp"

#include "gridsentinel/attack.hpp"

namespace gridsentinel {

GridContext GridContext::make(const NetworkModel& base, std::optional<int> outage) {
    GridContext ctx;
    ctx.net = outage ? apply_outage(base, *outage) : base;
    ctx.outage = outage;
    ctx.pf = solve_nr(ctx.net);
    ctx.prefault = prefault_solution(ctx.net, ctx.pf);
    return ctx;
}

namespace {

Frame frame_from(const GridContext& ctx, const FaultSolution& sol) {
    Frame frame(ctx.net.bus_count());
    for (int b = 0; b < ctx.net.bus_count(); ++b)
        frame[b] = measure(sol.voltage(b), sol.i_inj[b], ctx.net.nominal_hz);
    return frame;
}

}  // namespace

EventWindow clean_normal_window(const GridContext& ctx, const WindowingConfig& w) {
    w.validate();
    EventWindow win;
    win.frame_rate = w.frame_rate;
    win.trip_index = w.n_pre;
    win.frames.assign(w.frames(), frame_from(ctx, ctx.prefault));
    return win;
}

EventWindow clean_fault_window(const GridContext& ctx, std::span<const FaultSpec> faults, const WindowingConfig& w) {
    EventWindow win = clean_normal_window(ctx, w);
    const FaultStudy study = run_fault_study(ctx.net, ctx.pf, faults);
    const Frame faulted = frame_from(ctx, study.solution);
    for (int f = w.n_pre; f < w.frames(); ++f) win.frames[f] = faulted;
    return win;
}

EventWindow synthesize_window(const GridContext& ctx, const EventScenario& s, const WindowingConfig& w,
                              const NoiseConfig& noise, std::uint64_t seed) {
    if (s.outage != ctx.outage) throw ValidationError("scenario outage does not match the grid context");
    EventWindow win = s.faults.empty() ? clean_normal_window(ctx, w) : clean_fault_window(ctx, s.faults, w);
    for (const AttackSpec& a : s.attacks) {
        check_attack(ctx.net, a);
        win = splice_attack(win, clean_fault_window(ctx, std::span(&a.donor, 1), w), a.target_bus);
    }
    apply_noise(win, noise, seed);
    return win;
}

}  // namespace gridsentinel
