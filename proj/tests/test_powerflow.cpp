#include <gtest/gtest.h>

#include <cmath>

#include "gridsentinel/powerflow.hpp"

using namespace gridsentinel;

namespace {

NetworkModel two_bus(double p, double q) {
    NetworkModel net;
    net.buses = {Bus{0, BusKind::Slack, {0, 0}, 0.0, 1.0}, Bus{1, BusKind::PQ, {p, q}, 0.0, 1.0}};
    net.lines = {Line{0, 0, 1, 0.0, 0.1, 0.0, 0.0, 0.3, true}};
    net.gens = {GeneratorDynamic{0, 0.2, 0.2, 0.1, true}};
    validate(net);
    return net;
}

// Straight loop evaluation of S = V .* conj(Y V) with Y stamped here from line data.
std::vector<Complex> injections_by_loops(const NetworkModel& net, const std::vector<Complex>& v) {
    const int n = net.bus_count();
    std::vector<std::vector<Complex>> y(n, std::vector<Complex>(n));
    for (const Line& l : net.lines) {
        if (!l.in_service) continue;
        const Complex ys = 1.0 / Complex(l.r1, l.x1);
        y[l.from][l.from] += ys + Complex(0, l.b1 / 2);
        y[l.to][l.to] += ys + Complex(0, l.b1 / 2);
        y[l.from][l.to] -= ys;
        y[l.to][l.from] -= ys;
    }
    std::vector<Complex> s(n);
    for (int i = 0; i < n; ++i) {
        Complex current = 0.0;
        for (int k = 0; k < n; ++k) current += y[i][k] * v[k];
        s[i] = v[i] * std::conj(current);
    }
    return s;
}

}  // namespace

TEST(SolveNr, ZeroLoadNetworkStaysFlat) {
    NetworkModel net = ieee14();
    for (Bus& b : net.buses) {
        b.load = 0.0;
        b.p_gen = 0.0;
        b.v_set = 1.0;
    }
    for (Line& l : net.lines) l.b1 = 0.0;
    const PowerFlowSolution pf = solve_nr(net, 1e-10, 10);
    EXPECT_LE(pf.iterations, 1);
    for (const Complex& v : pf.v) EXPECT_LT(std::abs(v - Complex(1.0, 0.0)), 1e-12);
}

TEST(SolveNr, TwoBusMatchesClosedFormQuadratic) {
    const double p = 0.5, q = 0.2, x = 0.1, v1 = 1.0;
    // Receiving-end magnitude from V^4 + (2Qx - V1^2) V^2 + x^2 (P^2 + Q^2) = 0, upper root.
    const double b = v1 * v1 - 2.0 * q * x;
    const double vr = std::sqrt((b + std::sqrt(b * b - 4.0 * x * x * (p * p + q * q))) / 2.0);
    const double delta = -std::asin(p * x / (v1 * vr));

    const PowerFlowSolution pf = solve_nr(two_bus(p, q), 1e-12, 20);
    EXPECT_NEAR(std::abs(pf.v[1]), vr, 1e-9);
    EXPECT_NEAR(std::arg(pf.v[1]), delta, 1e-9);
    EXPECT_EQ(pf.v[0], Complex(1.0, 0.0));
}

TEST(SolveNr, Ieee14ConvergesAndPassesIndependentMismatch) {
    const NetworkModel& net = ieee14();
    const PowerFlowSolution pf = solve_nr(net, 1e-8, 10);
    EXPECT_LE(pf.iterations, 10);
    EXPECT_LE(pf.max_mismatch, 1e-8);

    const std::vector<Complex> s = injections_by_loops(net, pf.v);
    for (const Bus& b : net.buses) {
        if (b.kind == BusKind::Slack) {
            EXPECT_EQ(pf.v[b.id], Complex(b.v_set, 0.0));
            continue;
        }
        const double p_spec = (b.kind == BusKind::PV ? b.p_gen : 0.0) - b.load.real();
        EXPECT_LE(std::abs(s[b.id].real() - p_spec), 1e-8) << b.id;
        if (b.kind == BusKind::PQ) EXPECT_LE(std::abs(s[b.id].imag() + b.load.imag()), 1e-8) << b.id;
        if (b.kind == BusKind::PV) EXPECT_NEAR(std::abs(pf.v[b.id]), b.v_set, 1e-10);
    }
}

TEST(Mismatch, AgreesWithLoopRecomputation) {
    const NetworkModel& net = ieee14();
    std::vector<Complex> v(net.bus_count());
    for (int i = 0; i < net.bus_count(); ++i) v[i] = std::polar(1.0 + 0.01 * i, -0.02 * i);
    const std::vector<double> r = mismatch(net, v);
    const std::vector<Complex> s = injections_by_loops(net, v);
    const std::vector<Complex> spec = scheduled_injection(net);
    size_t k = 0;
    for (const Bus& b : net.buses)
        if (b.kind != BusKind::Slack) EXPECT_NEAR(r[k++], spec[b.id].real() - s[b.id].real(), 1e-12);
    for (const Bus& b : net.buses)
        if (b.kind == BusKind::PQ) EXPECT_NEAR(r[k++], spec[b.id].imag() - s[b.id].imag(), 1e-12);
    EXPECT_EQ(k, r.size());
}

TEST(Mismatch, FlatStartLosslessGivesMinusLoad) {
    NetworkModel net = ieee14();
    for (Line& l : net.lines) {
        l.r1 = 0.0;
        l.b1 = 0.0;
    }
    std::vector<Complex> flat(net.bus_count(), Complex(1.0, 0.0));
    const std::vector<double> r = mismatch(net, flat);
    // dP entries follow the non-slack buses in order; bus 3 (index 3) is the third of them.
    EXPECT_DOUBLE_EQ(r[2], -net.buses[3].load.real());
    EXPECT_DOUBLE_EQ(r[3], -net.buses[4].load.real());
}

TEST(Mismatch, IndependentOfSlackBusContent) {
    NetworkModel net = ieee14();
    const PowerFlowSolution pf = solve_nr(net);
    const std::vector<double> before = mismatch(net, pf.v);
    net.buses[0].load = Complex(0.7, 0.3);
    net.buses[0].v_set = 1.02;
    EXPECT_EQ(mismatch(net, pf.v), before);
    EXPECT_LE(*std::max_element(before.begin(), before.end()), 1e-10);
}

TEST(SolveNr, QuadraticConvergenceSignature) {
    const PowerFlowSolution pf = solve_nr(ieee14(), 1e-13, 20);
    const auto& h = pf.residual_history;
    ASSERT_GE(h.size(), 4u);
    // Late iterations: each residual is far below the previous one.
    for (size_t i = h.size() - 3; i + 1 < h.size(); ++i) {
        if (h[i + 1] < 1e-13) break;
        EXPECT_LT(h[i + 1] / h[i], 0.05) << i;
    }
    EXPECT_LT(h[2] / h[1], 0.05);
}

TEST(SolveNr, DeterministicBitIdentical) {
    const PowerFlowSolution a = solve_nr(ieee14());
    const PowerFlowSolution b = solve_nr(ieee14());
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveNr, ReportsNonConvergence) {
    try {
        solve_nr(ieee14(), 1e-12, 1);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.final_mismatch(), 1e-12);
    }
    EXPECT_THROW(solve_nr(ieee14(), 0.0, 10), ValidationError);
}
