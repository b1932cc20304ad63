#include <gtest/gtest.h>

#include <numeric>
#include <string>

#include "gridsentinel/network.hpp"

using namespace gridsentinel;

namespace {

const char* kTwoBus = R"({
  "base_mva": 100,
  "buses": [
    {"id": 0, "kind": "slack", "load": [0, 0], "v_set": 1.0},
    {"id": 1, "kind": "pq", "load": [0.5, 0.2]}
  ],
  "lines": [{"id": 0, "from": 0, "to": 1, "r1": 0, "x1": 0.1, "b1": 0, "r0": 0, "x0": 0.3}],
  "gens": [{"bus": 0, "x1s": 0.2, "x2": 0.2, "x0": 0.1, "grounded": true}]
})";

CaseErrorKind error_kind(const std::string& text) {
    try {
        load_case(text);
    } catch (const CaseError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected CaseError";
    return CaseErrorKind::Syntax;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

// Union-find connectivity, kept separate from the library's BFS.
bool connected_without(const NetworkModel& net, int skip) {
    std::vector<int> parent(net.bus_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Line& l : net.lines)
        if (l.in_service && l.id != skip) parent[find(l.from)] = find(l.to);
    const int root = find(0);
    for (int b = 0; b < net.bus_count(); ++b)
        if (find(b) != root) return false;
    return true;
}

}  // namespace

TEST(LoadCase, EmbeddedIeee14HasFourteenBusesAndTwentyLines) {
    const NetworkModel& net = ieee14();
    EXPECT_EQ(net.bus_count(), 14);
    EXPECT_EQ(net.line_count(), 20);
    EXPECT_EQ(net.in_service_line_count(), 20);
    EXPECT_EQ(net.slack_bus(), 0);
    EXPECT_EQ(net.gens.size(), 5u);
    for (const Line& l : net.lines) {
        EXPECT_DOUBLE_EQ(l.x0, 3.0 * l.x1);
        EXPECT_DOUBLE_EQ(l.r0, 3.0 * l.r1);
    }
}

TEST(LoadCase, MinimalTwoBusCaseIsValid) {
    const NetworkModel net = load_case(kTwoBus);
    EXPECT_EQ(net.bus_count(), 2);
    EXPECT_EQ(net.line_count(), 1);
}

TEST(LoadCase, DistinctValidationErrors) {
    EXPECT_EQ(error_kind(replace(kTwoBus, R"("kind": "pq")", R"("kind": "slack")")),
              CaseErrorKind::MultipleSlack);
    EXPECT_EQ(error_kind(replace(replace(kTwoBus, R"("kind": "slack", "load": [0, 0], "v_set": 1.0)",
                                         R"("kind": "pq", "load": [0, 0])"),
                                 R"("gens": [{"bus": 0, "x1s": 0.2, "x2": 0.2, "x0": 0.1, "grounded": true}])",
                                 R"("gens": [])")),
              CaseErrorKind::MissingSlack);
    EXPECT_EQ(error_kind(replace(kTwoBus, R"({"id": 1, "kind")", R"({"id": 0, "kind")")),
              CaseErrorKind::DuplicateId);
    EXPECT_EQ(error_kind(replace(kTwoBus, R"("lines": [{"id": 0, "from": 0, "to": 1, "r1": 0, "x1": 0.1, "b1": 0, "r0": 0, "x0": 0.3}])",
                                 R"("lines": [])")),
              CaseErrorKind::Disconnected);
    EXPECT_EQ(error_kind(replace(kTwoBus, R"("x1": 0.1)", R"("x1": "big")")), CaseErrorKind::Schema);
    EXPECT_EQ(error_kind(replace(kTwoBus, R"("base_mva": 100,)", "")), CaseErrorKind::Schema);
    EXPECT_EQ(error_kind("{ not json"), CaseErrorKind::Syntax);
    EXPECT_EQ(error_kind(replace(kTwoBus, R"("x0": 0.3)", R"("x0": 0.01)")), CaseErrorKind::BadValue);
}

TEST(LoadCase, SerializeRoundTrip) {
    const NetworkModel& net = ieee14();
    const NetworkModel again = load_case(serialize_case(net));
    EXPECT_EQ(again, net);
    const NetworkModel outaged = apply_outage(net, 4);
    EXPECT_EQ(load_case(serialize_case(outaged)), outaged);
}

TEST(BuildYbus, SingleLineAnalytic) {
    const NetworkModel net = load_case(kTwoBus);
    const Eigen::MatrixXcd y = build_ybus(net, SequenceDomain::Positive);
    EXPECT_EQ(y(0, 1), Complex(0.0, 10.0));
    EXPECT_EQ(y(1, 0), Complex(0.0, 10.0));
    EXPECT_EQ(y(0, 0), Complex(0.0, -10.0));
    const Eigen::MatrixXcd y0 = build_ybus(net, SequenceDomain::Zero);
    EXPECT_NEAR(std::abs(y0(0, 1) - Complex(0.0, 1.0 / 0.3)), 0.0, 1e-14);
}

TEST(BuildYbus, ExactlySymmetric) {
    for (auto domain : {SequenceDomain::Positive, SequenceDomain::Zero})
        for (bool gens : {false, true}) {
            const Eigen::MatrixXcd y = build_ybus(ieee14(), domain, gens);
            EXPECT_EQ((y - y.transpose()).cwiseAbs().maxCoeff(), 0.0);
        }
}

TEST(BuildYbus, RowsSumToZeroWithoutShunts) {
    NetworkModel net = ieee14();
    for (Line& l : net.lines) l.b1 = 0.0;
    const Eigen::MatrixXcd y = build_ybus(net, SequenceDomain::Positive);
    for (int r = 0; r < y.rows(); ++r) EXPECT_LT(std::abs(y.row(r).sum()), 1e-12) << r;
}

TEST(ApplyOutage, MatchesIndependentConnectivityOracle) {
    const NetworkModel& net = ieee14();
    int rejected = 0;
    for (const Line& l : net.lines) {
        const bool ok = connected_without(net, l.id);
        if (ok) {
            const NetworkModel n1 = apply_outage(net, l.id);
            EXPECT_FALSE(n1.lines[l.id].in_service);
            EXPECT_EQ(n1.in_service_line_count(), 19);
        } else {
            ++rejected;
            try {
                apply_outage(net, l.id);
                ADD_FAILURE() << "outage of line " << l.id << " should disconnect";
            } catch (const OutageError& e) {
                EXPECT_EQ(e.kind(), OutageErrorKind::Disconnects);
            }
        }
    }
    // Bus 8 (index 7) hangs off the single 7-8 branch.
    EXPECT_EQ(rejected, 1);
    EXPECT_FALSE(connected_without(net, 13));
}

TEST(ApplyOutage, ErrorPaths) {
    const NetworkModel two = load_case(kTwoBus);
    try {
        apply_outage(two, 0);
        FAIL();
    } catch (const OutageError& e) {
        EXPECT_EQ(e.kind(), OutageErrorKind::Disconnects);
    }
    const NetworkModel once = apply_outage(ieee14(), 0);
    try {
        apply_outage(once, 0);
        FAIL();
    } catch (const OutageError& e) {
        EXPECT_EQ(e.kind(), OutageErrorKind::AlreadyOut);
    }
    try {
        apply_outage(ieee14(), 20);
        FAIL();
    } catch (const OutageError& e) {
        EXPECT_EQ(e.kind(), OutageErrorKind::UnknownLine);
    }
}

TEST(ApplyOutage, YbusDiffersOnlyByRemovedStamps) {
    const NetworkModel& net = ieee14();
    const Eigen::MatrixXcd base = build_ybus(net, SequenceDomain::Positive);
    for (const Line& l : net.lines) {
        if (!connected_without(net, l.id)) continue;
        Eigen::MatrixXcd expected = base;
        const Complex ys = 1.0 / l.z1();
        const Complex sh(0.0, 0.5 * l.b1);
        expected(l.from, l.from) -= ys + sh;
        expected(l.to, l.to) -= ys + sh;
        expected(l.from, l.to) += ys;
        expected(l.to, l.from) += ys;
        const Eigen::MatrixXcd got = build_ybus(apply_outage(net, l.id), SequenceDomain::Positive);
        EXPECT_LE((got - expected).cwiseAbs().maxCoeff(), 1e-15 * std::max(1.0, base.cwiseAbs().maxCoeff()))
            << "line " << l.id;
    }
}
