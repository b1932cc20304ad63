#include <gtest/gtest.h>

#include "gridsentinel/analysis.hpp"
#include "gridsentinel/dataset.hpp"
#include "gridsentinel/selection.hpp"
#include "physics_sample.hpp"

using namespace gridsentinel;

namespace {

const GridContext& ctx() {
    static const GridContext c = GridContext::make(ieee14());
    return c;
}

}  // namespace

TEST(Deviation, CleanNormalWindowHasNoDeviation) {
    const DeviationSummary s = deviation_localize(clean_normal_window(ctx(), {}));
    EXPECT_TRUE(s.exceed.empty());
    ASSERT_EQ(s.ranked.size(), 14u);
    for (const BusDeviation& b : s.ranked) EXPECT_EQ(b.max_dev, 0.0);
    for (std::size_t i = 0; i < s.ranked.size(); ++i) EXPECT_EQ(s.ranked[i].bus, static_cast<int>(i));  // stable
}

TEST(Deviation, HandBuiltWindow) {
    EventWindow w = clean_normal_window(ctx(), {2, 2, 30.0});
    for (Frame& f : w.frames)
        for (BusMeasurement& m : f)
            for (PolarPhasor& v : m.v) v.mag = 1.0;
    w.frames[3][5].v[1].mag = 0.9;   // 0.10
    w.frames[2][2].v[0].mag = 1.06;  // 0.06
    w.frames[2][7].v[2].mag = 0.97;  // 0.03, below tau
    const DeviationSummary s = deviation_localize(w, 0.05);
    EXPECT_EQ(s.exceed, (std::vector<int>{2, 5}));
    EXPECT_EQ(s.ranked[0].bus, 5);
    EXPECT_NEAR(s.ranked[0].max_dev, 0.1, 1e-15);
    EXPECT_EQ(s.ranked[1].bus, 2);
    EXPECT_EQ(s.ranked[2].bus, 7);
    EXPECT_EQ(deviation_localize(w, 0.2).exceed.size(), 0u);
}

TEST(Deviation, NeedsPreTripFrame) {
    EventWindow w = clean_normal_window(ctx(), {});
    w.trip_index = 0;
    EXPECT_THROW(deviation_localize(w), ValidationError);
    EXPECT_THROW(deviation_localize(EventWindow{}), ValidationError);
}

TEST(Deviation, PhysicsOnSeededSamples) {
    for (const EventWindow& w : sample::windows(ctx(), sample::Kind::Normal, 200, 42))
        EXPECT_TRUE(deviation_localize(w).exceed.empty());
    std::vector<EventScenario> sc;
    const auto attacks = sample::windows(ctx(), sample::Kind::Attack, 200, 42, &sc);
    for (std::size_t i = 0; i < attacks.size(); ++i)
        EXPECT_EQ(deviation_localize(attacks[i]).exceed, (std::vector<int>{sc[i].attacks[0].target_bus}));
    for (const EventWindow& w : sample::windows(ctx(), sample::Kind::BoltedFault, 200, 42))
        EXPECT_GE(deviation_localize(w).exceed.size(), 2u);
}

namespace {

struct Trained {
    Dataset data;
    SplitIndices split;
    TrainedModel model;
};

const Trained& knn_model() {
    static const Trained t = [] {
        Trained r;
        CampaignConfig cfg;
        r.data = generate_dataset(ieee14(), cfg);
        const Matrix raw = feature_matrix(r.data);
        const LabelVector y = r.data.labels();
        r.split = split_indices(y, 0.9, 42, true);
        r.model = train_model(take_rows(raw, r.split.train), take(y, r.split.train), schema_hash(r.data.schema),
                              KnnConfig{1, 1.0}, {{"campaign", "single"}});
        return r;
    }();
    return t;
}

}  // namespace

TEST(Analyze, DecisionFollowsCombinedClass) {
    const Trained& t = knn_model();
    // Replay the exact training windows: a 1-NN model returns their labels.
    const std::vector<EventScenario> all = enumerate_campaign(ieee14(), CampaignConfig{});
    int seen_fault = 0, seen_attack = 0, seen_normal = 0;
    for (std::size_t i : t.split.train) {
        const LabeledSample& s = t.data.samples[i];
        if ((s.combined202 == 37 && seen_fault) || (s.combined202 == kAttackCombinedClass && seen_attack) ||
            (s.combined202 == 0 && seen_normal) || (s.combined202 != 37 && s.combined202 != 0 && s.combined202 != 201))
            continue;
        const GridContext c = GridContext::make(ieee14(), all[i].outage);
        const EventWindow w = synthesize_window(c, all[i], {}, {}, scenario_seed(42, i));
        const Verdict v = analyze(t.model, w, kDefaultTau, "knn-test");
        EXPECT_EQ(v.combined202, s.combined202);
        EXPECT_EQ(v.event12, s.event12);
        const nlohmann::json j = verdict_to_json(v);
        if (s.combined202 == 37) {
            ++seen_fault;
            EXPECT_EQ(v.decision, Verdict::Decision::Fault);
            EXPECT_EQ(v.line, 3);
            EXPECT_EQ(v.ftype, FaultType::AB);  // class index 7
            EXPECT_FALSE(j.at("decision").contains("suspect_bus"));
        } else if (s.combined202 == kAttackCombinedClass) {
            ++seen_attack;
            EXPECT_EQ(v.decision, Verdict::Decision::CyberAttack);
            ASSERT_TRUE(v.suspect_bus.has_value());
            EXPECT_EQ(*v.suspect_bus, all[i].attacks[0].target_bus);
            EXPECT_TRUE(v.agreement);
            EXPECT_EQ(j.at("decision").at("suspect_bus"), *v.suspect_bus);
        } else {
            ++seen_normal;
            EXPECT_EQ(v.decision, Verdict::Decision::Normal);
            EXPECT_TRUE(v.agreement);
            EXPECT_FALSE(v.suspect_bus.has_value());
        }
    }
    EXPECT_EQ(seen_fault + seen_attack + seen_normal, 3);
}

TEST(Analyze, NeverCrashesOnCampaignWindows) {
    const Trained& t = knn_model();
    const std::vector<EventScenario> all = enumerate_campaign(ieee14(), CampaignConfig{});
    Rng rng(5);
    const GridContext& c = ctx();
    for (int n = 0; n < 1000; ++n) {
        const std::size_t i = rng.below(all.size());
        const EventWindow w = synthesize_window(c, all[i], {}, {}, scenario_seed(42, i));
        const Verdict v = analyze(t.model, w, kDefaultTau, "knn-test");
        EXPECT_EQ(v.suspect_bus.has_value(), v.decision == Verdict::Decision::CyberAttack);
    }
}

TEST(Analyze, RejectsSchemaMismatchAndSimultaneousModels) {
    const Trained& t = knn_model();
    const EventWindow shorter = clean_normal_window(ctx(), {2, 3, 30.0});
    EXPECT_THROW(analyze(t.model, shorter), ValidationError);
    TrainedModel sim = t.model;
    sim.train_meta["campaign"] = "simultaneous";
    EXPECT_THROW(analyze(sim, clean_normal_window(ctx(), {})), ValidationError);
}
