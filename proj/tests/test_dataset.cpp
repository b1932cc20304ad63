#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "gridsentinel/dataset.hpp"

using namespace gridsentinel;

namespace {

const Dataset& single_dataset() {
    static const Dataset data = generate_dataset(ieee14(), CampaignConfig{});
    return data;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gridsentinel_" + name)).string();
}

}  // namespace

TEST(Schema, DefaultLayoutAndHash) {
    const auto schema = feature_schema(6, 14);
    ASSERT_EQ(schema.size(), 1092u);
    EXPECT_EQ(schema[0], "f0_b0_vmag_a");
    EXPECT_EQ(schema[12], "f0_b0_freq");
    EXPECT_EQ(schema[13], "f0_b1_vmag_a");
    EXPECT_EQ(schema.back(), "f5_b13_freq");
    EXPECT_EQ(schema_hash(schema), schema_hash(feature_schema(6, 14)));
    EXPECT_NE(schema_hash(schema), schema_hash(feature_schema(7, 14)));
    EXPECT_EQ(schema_hash(schema).size(), 16u);
}

TEST(Featurize, OrderFollowsSchema) {
    const GridContext ctx = GridContext::make(ieee14());
    EventScenario s{ScenarioKind::Fault, {FaultSpec{4, 0.6, FaultType::CG, 0.05}}, {}, std::nullopt};
    const EventWindow w = synthesize_window(ctx, s, {}, {}, 17);
    const auto schema = feature_schema(6, 14);
    const std::vector<double> x = featurize(w, schema);
    ASSERT_EQ(x.size(), schema.size());
    const int f = 3, b = 9;
    const size_t base = (static_cast<size_t>(f) * 14 + b) * 13;
    EXPECT_EQ(x[base + 1], w.frames[f][b].v[1].mag);
    EXPECT_EQ(x[base + 5], w.frames[f][b].v[2].ang);
    EXPECT_EQ(x[base + 6], w.frames[f][b].i[0].mag);
    EXPECT_EQ(x[base + 11], w.frames[f][b].i[2].ang);
    EXPECT_EQ(x[base + 12], w.frames[f][b].f);
    EXPECT_THROW(featurize(w, feature_schema(5, 14)), ValidationError);
}

TEST(Enumerate, SingleCampaignCountsAndClasses) {
    const auto sc = enumerate_single(ieee14());
    ASSERT_EQ(sc.size(), 6720u);
    std::map<int, int> combined;
    int faults = 0, attacks = 0, normals = 0;
    for (const EventScenario& s : sc) {
        ++combined[labels_for(s, Campaign::Single).combined202];
        faults += s.kind == ScenarioKind::Fault;
        attacks += s.kind == ScenarioKind::Attack;
        normals += s.kind == ScenarioKind::Normal;
        for (const AttackSpec& a : s.attacks) EXPECT_EQ(a.target_bus, ieee14().lines[a.donor.line].from);
    }
    EXPECT_EQ(faults, 3200);
    EXPECT_EQ(attacks, 3200);
    EXPECT_EQ(normals, 320);
    EXPECT_EQ(combined.size(), 202u);
    for (int c = 1; c <= 200; ++c) EXPECT_EQ(combined[c], 16) << c;
}

TEST(Enumerate, N1SkipsOutagedLine) {
    const auto sc = enumerate_n1(ieee14(), 6);
    int faults = 0;
    for (const EventScenario& s : sc) {
        ASSERT_EQ(s.outage, 6);
        for (const FaultSpec& f : s.faults) EXPECT_NE(f.line, 6);
        for (const AttackSpec& a : s.attacks) EXPECT_NE(a.donor.line, 6);
        faults += s.kind == ScenarioKind::Fault;
    }
    EXPECT_EQ(faults, 3040);
    EXPECT_EQ(sc.size(), 3040u * 2 + 320);
    EXPECT_THROW(enumerate_n1(ieee14(), 13), OutageError);
}

TEST(Enumerate, SimultaneousStratifiedDistinctAndSeeded) {
    const NetworkModel& net = ieee14();
    const auto sc = enumerate_simultaneous(net, 1200, 42);
    EXPECT_EQ(sc, enumerate_simultaneous(net, 1200, 42));
    EXPECT_NE(sc, enumerate_simultaneous(net, 1200, 43));
    std::map<int, int> counts;
    for (const EventScenario& s : sc) {
        ++counts[labels_for(s, Campaign::Simultaneous).target];
        std::vector<int> lines;
        for (const FaultSpec& f : s.faults) lines.push_back(f.line);
        for (const AttackSpec& a : s.attacks) lines.push_back(a.donor.line);
        if (s.kind != ScenarioKind::Normal) {
            ASSERT_EQ(lines.size(), 2u);
            EXPECT_NE(lines[0], lines[1]);
        }
        if (s.kind == ScenarioKind::DualAttack) EXPECT_NE(s.attacks[0].target_bus, s.attacks[1].target_bus);
    }
    EXPECT_EQ(counts[1], 400);
    EXPECT_EQ(counts[2], 400);
    EXPECT_EQ(counts[3], 400);
    EXPECT_EQ(counts[0], 320);
    EXPECT_THROW(enumerate_simultaneous(net, 0, 1), ValidationError);
}

TEST(Labels, CombinedEncodingRoundTrips) {
    for (int line = 0; line < 20; ++line)
        for (FaultType t : kAllFaultTypes) {
            const int c = combined_class(line, t);
            const DecodedClass d = decode_combined(c);
            EXPECT_EQ(d.kind, DecodedClass::Kind::Fault);
            EXPECT_EQ(d.line, line);
            EXPECT_EQ(d.type, t);
        }
    EXPECT_EQ(decode_combined(37).line, 3);
    EXPECT_EQ(class_index(decode_combined(37).type), 7);
    EXPECT_EQ(decode_combined(0).kind, DecodedClass::Kind::Normal);
    EXPECT_EQ(decode_combined(201).kind, DecodedClass::Kind::Attack);
    EXPECT_THROW(decode_combined(202), ValidationError);
}

TEST(Dataset, SingleCampaignInvariants) {
    const Dataset& data = single_dataset();
    ASSERT_EQ(data.size(), 6720u);
    EXPECT_EQ(data.feature_count(), 1092u);
    EXPECT_NO_THROW(validate_dataset(data));
    EXPECT_EQ(data.meta.n_fault, 3200);
    EXPECT_EQ(data.meta.n_attack, 3200);
    EXPECT_EQ(data.meta.n_normal, 320);
    EXPECT_EQ(data.meta.counts.size(), 202u);
    for (const LabeledSample& s : data.samples) {
        EXPECT_EQ(s.label, s.combined202);
        if (s.provenance.kind == ScenarioKind::Attack) {
            EXPECT_EQ(s.event12, 11);
            EXPECT_EQ(s.combined202, 201);
        }
    }
}

TEST(Dataset, ParallelMatchesSerialReference) {
    CampaignConfig cfg;
    cfg.campaign = Campaign::Simultaneous;
    cfg.k_simultaneous = 150;
    cfg.n_normal = 20;
    const Dataset par = generate_dataset(ieee14(), cfg);
    const Dataset ser = generate_dataset_serial(ieee14(), cfg);
    EXPECT_EQ(par, ser);
    EXPECT_NO_THROW(validate_dataset(par));
    EXPECT_EQ(par.meta.n_simultaneous, 150);
}

TEST(Dataset, ProvenanceReconstructsScenario) {
    const NetworkModel& net = ieee14();
    CampaignConfig cfg;
    cfg.campaign = Campaign::Simultaneous;
    cfg.k_simultaneous = 30;
    cfg.n_normal = 3;
    const auto scenarios = enumerate_campaign(net, cfg);
    const Dataset data = generate_dataset(net, cfg);
    for (size_t i = 0; i < scenarios.size(); ++i) {
        EXPECT_EQ(scenario_from(data.samples[i].provenance), scenarios[i]) << i;
        EXPECT_EQ(data.samples[i].provenance.seed, scenario_seed(cfg.noise.seed, i));
    }
    const auto single = enumerate_single(net, {});
    for (size_t i : {0ul, 3199ul, 3200ul, 6401ul, 6719ul})
        EXPECT_EQ(scenario_from(provenance_of(single[i], 1)), single[i]);
}

TEST(Csv, RoundTripAndByteDeterminism) {
    const Dataset& data = single_dataset();
    Dataset small;
    small.schema = data.schema;
    for (size_t i = 0; i < data.size(); i += 97) small.samples.push_back(data.samples[i]);
    small.meta = data.meta;
    small.meta.counts.clear();
    for (const LabeledSample& s : small.samples) ++small.meta.counts[s.label];

    const std::string path = temp_path("roundtrip.csv");
    write_csv(small, path);
    const Dataset back = read_csv(path);
    EXPECT_EQ(back, small);
    const std::string text = read_text_file(path);
    EXPECT_EQ(static_cast<size_t>(std::count(text.begin(), text.end(), '\n')), small.size() + 1);
    EXPECT_EQ(to_csv(back), text);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".meta.json");
}

TEST(Csv, RegenerationIsByteIdentical) {
    CampaignConfig cfg;
    cfg.campaign = Campaign::N1;
    const Dataset a = generate_dataset(ieee14(), cfg);
    const Dataset b = generate_dataset(ieee14(), cfg);
    EXPECT_EQ(to_csv(a), to_csv(b));
    EXPECT_EQ(meta_to_json(a.meta), meta_to_json(b.meta));
    EXPECT_EQ(a.meta.outage, 6);
    cfg.noise.seed = 43;
    EXPECT_NE(to_csv(generate_dataset(ieee14(), cfg)), to_csv(a));
}

TEST(Csv, MalformedInputIsRejected) {
    EXPECT_THROW(from_csv(""), ValidationError);
    EXPECT_THROW(from_csv("a,b\n1,2\n"), ValidationError);
    Dataset one;
    one.schema = {"x0", "x1"};
    LabeledSample s;
    s.features = {0.1, -2.5e-300};
    one.samples = {s};
    const std::string text = to_csv(one);
    EXPECT_EQ(from_csv(text).samples, one.samples);
    std::string bad = text;
    bad.replace(bad.find("0.10000000000000001"), 19, "zz");
    EXPECT_THROW(from_csv(bad), ValidationError);
    EXPECT_THROW(from_csv(text.substr(0, text.size() - 1) + ",7\n"), ValidationError);
    EXPECT_THROW(read_csv(temp_path("does_not_exist.csv")), IoError);
}

TEST(Meta, JsonRoundTrip) {
    const DatasetMeta& m = single_dataset().meta;
    EXPECT_EQ(meta_from_json(meta_to_json(m)), m);
    EXPECT_THROW(meta_from_json("{}"), ValidationError);
}

TEST(Dataset, NoNonFiniteFeaturesAcrossCampaigns) {
    CampaignConfig cfg;
    cfg.campaign = Campaign::Simultaneous;
    const Dataset sim = generate_dataset(ieee14(), cfg);
    EXPECT_EQ(sim.size(), 1520u);
    EXPECT_NO_THROW(validate_dataset(sim));
    EXPECT_NO_THROW(validate_dataset(single_dataset()));
}
