#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridsentinel/synthesis.hpp"

namespace gridsentinel {

/// Per-bus fields in featurization order.
inline constexpr const char* kBusFieldNames[13] = {"vmag_a", "vmag_b", "vmag_c", "vang_a", "vang_b",
                                                   "vang_c", "imag_a", "imag_b", "imag_c", "iang_a",
                                                   "iang_b", "iang_c", "freq"};
inline constexpr int kFieldsPerBus = 13;

/// Feature names, frame-major then bus then the 13 per-bus fields.
std::vector<std::string> feature_schema(int frames, int buses);

/// 64-bit FNV-1a over the newline-joined names, as 16 hex digits.
std::string schema_hash(const std::vector<std::string>& schema);

/// Flattens a window; throws ValidationError when its shape does not match the schema.
std::vector<double> featurize(const EventWindow& window, const std::vector<std::string>& schema);
std::vector<double> featurize(const EventWindow& window);

struct EventRecord {
    int line = -1;
    double d = 0.0;
    double zf = 0.0;
    int ftype = 0;
    int target_bus = -1;

    bool operator==(const EventRecord&) const = default;
};

struct Provenance {
    ScenarioKind kind = ScenarioKind::Normal;
    EventRecord first;
    EventRecord second;
    std::string attack_kind;  // "replay" / "fdi" for attack scenarios, empty otherwise
    int outage = -1;
    std::uint64_t seed = 0;

    bool operator==(const Provenance&) const = default;
};

Provenance provenance_of(const EventScenario& s, std::uint64_t seed);
EventScenario scenario_from(const Provenance& p);

struct LabeledSample {
    std::vector<double> features;
    int event12 = 0;
    int combined202 = 0;
    int label = 0;  // training target of the campaign (combined202, or the 4-class simultaneous label)
    Provenance provenance;

    bool operator==(const LabeledSample&) const = default;
};

struct DatasetMeta {
    std::string generator_version;
    std::uint64_t master_seed = 0;
    Campaign campaign = Campaign::Single;
    int outage = -1;
    int n_fault = 0;
    int n_attack = 0;
    int n_normal = 0;
    int n_simultaneous = 0;
    WindowingConfig windowing;
    NoiseConfig noise;
    std::map<int, int> counts;  // per training label

    bool operator==(const DatasetMeta&) const = default;
};

struct Dataset {
    std::vector<std::string> schema;
    std::vector<LabeledSample> samples;
    DatasetMeta meta;

    std::size_t size() const { return samples.size(); }
    std::size_t feature_count() const { return schema.size(); }
    std::vector<int> labels() const;
    bool operator==(const Dataset&) const = default;
};

struct CampaignConfig {
    Campaign campaign = Campaign::Single;
    int outage = 6;  // N-1 campaign: line 4-5
    int n_normal = 320;
    int k_simultaneous = 1200;
    WindowingConfig windowing;
    NoiseConfig noise;
};

inline constexpr const char* kGeneratorVersion = "gridsentinel-dataset/1";

std::vector<EventScenario> enumerate_campaign(const NetworkModel& net, const CampaignConfig& cfg);

/// Synthesizes and featurizes every scenario. OpenMP-parallel over scenarios; each
/// scenario owns its RNG stream, so the result does not depend on the thread count.
Dataset generate_dataset(const NetworkModel& net, const CampaignConfig& cfg);

/// Single-threaded reference for generate_dataset.
Dataset generate_dataset_serial(const NetworkModel& net, const CampaignConfig& cfg);

void write_csv(const Dataset& data, const std::string& path);
Dataset read_csv(const std::string& path);
std::string to_csv(const Dataset& data);
Dataset from_csv(const std::string& text);

/// JSON sidecar written next to the CSV (`<csv>.meta.json`).
std::string meta_to_json(const DatasetMeta& meta);
DatasetMeta meta_from_json(const std::string& text);

/// Checks the label-consistency and schema invariants; throws ValidationError.
void validate_dataset(const Dataset& data);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gridsentinel
