#include "gridsentinel/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridsentinel {

using nlohmann::json;

std::vector<std::string> feature_schema(int frames, int buses) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(frames) * buses * kFieldsPerBus);
    for (int f = 0; f < frames; ++f)
        for (int b = 0; b < buses; ++b)
            for (const char* field : kBusFieldNames)
                names.push_back("f" + std::to_string(f) + "_b" + std::to_string(b) + "_" + field);
    return names;
}

std::string schema_hash(const std::vector<std::string>& schema) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (const std::string& name : schema) {
        for (char c : name) feed(static_cast<unsigned char>(c));
        feed('\n');
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> featurize(const EventWindow& window) {
    check_window_shape(window);
    std::vector<double> x;
    x.reserve(static_cast<size_t>(window.frame_count()) * window.bus_count() * kFieldsPerBus);
    for (const Frame& frame : window.frames)
        for (const BusMeasurement& m : frame) {
            for (int p = 0; p < 3; ++p) x.push_back(m.v[p].mag);
            for (int p = 0; p < 3; ++p) x.push_back(m.v[p].ang);
            for (int p = 0; p < 3; ++p) x.push_back(m.i[p].mag);
            for (int p = 0; p < 3; ++p) x.push_back(m.i[p].ang);
            x.push_back(m.f);
        }
    return x;
}

std::vector<double> featurize(const EventWindow& window, const std::vector<std::string>& schema) {
    check_window_shape(window);
    const size_t expected = static_cast<size_t>(window.frame_count()) * window.bus_count() * kFieldsPerBus;
    if (expected != schema.size() || feature_schema(window.frame_count(), window.bus_count()) != schema)
        throw ValidationError("window shape (" + std::to_string(window.frame_count()) + " frames x " +
                              std::to_string(window.bus_count()) + " buses) does not match the feature schema");
    return featurize(window);
}

namespace {

EventRecord record_fault(const FaultSpec& f, int target) {
    return {f.line, f.d, f.zf, class_index(f.type), target};
}

FaultSpec fault_of(const EventRecord& r) { return {r.line, r.d, fault_type_from_class(r.ftype), r.zf}; }

}  // namespace

Provenance provenance_of(const EventScenario& s, std::uint64_t seed) {
    Provenance p;
    p.kind = s.kind;
    p.outage = s.outage.value_or(-1);
    p.seed = seed;
    std::vector<EventRecord> events;
    for (const FaultSpec& f : s.faults) events.push_back(record_fault(f, -1));
    for (const AttackSpec& a : s.attacks) events.push_back(record_fault(a.donor, a.target_bus));
    if (!events.empty()) p.first = events[0];
    if (events.size() > 1) p.second = events[1];
    if (!s.attacks.empty()) p.attack_kind = to_string(s.attacks.front().kind);
    return p;
}

EventScenario scenario_from(const Provenance& p) {
    EventScenario s;
    s.kind = p.kind;
    if (p.outage >= 0) s.outage = p.outage;
    const AttackKind ak = p.attack_kind.empty() ? AttackKind::Replay : parse_attack_kind(p.attack_kind);
    auto add = [&](const EventRecord& r) {
        if (r.line < 0) return;
        if (r.target_bus >= 0)
            s.attacks.push_back({r.target_bus, fault_of(r), ak});
        else
            s.faults.push_back(fault_of(r));
    };
    add(p.first);
    add(p.second);
    return s;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> y;
    y.reserve(samples.size());
    for (const LabeledSample& s : samples) y.push_back(s.label);
    return y;
}

std::vector<EventScenario> enumerate_campaign(const NetworkModel& net, const CampaignConfig& cfg) {
    const EnumerationOptions opt{cfg.n_normal};
    switch (cfg.campaign) {
        case Campaign::Single: return enumerate_single(net, opt);
        case Campaign::N1: return enumerate_n1(net, cfg.outage, opt);
        case Campaign::Simultaneous: return enumerate_simultaneous(net, cfg.k_simultaneous, cfg.noise.seed, opt);
    }
    return {};
}

namespace {

Dataset prepare(const NetworkModel& net, const CampaignConfig& cfg, std::vector<EventScenario>& scenarios,
                GridContext& ctx) {
    cfg.windowing.validate();
    cfg.noise.validate();
    if (cfg.n_normal < 0) throw ValidationError("normal-sample count must be non-negative");
    scenarios = enumerate_campaign(net, cfg);
    ctx = GridContext::make(net, cfg.campaign == Campaign::N1 ? std::optional<int>(cfg.outage) : std::nullopt);

    Dataset data;
    data.schema = feature_schema(cfg.windowing.frames(), net.bus_count());
    data.samples.resize(scenarios.size());
    DatasetMeta& m = data.meta;
    m.generator_version = kGeneratorVersion;
    m.master_seed = cfg.noise.seed;
    m.campaign = cfg.campaign;
    m.outage = ctx.outage.value_or(-1);
    m.windowing = cfg.windowing;
    m.noise = cfg.noise;
    for (const EventScenario& s : scenarios) {
        switch (s.kind) {
            case ScenarioKind::Normal: ++m.n_normal; break;
            case ScenarioKind::Fault: ++m.n_fault; break;
            case ScenarioKind::Attack: ++m.n_attack; break;
            default: ++m.n_simultaneous;
        }
    }
    return data;
}

LabeledSample make_sample(const GridContext& ctx, const EventScenario& s, const CampaignConfig& cfg,
                          std::size_t index) {
    const std::uint64_t seed = scenario_seed(cfg.noise.seed, index);
    const EventWindow w = synthesize_window(ctx, s, cfg.windowing, cfg.noise, seed);
    const Labels l = labels_for(s, cfg.campaign);
    return {featurize(w), l.event12, l.combined202, l.target, provenance_of(s, seed)};
}

void finish(Dataset& data) {
    for (const LabeledSample& s : data.samples) ++data.meta.counts[s.label];
}

}  // namespace

Dataset generate_dataset(const NetworkModel& net, const CampaignConfig& cfg) {
    std::vector<EventScenario> scenarios;
    GridContext ctx;
    Dataset data = prepare(net, cfg, scenarios, ctx);
    const long n = static_cast<long>(scenarios.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        try {
            data.samples[i] = make_sample(ctx, scenarios[i], cfg, static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    finish(data);
    return data;
}

Dataset generate_dataset_serial(const NetworkModel& net, const CampaignConfig& cfg) {
    std::vector<EventScenario> scenarios;
    GridContext ctx;
    Dataset data = prepare(net, cfg, scenarios, ctx);
    for (std::size_t i = 0; i < scenarios.size(); ++i) data.samples[i] = make_sample(ctx, scenarios[i], cfg, i);
    finish(data);
    return data;
}

void validate_dataset(const Dataset& data) {
    std::map<int, int> counts;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const LabeledSample& s = data.samples[i];
        const std::string at = "sample " + std::to_string(i) + ": ";
        if (s.features.size() != data.schema.size()) throw ValidationError(at + "feature length differs from schema");
        for (double x : s.features)
            if (!std::isfinite(x)) throw ValidationError(at + "non-finite feature");
        if (s.event12 < 0 || s.event12 >= kEventClassCount) throw ValidationError(at + "event12 out of range");
        if (s.combined202 < 0 || s.combined202 >= kCombinedClassCount)
            throw ValidationError(at + "combined202 out of range");
        const bool consistent =
            (s.combined202 == kNormalClass) == (s.event12 == kNormalClass) &&
            (s.combined202 == kAttackCombinedClass) == (s.event12 == kAttackEventClass) &&
            (s.combined202 < 1 || s.combined202 > 200 ||
             decode_combined(s.combined202).type == fault_type_from_class(s.event12));
        if (!consistent) throw ValidationError(at + "event12 and combined202 disagree");
        ++counts[s.label];
    }
    if (counts != data.meta.counts) throw ValidationError("meta class counts do not match samples");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr const char* kLabelColumns[] = {"event12", "combined202", "label"};
constexpr const char* kProvenanceColumns[] = {"kind", "line", "d", "zf", "ftype", "target_bus",
                                              "line2", "d2", "zf2", "ftype2", "target_bus2",
                                              "attack", "outage", "seed"};

void put_double(std::string& out, double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

template <class T>
void put_int(std::string& out, T x) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

void put_record(std::string& out, const EventRecord& r) {
    put_int(out, r.line);
    out += ',';
    put_double(out, r.d);
    out += ',';
    put_double(out, r.zf);
    out += ',';
    put_int(out, r.ftype);
    out += ',';
    put_int(out, r.target_bus);
}

class RowReader {
public:
    RowReader(std::string_view row, std::size_t line) : row_(row), line_(line) {}

    std::string_view next() {
        if (pos_ > row_.size()) fail("too few columns");
        const std::size_t comma = row_.find(',', pos_);
        const std::size_t end = comma == std::string_view::npos ? row_.size() : comma;
        std::string_view cell = row_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return cell;
    }
    double real() {
        const std::string_view c = next();
        double x = 0.0;
        auto res = std::from_chars(c.data(), c.data() + c.size(), x);
        if (res.ec != std::errc() || res.ptr != c.data() + c.size()) fail("bad number '" + std::string(c) + "'");
        return x;
    }
    template <class T>
    T integer() {
        const std::string_view c = next();
        T x{};
        auto res = std::from_chars(c.data(), c.data() + c.size(), x);
        if (res.ec != std::errc() || res.ptr != c.data() + c.size()) fail("bad integer '" + std::string(c) + "'");
        return x;
    }
    EventRecord record() {
        EventRecord r;
        r.line = integer<int>();
        r.d = real();
        r.zf = real();
        r.ftype = integer<int>();
        r.target_bus = integer<int>();
        return r;
    }
    void finish() {
        if (pos_ <= row_.size()) fail("too many columns");
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw ValidationError("CSV row " + std::to_string(line_) + ": " + why);
    }

private:
    std::string_view row_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

DatasetMeta derive_meta(const Dataset& data) {
    DatasetMeta m;
    m.generator_version = kGeneratorVersion;
    for (const LabeledSample& s : data.samples) {
        ++m.counts[s.label];
        switch (s.provenance.kind) {
            case ScenarioKind::Normal: ++m.n_normal; break;
            case ScenarioKind::Fault: ++m.n_fault; break;
            case ScenarioKind::Attack: ++m.n_attack; break;
            default: ++m.n_simultaneous;
        }
    }
    return m;
}

}  // namespace

std::string to_csv(const Dataset& data) {
    std::string out;
    out.reserve(data.samples.size() * (data.schema.size() * 22 + 128) + 64 * data.schema.size());
    for (const std::string& name : data.schema) {
        out += name;
        out += ',';
    }
    for (const char* c : kLabelColumns) {
        out += c;
        out += ',';
    }
    for (std::size_t i = 0; i < std::size(kProvenanceColumns); ++i) {
        out += kProvenanceColumns[i];
        out += i + 1 < std::size(kProvenanceColumns) ? ',' : '\n';
    }
    for (const LabeledSample& s : data.samples) {
        for (double x : s.features) {
            put_double(out, x);
            out += ',';
        }
        put_int(out, s.event12);
        out += ',';
        put_int(out, s.combined202);
        out += ',';
        put_int(out, s.label);
        out += ',';
        out += to_string(s.provenance.kind);
        out += ',';
        put_record(out, s.provenance.first);
        out += ',';
        put_record(out, s.provenance.second);
        out += ',';
        out += s.provenance.attack_kind;
        out += ',';
        put_int(out, s.provenance.outage);
        out += ',';
        put_int(out, s.provenance.seed);
        out += '\n';
    }
    return out;
}

Dataset from_csv(const std::string& text) {
    Dataset data;
    std::size_t pos = 0, line_no = 0;
    auto next_line = [&](std::string_view& row) {
        if (pos >= text.size()) return false;
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        row = std::string_view(text).substr(pos, end - pos);
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view header;
    if (!next_line(header)) throw ValidationError("CSV is empty");
    std::vector<std::string> columns;
    {
        std::size_t p = 0;
        while (p <= header.size()) {
            std::size_t c = header.find(',', p);
            if (c == std::string_view::npos) c = header.size();
            columns.emplace_back(header.substr(p, c - p));
            p = c + 1;
        }
    }
    const std::size_t tail = std::size(kLabelColumns) + std::size(kProvenanceColumns);
    if (columns.size() < tail) throw ValidationError("CSV header is missing label/provenance columns");
    const std::size_t nfeat = columns.size() - tail;
    for (std::size_t i = 0; i < std::size(kLabelColumns); ++i)
        if (columns[nfeat + i] != kLabelColumns[i]) throw ValidationError("CSV header: expected column '" + std::string(kLabelColumns[i]) + "'");
    for (std::size_t i = 0; i < std::size(kProvenanceColumns); ++i)
        if (columns[nfeat + 3 + i] != kProvenanceColumns[i])
            throw ValidationError("CSV header: expected column '" + std::string(kProvenanceColumns[i]) + "'");
    data.schema.assign(columns.begin(), columns.begin() + static_cast<long>(nfeat));

    std::string_view row;
    while (next_line(row)) {
        if (row.empty()) continue;
        RowReader r(row, line_no);
        LabeledSample s;
        s.features.resize(nfeat);
        for (std::size_t i = 0; i < nfeat; ++i) s.features[i] = r.real();
        s.event12 = r.integer<int>();
        s.combined202 = r.integer<int>();
        s.label = r.integer<int>();
        try {
            s.provenance.kind = parse_scenario_kind(std::string(r.next()));
        } catch (const ValidationError& e) {
            r.fail(e.what());
        }
        s.provenance.first = r.record();
        s.provenance.second = r.record();
        s.provenance.attack_kind = std::string(r.next());
        s.provenance.outage = r.integer<int>();
        s.provenance.seed = r.integer<std::uint64_t>();
        r.finish();
        data.samples.push_back(std::move(s));
    }
    data.meta = derive_meta(data);
    return data;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("error writing '" + path + "'");
}

std::string meta_to_json(const DatasetMeta& m) {
    json counts = json::object();
    for (const auto& [label, n] : m.counts) counts[std::to_string(label)] = n;
    json doc = {{"generator_version", m.generator_version},
                {"master_seed", m.master_seed},
                {"campaign", to_string(m.campaign)},
                {"outage", m.outage},
                {"n_fault", m.n_fault},
                {"n_attack", m.n_attack},
                {"n_normal", m.n_normal},
                {"n_simultaneous", m.n_simultaneous},
                {"windowing", {{"n_pre", m.windowing.n_pre}, {"n_fault", m.windowing.n_fault},
                               {"frame_rate", m.windowing.frame_rate}}},
                {"noise", {{"sigma_mag", m.noise.sigma_mag}, {"sigma_ang", m.noise.sigma_ang},
                           {"sigma_freq", m.noise.sigma_freq}, {"seed", m.noise.seed}}},
                {"counts", counts}};
    return doc.dump(2);
}

DatasetMeta meta_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        DatasetMeta m;
        m.generator_version = doc.at("generator_version").get<std::string>();
        m.master_seed = doc.at("master_seed").get<std::uint64_t>();
        m.campaign = parse_campaign(doc.at("campaign").get<std::string>());
        m.outage = doc.at("outage").get<int>();
        m.n_fault = doc.at("n_fault").get<int>();
        m.n_attack = doc.at("n_attack").get<int>();
        m.n_normal = doc.at("n_normal").get<int>();
        m.n_simultaneous = doc.at("n_simultaneous").get<int>();
        const json& w = doc.at("windowing");
        m.windowing = {w.at("n_pre").get<int>(), w.at("n_fault").get<int>(), w.at("frame_rate").get<double>()};
        const json& n = doc.at("noise");
        m.noise = {n.at("sigma_mag").get<double>(), n.at("sigma_ang").get<double>(), n.at("sigma_freq").get<double>(),
                   n.at("seed").get<std::uint64_t>()};
        for (auto it = doc.at("counts").begin(); it != doc.at("counts").end(); ++it)
            m.counts[std::stoi(it.key())] = it.value().get<int>();
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("dataset meta: ") + e.what());
    }
}

void write_csv(const Dataset& data, const std::string& path) {
    write_text_file(path, to_csv(data));
    write_text_file(path + ".meta.json", meta_to_json(data.meta));
}

Dataset read_csv(const std::string& path) {
    Dataset data = from_csv(read_text_file(path));
    std::ifstream probe(path + ".meta.json");
    if (probe) {
        DatasetMeta meta = meta_from_json(read_text_file(path + ".meta.json"));
        if (meta.counts != data.meta.counts) throw ValidationError("dataset meta counts do not match '" + path + "'");
        data.meta = meta;
    }
    return data;
}

}  // namespace gridsentinel
