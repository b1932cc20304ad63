#include "gridsentinel/window.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "gridsentinel/rng.hpp"

namespace gridsentinel {

using nlohmann::json;

namespace {

constexpr const char* kVoltageKeys[3] = {"va", "vb", "vc"};
constexpr const char* kCurrentKeys[3] = {"ia", "ib", "ic"};

// Below this magnitude the angle of a current phasor is numerical noise.
constexpr double kAngleFloor = 1e-9;

PolarPhasor read_phasor(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("window: missing '") + key + "'");
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ValidationError(std::string("window: '") + key + "' must be [mag, ang]");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

void WindowingConfig::validate() const {
    if (n_pre < 1 || n_fault < 1) throw ValidationError("window needs at least one pre-trip and one fault frame");
    if (!(frame_rate > 0.0)) throw ValidationError("frame rate must be positive");
}

void NoiseConfig::validate() const {
    if (sigma_mag < 0.0 || sigma_ang < 0.0 || sigma_freq < 0.0)
        throw ValidationError("noise standard deviations must be non-negative");
}

double normalize_angle_deg(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    return a;
}

PolarPhasor to_polar(Complex z) {
    const double mag = std::abs(z);
    if (mag < kAngleFloor) return {mag, 0.0};
    return {mag, normalize_angle_deg(std::arg(z) * 180.0 / std::numbers::pi)};
}

BusMeasurement measure(const Phasor3& v, const Phasor3& i, double f) {
    BusMeasurement m;
    for (int p = 0; p < 3; ++p) {
        m.v[p] = to_polar(v[p]);
        m.i[p] = to_polar(i[p]);
    }
    m.f = f;
    return m;
}

void apply_noise(EventWindow& window, const NoiseConfig& noise, std::uint64_t seed) {
    if (noise.sigma_mag == 0.0 && noise.sigma_ang == 0.0 && noise.sigma_freq == 0.0) return;
    Rng rng(seed);
    auto perturb = [&](PolarPhasor& ph) {
        ph.mag = std::max(0.0, ph.mag * (1.0 + noise.sigma_mag * rng.normal()));
        ph.ang = normalize_angle_deg(ph.ang + noise.sigma_ang * rng.normal());
    };
    for (Frame& frame : window.frames)
        for (BusMeasurement& m : frame) {
            for (PolarPhasor& ph : m.v) perturb(ph);
            for (PolarPhasor& ph : m.i) perturb(ph);
            m.f += noise.sigma_freq * rng.normal();
        }
}

void check_window_shape(const EventWindow& window) {
    if (window.frames.empty()) throw ValidationError("window has no frames");
    const size_t buses = window.frames.front().size();
    if (buses == 0) throw ValidationError("window has no buses");
    for (const Frame& f : window.frames)
        if (f.size() != buses) throw ValidationError("window frames have inconsistent bus counts");
    if (window.trip_index < 0 || window.trip_index > window.frame_count())
        throw ValidationError("window trip index out of range");
}

std::string window_to_json(const EventWindow& window) {
    json doc;
    doc["frame_rate"] = window.frame_rate;
    doc["trip_index"] = window.trip_index;
    json frames = json::array();
    for (const Frame& frame : window.frames) {
        json jf = json::object();
        for (size_t b = 0; b < frame.size(); ++b) {
            const BusMeasurement& m = frame[b];
            json jb;
            for (int p = 0; p < 3; ++p) {
                jb[kVoltageKeys[p]] = {m.v[p].mag, m.v[p].ang};
                jb[kCurrentKeys[p]] = {m.i[p].mag, m.i[p].ang};
            }
            jb["f"] = m.f;
            jf[std::to_string(b)] = jb;
        }
        frames.push_back(jf);
    }
    doc["frames"] = frames;
    return doc.dump();
}

EventWindow window_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("window parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("frames") || !doc.at("frames").is_array())
        throw ValidationError("window: missing 'frames' array");
    EventWindow w;
    if (doc.contains("frame_rate")) w.frame_rate = doc.at("frame_rate").get<double>();
    if (!doc.contains("trip_index") || !doc.at("trip_index").is_number_integer())
        throw ValidationError("window: missing integer 'trip_index'");
    w.trip_index = doc.at("trip_index").get<int>();
    for (const json& jf : doc.at("frames")) {
        if (!jf.is_object()) throw ValidationError("window: frame must be an object keyed by bus id");
        Frame frame(jf.size());
        for (auto it = jf.begin(); it != jf.end(); ++it) {
            size_t bus = 0;
            try {
                size_t used = 0;
                bus = std::stoul(it.key(), &used);
                if (used != it.key().size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ValidationError("window: bad bus key '" + it.key() + "'");
            }
            if (bus >= frame.size()) throw ValidationError("window: bus ids must be dense 0..n-1");
            const json& jb = it.value();
            BusMeasurement& m = frame[bus];
            for (int p = 0; p < 3; ++p) {
                m.v[p] = read_phasor(jb, kVoltageKeys[p]);
                m.i[p] = read_phasor(jb, kCurrentKeys[p]);
            }
            if (!jb.contains("f") || !jb.at("f").is_number()) throw ValidationError("window: missing 'f'");
            m.f = jb.at("f").get<double>();
        }
        w.frames.push_back(std::move(frame));
    }
    check_window_shape(w);
    return w;
}

}  // namespace gridsentinel
