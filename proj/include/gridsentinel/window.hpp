#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridsentinel/fault.hpp"

namespace gridsentinel {

struct PolarPhasor {
    double mag = 0.0;
    double ang = 0.0;  // degrees, (-180, 180]

    bool operator==(const PolarPhasor&) const = default;
};

struct BusMeasurement {
    std::array<PolarPhasor, 3> v{};
    std::array<PolarPhasor, 3> i{};
    double f = 60.0;

    bool operator==(const BusMeasurement&) const = default;
};

using Frame = std::vector<BusMeasurement>;

/// Trip-aligned sequence of per-bus phasor frames; frames before trip_index are pre-fault.
struct EventWindow {
    std::vector<Frame> frames;
    int trip_index = 0;
    double frame_rate = 30.0;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int bus_count() const { return frames.empty() ? 0 : static_cast<int>(frames.front().size()); }
    bool operator==(const EventWindow&) const = default;
};

struct WindowingConfig {
    int n_pre = 2;
    int n_fault = 4;
    double frame_rate = 30.0;

    int frames() const { return n_pre + n_fault; }
    void validate() const;
    bool operator==(const WindowingConfig&) const = default;
};

struct NoiseConfig {
    double sigma_mag = 0.005;   // relative
    double sigma_ang = 0.1;     // degrees
    double sigma_freq = 0.002;  // Hz
    std::uint64_t seed = 42;

    static NoiseConfig off(std::uint64_t seed = 42) { return {0.0, 0.0, 0.0, seed}; }
    void validate() const;
    bool operator==(const NoiseConfig&) const = default;
};

double normalize_angle_deg(double deg);
PolarPhasor to_polar(Complex z);
BusMeasurement measure(const Phasor3& v, const Phasor3& i, double f);

/// Adds independent Gaussian noise to every magnitude, angle and frequency entry,
/// drawn in frame, bus, field order from one stream seeded with `seed`.
void apply_noise(EventWindow& window, const NoiseConfig& noise, std::uint64_t seed);

/// JSON: {"frame_rate", "trip_index", "frames": [{"<bus>": {"va": [mag, ang], ..., "f": hz}}]}.
std::string window_to_json(const EventWindow& window);
EventWindow window_from_json(std::string_view text);

void check_window_shape(const EventWindow& window);

}  // namespace gridsentinel
