#pragma once

#include <array>
#include <optional>
#include <vector>

#include "playroom/world.hpp"

namespace playroom {

enum class Modality { Unimodal, Multimodal };

struct SenseParams {
    int n_rays = 32;
    double fov_half_angle_deg = 45.0;  // D12
    double eye_baseline = 0.2;
    double max_range = 26.0;  // room diagonal
    Modality modality = Modality::Unimodal;
};

// one sample per ray: r, g, b, normalized hit distance
struct RaySample {
    double r = 0.0, g = 0.0, b = 0.0, depth = 1.0;
};

struct VisionObs {
    // eyes[0] = left eye, eyes[1] = right eye; rays ordered left-to-right across the FOV
    std::array<std::vector<RaySample>, 2> eyes;
};

struct AudioObs {
    // stereo gains per category channel
    std::array<double, 10> left{};
    std::array<double, 10> right{};
};

struct Observation {
    VisionObs vision;
    std::optional<AudioObs> audio;
    std::array<double, 10> target_onehot{};

    // flat layout: vision (eye-major, ray-major, rgbd) + audio (channel-major, l/r) + one-hot
    std::vector<double> flatten() const;
    static int flat_size(const SenseParams& params);
};

enum class EyesightStatus { Out, Left, Right };

// rendered disc albedo: categories map to distinct brightness levels so the
// ray scan carries object identity, not just tint
inline double category_albedo(int category) { return 0.25 + 0.75 * category / 9.0; }

inline std::array<double, 3> object_rgb(const ObjectInstance& obj) {
    double a = category_albedo(obj.category);
    switch (obj.color) {
        case ObjectColor::Red: return {a, 0.0, 0.0};
        case ObjectColor::Green: return {0.0, a, 0.0};
        default: return {0.0, 0.0, a};
    }
}

constexpr std::array<double, 3> kWallRgb = {0.5, 0.5, 0.5};

VisionObs render_vision(const EpisodeState& state, const EnvConfig& env, const SenseParams& params);
AudioObs render_audio(const EpisodeState& state, const SenseParams& params);
Observation observe(const EpisodeState& state, const EnvConfig& env, const SenseParams& params);
EyesightStatus eyesight_status(const EpisodeState& state, const SenseParams& params);

// first hit of a ray against the walls and object discs; returns distance and color
RaySample cast_ray(double ox, double oy, double angle, const EpisodeState& state,
                   const EnvConfig& env, const SenseParams& params);

}  // namespace playroom
