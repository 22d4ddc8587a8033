#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "playroom/rng.hpp"

namespace playroom {

constexpr double kPi = 3.14159265358979323846;

// wrap to the canonical interval [-pi, pi)
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

inline double deg_to_rad(double d) { return d * kPi / 180.0; }

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // radians in [-pi, pi)
};

struct Action {
    double a_f = 0.0;  // forward drive, [0, 1]
    double a_r = 0.0;  // turn drive, [-1, 1]; positive turns left

    Action clamped() const {
        Action c;
        c.a_f = std::fmin(1.0, std::fmax(0.0, a_f));
        c.a_r = std::fmin(1.0, std::fmax(-1.0, a_r));
        return c;
    }
};

enum class ObjectColor : int { Red = 0, Green = 1, Blue = 2 };

struct ObjectInstance {
    int category = 0;  // [0, 9]
    ObjectColor color = ObjectColor::Red;
    double x = 0.0;
    double y = 0.0;
    double radius = 0.5;
};

struct EpisodeState {
    Pose pose;
    std::vector<ObjectInstance> objects;  // two by default (one in the single-object variant)
    int target_index = 0;
    int frame = 0;
    bool done = false;

    const ObjectInstance& target() const { return objects[static_cast<size_t>(target_index)]; }
};

enum class Reach { None, Target, Wrong };

struct StepOutcome {
    double reward = 0.0;  // sparse component only
    bool terminal = false;
    bool truncated = false;
    Reach reach = Reach::None;
};

struct EnvConfig {
    double room_side = 18.0;
    double min_separation = 4.0;
    double reach_radius = 2.5;
    int max_frames = 256;
    double max_speed = 0.33;
    double facing_half_angle_deg = 45.0;  // D1
    double turn_rate_deg = 9.0;           // D2
    double object_radius = 0.5;           // D7
    int num_objects = 2;                  // 1 selects the single-object variant
};

// signed angle from the pose heading to a world point; positive = point on the left
double relative_bearing(const Pose& pose, double px, double py);

Reach reach_status(const EpisodeState& state, const EnvConfig& config);

// One environment instance; owns its RNG, deterministic given the seed.
class Environment {
public:
    explicit Environment(const EnvConfig& config);

    EpisodeState reset(uint64_t seed);
    std::pair<EpisodeState, StepOutcome> step(const EpisodeState& state, const Action& action) const;

    const EnvConfig& config() const { return config_; }

private:
    EnvConfig config_;
};

}  // namespace playroom
