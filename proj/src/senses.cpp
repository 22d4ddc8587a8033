#include "playroom/senses.hpp"

#include <cmath>
#include <limits>

namespace playroom {

int Observation::flat_size(const SenseParams& params) {
    int n = 2 * params.n_rays * 4 + 10;
    if (params.modality == Modality::Multimodal) n += 20;
    return n;
}

std::vector<double> Observation::flatten() const {
    std::vector<double> out;
    out.reserve(vision.eyes[0].size() * 8 + 30);
    for (const auto& eye : vision.eyes)
        for (const auto& s : eye) {
            out.push_back(s.r);
            out.push_back(s.g);
            out.push_back(s.b);
            out.push_back(s.depth);
        }
    if (audio)
        for (int c = 0; c < 10; ++c) {
            out.push_back(audio->left[static_cast<size_t>(c)]);
            out.push_back(audio->right[static_cast<size_t>(c)]);
        }
    for (double v : target_onehot) out.push_back(v);
    return out;
}

namespace {

// distance to the room boundary along (cos a, sin a) from an interior point
double wall_distance(double ox, double oy, double a, double side) {
    double cx = std::cos(a), cy = std::sin(a);
    double best = std::numeric_limits<double>::infinity();
    if (cx > 1e-12) best = std::fmin(best, (side - ox) / cx);
    if (cx < -1e-12) best = std::fmin(best, (0.0 - ox) / cx);
    if (cy > 1e-12) best = std::fmin(best, (side - oy) / cy);
    if (cy < -1e-12) best = std::fmin(best, (0.0 - oy) / cy);
    if (!std::isfinite(best)) best = 0.0;
    return std::fmax(0.0, best);
}

// nearest positive intersection of a ray with a disc, or +inf
double disc_distance(double ox, double oy, double a, const ObjectInstance& obj) {
    double cx = std::cos(a), cy = std::sin(a);
    double fx = ox - obj.x, fy = oy - obj.y;
    double b = fx * cx + fy * cy;
    double c = fx * fx + fy * fy - obj.radius * obj.radius;
    double disc = b * b - c;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    double t = -b - std::sqrt(disc);
    if (t < 0.0) t = -b + std::sqrt(disc);  // eye inside the disc
    if (t < 0.0) return std::numeric_limits<double>::infinity();
    return t;
}

}  // namespace

RaySample cast_ray(double ox, double oy, double angle, const EpisodeState& state,
                   const EnvConfig& env, const SenseParams& params) {
    double best = wall_distance(ox, oy, angle, env.room_side);
    int hit = -1;
    for (size_t i = 0; i < state.objects.size(); ++i) {
        double d = disc_distance(ox, oy, angle, state.objects[i]);
        if (d < best) {
            best = d;
            hit = static_cast<int>(i);
        }
    }
    RaySample s;
    if (hit >= 0) {
        auto rgb = object_rgb(state.objects[static_cast<size_t>(hit)]);
        s.r = rgb[0];
        s.g = rgb[1];
        s.b = rgb[2];
    } else {
        s.r = kWallRgb[0];
        s.g = kWallRgb[1];
        s.b = kWallRgb[2];
    }
    s.depth = std::fmin(1.0, best / params.max_range);
    return s;
}

VisionObs render_vision(const EpisodeState& state, const EnvConfig& env,
                        const SenseParams& params) {
    VisionObs obs;
    double half = deg_to_rad(params.fov_half_angle_deg);
    double hx = std::cos(state.pose.heading), hy = std::sin(state.pose.heading);
    // left eye offset is +90 degrees from heading
    double lx = -hy * params.eye_baseline * 0.5, ly = hx * params.eye_baseline * 0.5;
    for (int eye = 0; eye < 2; ++eye) {
        double ox = state.pose.x + (eye == 0 ? lx : -lx);
        double oy = state.pose.y + (eye == 0 ? ly : -ly);
        auto& rays = obs.eyes[static_cast<size_t>(eye)];
        rays.reserve(static_cast<size_t>(params.n_rays));
        for (int i = 0; i < params.n_rays; ++i) {
            // leftmost ray first
            double frac = (params.n_rays > 1)
                              ? 1.0 - 2.0 * static_cast<double>(i) / (params.n_rays - 1)
                              : 0.0;
            double angle = state.pose.heading + half * frac;
            rays.push_back(cast_ray(ox, oy, angle, state, env, params));
        }
    }
    return obs;
}

AudioObs render_audio(const EpisodeState& state, const SenseParams& params) {
    (void)params;
    AudioObs obs;
    for (const auto& obj : state.objects) {
        double d = std::hypot(obj.x - state.pose.x, obj.y - state.pose.y);
        double gain = 1.0 / (1.0 + d);
        double bearing = relative_bearing(state.pose, obj.x, obj.y);
        double pan = std::sin(bearing);  // D11
        size_t c = static_cast<size_t>(obj.category);
        obs.left[c] = gain * (1.0 + pan) * 0.5;
        obs.right[c] = gain * (1.0 - pan) * 0.5;
    }
    return obs;
}

Observation observe(const EpisodeState& state, const EnvConfig& env, const SenseParams& params) {
    Observation obs;
    obs.vision = render_vision(state, env, params);
    if (params.modality == Modality::Multimodal) obs.audio = render_audio(state, params);
    obs.target_onehot[static_cast<size_t>(state.target().category)] = 1.0;
    return obs;
}

EyesightStatus eyesight_status(const EpisodeState& state, const SenseParams& params) {
    const auto& t = state.target();
    double bearing = relative_bearing(state.pose, t.x, t.y);
    if (std::fabs(bearing) > deg_to_rad(params.fov_half_angle_deg)) return EyesightStatus::Out;
    return bearing >= 0.0 ? EyesightStatus::Left : EyesightStatus::Right;  // D9
}

}  // namespace playroom
