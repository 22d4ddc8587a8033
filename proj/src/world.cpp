#include "playroom/world.hpp"

#include <stdexcept>

namespace playroom {

double relative_bearing(const Pose& pose, double px, double py) {
    double dx = px - pose.x;
    double dy = py - pose.y;
    if (dx == 0.0 && dy == 0.0) return 0.0;
    return wrap_angle(std::atan2(dy, dx) - pose.heading);
}

Reach reach_status(const EpisodeState& state, const EnvConfig& config) {
    double half = deg_to_rad(config.facing_half_angle_deg);
    double best_dist = 0.0;
    int best = -1;
    for (size_t i = 0; i < state.objects.size(); ++i) {
        const auto& obj = state.objects[i];
        double d = std::hypot(obj.x - state.pose.x, obj.y - state.pose.y);
        if (d >= config.reach_radius) continue;
        double bearing = relative_bearing(state.pose, obj.x, obj.y);
        if (std::fabs(bearing) > half) continue;
        // nearer object wins; equal distance -> target wins
        if (best < 0 || d < best_dist ||
            (d == best_dist && static_cast<int>(i) == state.target_index)) {
            best = static_cast<int>(i);
            best_dist = d;
        }
    }
    if (best < 0) return Reach::None;
    return best == state.target_index ? Reach::Target : Reach::Wrong;
}

Environment::Environment(const EnvConfig& config) : config_(config) {
    if (config_.room_side <= 0.0 || config_.max_frames <= 0 || config_.max_speed <= 0.0)
        throw std::invalid_argument("Environment: invalid config");
    if (config_.num_objects < 1 || config_.num_objects > 2)
        throw std::invalid_argument("Environment: num_objects must be 1 or 2");
}

EpisodeState Environment::reset(uint64_t seed) {
    Rng rng(seed);
    const double side = config_.room_side;
    const double sep = config_.min_separation;
    const int n = config_.num_objects;

    // rejection-sample agent and object positions with pairwise separation
    constexpr int kMaxAttempts = 10000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(static_cast<size_t>(n) + 1);
        bool ok = true;
        for (int i = 0; i < n + 1 && ok; ++i) {
            double px = rng.uniform(0.0, side);
            double py = rng.uniform(0.0, side);
            for (const auto& [qx, qy] : pts) {
                if (std::hypot(px - qx, py - qy) < sep) {
                    ok = false;
                    break;
                }
            }
            if (ok) pts.emplace_back(px, py);
        }
        if (!ok) continue;

        EpisodeState state;
        state.pose.x = pts[0].first;
        state.pose.y = pts[0].second;
        state.pose.heading = wrap_angle(rng.uniform(-kPi, kPi));  // D5

        // distinct categories within the episode
        int cat0 = rng.uniform_int(0, 9);
        int cat1 = cat0;
        while (n > 1 && cat1 == cat0) cat1 = rng.uniform_int(0, 9);
        for (int i = 0; i < n; ++i) {
            ObjectInstance obj;
            obj.category = (i == 0) ? cat0 : cat1;
            obj.color = static_cast<ObjectColor>(rng.uniform_int(0, 2));
            obj.x = pts[static_cast<size_t>(i) + 1].first;
            obj.y = pts[static_cast<size_t>(i) + 1].second;
            obj.radius = config_.object_radius;
            state.objects.push_back(obj);
        }
        state.target_index = (n > 1) ? rng.uniform_int(0, 1) : 0;
        state.frame = 0;
        state.done = false;
        return state;
    }
    throw std::invalid_argument("Environment::reset: rejection sampling failed; "
                                "min_separation infeasible for room_side");
}

std::pair<EpisodeState, StepOutcome> Environment::step(const EpisodeState& state,
                                                       const Action& action) const {
    if (state.done) throw std::logic_error("Environment::step: episode already done");

    Action a = action.clamped();
    EpisodeState next = state;

    next.pose.heading = wrap_angle(state.pose.heading + a.a_r * deg_to_rad(config_.turn_rate_deg));
    double dist = a.a_f * config_.max_speed;
    double nx = next.pose.x + dist * std::cos(next.pose.heading);
    double ny = next.pose.y + dist * std::sin(next.pose.heading);
    // clamp at walls, component-wise slide
    next.pose.x = std::fmin(config_.room_side, std::fmax(0.0, nx));
    next.pose.y = std::fmin(config_.room_side, std::fmax(0.0, ny));
    next.frame = state.frame + 1;

    StepOutcome out;
    out.reach = reach_status(next, config_);
    if (out.reach != Reach::None) {
        out.terminal = true;
        out.reward = (out.reach == Reach::Target) ? 1.0 : -1.0;
        next.done = true;
    } else if (next.frame >= config_.max_frames) {
        out.truncated = true;
        next.done = true;
    }
    return {next, out};
}

}  // namespace playroom
