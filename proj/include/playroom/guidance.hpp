#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playroom/senses.hpp"
#include "playroom/world.hpp"

namespace playroom {

enum class GuidanceKind { Sparse, Helper, BehaviorClone };

std::string to_string(GuidanceKind kind);
GuidanceKind guidance_kind_from_string(const std::string& name);

struct GuidanceSchedule {
    GuidanceKind kind = GuidanceKind::Sparse;
    int64_t t_g = 0;       // initial morphing time, frames
    int64_t duration = 0;  // frames

    bool active(int64_t frame) const { return frame >= t_g && frame < t_g + duration; }
};

struct HelperCoefficients {
    double penalty_blind = -0.03;
    double turn_bonus = 0.05;
    double forward_bonus = 0.03;
};

double helper_reward(EyesightStatus status, const Action& action, const HelperCoefficients& coeffs);

double effective_reward(const GuidanceSchedule& schedule, int64_t frame, double base,
                        EyesightStatus status, const Action& action,
                        const HelperCoefficients& coeffs);

// Scripted mentor: search turn when the target is out of sight, otherwise walk
// forward while turning toward the target in proportion to its bearing.
Action mentor_action(const EpisodeState& state, const SenseParams& params);

struct PotentialFitReport {
    bool representable = false;
    double residual = 0.0;            // root-mean-square over fitted triples
    std::vector<double> potential;    // best-fit potential per state
};

// Least-squares fit of a potential to a shaping term F(s,a,s'), restricted to
// transitions where the support mask (same layout as F) is true. F is indexed
// [s * n_actions * n_states + a * n_states + s'].
PotentialFitReport is_potential_based(const std::vector<double>& shaping,
                                      const std::vector<uint8_t>& support, int n_states,
                                      int n_actions, double gamma, double tol = 1e-9);

}  // namespace playroom
