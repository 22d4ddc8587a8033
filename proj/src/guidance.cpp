#include "playroom/guidance.hpp"

#include <cmath>
#include <stdexcept>

namespace playroom {

std::string to_string(GuidanceKind kind) {
    switch (kind) {
        case GuidanceKind::Sparse: return "sparse";
        case GuidanceKind::Helper: return "helper";
        default: return "behavior_clone";
    }
}

GuidanceKind guidance_kind_from_string(const std::string& name) {
    if (name == "sparse") return GuidanceKind::Sparse;
    if (name == "helper") return GuidanceKind::Helper;
    if (name == "behavior_clone" || name == "bc") return GuidanceKind::BehaviorClone;
    throw std::invalid_argument("unknown guidance kind: " + name);
}

double helper_reward(EyesightStatus status, const Action& action,
                     const HelperCoefficients& coeffs) {
    switch (status) {
        case EyesightStatus::Out:
            return coeffs.penalty_blind * action.a_f;
        case EyesightStatus::Left:
            return coeffs.turn_bonus * action.a_r + coeffs.forward_bonus * action.a_f;
        default:  // Right
            return -coeffs.turn_bonus * action.a_r + coeffs.forward_bonus * action.a_f;
    }
}

double effective_reward(const GuidanceSchedule& schedule, int64_t frame, double base,
                        EyesightStatus status, const Action& action,
                        const HelperCoefficients& coeffs) {
    if (schedule.kind == GuidanceKind::Helper && schedule.active(frame))
        return base + helper_reward(status, action, coeffs);
    return base;  // Sparse and BehaviorClone leave the reward untouched
}

Action mentor_action(const EpisodeState& state, const SenseParams& params) {
    EyesightStatus status = eyesight_status(state, params);
    Action a;
    if (status == EyesightStatus::Out) {
        a.a_f = 0.0;
        a.a_r = 1.0;  // full search turn
        return a;
    }
    const auto& t = state.target();
    double bearing = relative_bearing(state.pose, t.x, t.y);
    double half = deg_to_rad(params.fov_half_angle_deg);
    a.a_f = 1.0;
    a.a_r = 0.25 * bearing / half;  // proportional tracking toward the target
    return a.clamped();
}

namespace {

// solves (A + ridge I) x = b for symmetric positive semi-definite A, in place
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, int n,
                              double ridge) {
    for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] += ridge;
    // Cholesky A = L L^T
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<size_t>(i) * n + k] * a[static_cast<size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("solve_spd: matrix not positive definite");
                a[static_cast<size_t>(i) * n + j] = std::sqrt(s);
            } else {
                a[static_cast<size_t>(i) * n + j] = s / a[static_cast<size_t>(j) * n + j];
            }
        }
    }
    // forward then backward substitution
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<size_t>(i)];
        for (int k = 0; k < i; ++k) s -= a[static_cast<size_t>(i) * n + k] * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = s / a[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<size_t>(i)];
        for (int k = i + 1; k < n; ++k)
            s -= a[static_cast<size_t>(k) * n + i] * b[static_cast<size_t>(k)];
        b[static_cast<size_t>(i)] = s / a[static_cast<size_t>(i) * n + i];
    }
    return b;
}

}  // namespace

PotentialFitReport is_potential_based(const std::vector<double>& shaping,
                                      const std::vector<uint8_t>& support, int n_states,
                                      int n_actions, double gamma, double tol) {
    if (n_states <= 0 || n_actions <= 0) throw std::invalid_argument("is_potential_based: empty MDP");
    size_t expected = static_cast<size_t>(n_states) * n_actions * n_states;
    if (shaping.size() != expected || support.size() != expected)
        throw std::invalid_argument("is_potential_based: shape mismatch");

    // residual term per supported triple: F(s,a,s') - (gamma*phi(s') - phi(s))
    std::vector<double> ata(static_cast<size_t>(n_states) * n_states, 0.0);
    std::vector<double> atb(static_cast<size_t>(n_states), 0.0);
    size_t count = 0;
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            for (int s2 = 0; s2 < n_states; ++s2) {
                size_t idx = (static_cast<size_t>(s) * n_actions + a) * n_states + s2;
                if (!support[idx]) continue;
                ++count;
                double f = shaping[idx];
                // row coefficients: +gamma at s2, -1 at s (combined when s2 == s)
                if (s2 == s) {
                    double c = gamma - 1.0;
                    ata[static_cast<size_t>(s) * n_states + s] += c * c;
                    atb[static_cast<size_t>(s)] += c * f;
                } else {
                    ata[static_cast<size_t>(s2) * n_states + s2] += gamma * gamma;
                    ata[static_cast<size_t>(s) * n_states + s] += 1.0;
                    ata[static_cast<size_t>(s2) * n_states + s] += -gamma;
                    ata[static_cast<size_t>(s) * n_states + s2] += -gamma;
                    atb[static_cast<size_t>(s2)] += gamma * f;
                    atb[static_cast<size_t>(s)] += -f;
                }
            }
        }
    }
    if (count == 0) throw std::invalid_argument("is_potential_based: empty support");

    PotentialFitReport report;
    report.potential = solve_spd(ata, atb, n_states, 1e-12);

    double ss = 0.0;
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            for (int s2 = 0; s2 < n_states; ++s2) {
                size_t idx = (static_cast<size_t>(s) * n_actions + a) * n_states + s2;
                if (!support[idx]) continue;
                double pred = gamma * report.potential[static_cast<size_t>(s2)] -
                              report.potential[static_cast<size_t>(s)];
                double r = shaping[idx] - pred;
                ss += r * r;
            }
    report.residual = std::sqrt(ss / static_cast<double>(count));
    report.representable = report.residual < tol;
    return report;
}

}  // namespace playroom
