#pragma once

#include <cstdint>
#include <vector>

#include "playroom/rng.hpp"

namespace playroom {

// finite MDP with dense transition tensor; the action set includes a no-op
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;  // including a_nop where applicable
    std::vector<double> transition;  // [s * A * S + a * S + s'], each row sums to 1
    std::vector<double> reward;      // [s * A + a]
    double gamma = 0.9;

    double t(int s, int a, int s2) const {
        return transition[(static_cast<size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& t(int s, int a, int s2) {
        return transition[(static_cast<size_t>(s) * n_actions + a) * n_states + s2];
    }
    double r(int s, int a) const { return reward[static_cast<size_t>(s) * n_actions + a]; }
    double& r(int s, int a) { return reward[static_cast<size_t>(s) * n_actions + a]; }

    void validate(double tol = 1e-12) const;
};

struct Solution {
    std::vector<double> v;                      // V*(s)
    std::vector<double> q;                      // Q*(s,a), [s * A + a]
    std::vector<std::vector<int>> greedy_sets;  // tie-aware greedy action sets per state
    int sweeps = 0;
    double residual = 0.0;
};

Solution value_iteration(const TabularMDP& mdp, double tol = 1e-12, int max_sweeps = 1000000,
                         double tie_tol = 1e-9);

// R'(s,a) = R(s,a) + sum_{s'} T(s,a,s') * F(s,a,s')
TabularMDP apply_shaping_f(const TabularMDP& mdp, const std::vector<double>& f);
// potential mode: F(s,a,s') = gamma * phi(s') - phi(s)
TabularMDP apply_shaping(const TabularMDP& mdp, const std::vector<double>& phi);

struct InvarianceReport {
    bool policies_equal = false;
    double max_q_identity_error = 0.0;  // max |Q'(s,a) - (Q(s,a) - phi(s))|
};

InvarianceReport policy_invariance_check(const TabularMDP& mdp, const std::vector<double>& phi,
                                         double tol = 1e-12);

struct LinearTransformReport {
    bool policies_equal = false;
    double max_q_identity_error = 0.0;  // max |Q'(s,a) - (a*Q(s,a) + b/(1-gamma))|
};

LinearTransformReport linear_transform_check(const TabularMDP& mdp, double scale, double shift,
                                             double tol = 1e-12);

// 5x5 gridworld with 4 moves + no-op, slip probability 0.1 and rewards in {-1, 0, +1}
TabularMDP random_gridworld(uint64_t seed, int side = 5, double slip = 0.1, double gamma = 0.9);

}  // namespace playroom
