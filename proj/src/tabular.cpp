#include "playroom/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace playroom {

void TabularMDP::validate(double tol) const {
    if (n_states <= 0 || n_actions <= 0) throw std::invalid_argument("TabularMDP: empty");
    if (transition.size() != static_cast<size_t>(n_states) * n_actions * n_states ||
        reward.size() != static_cast<size_t>(n_states) * n_actions)
        throw std::invalid_argument("TabularMDP: shape mismatch");
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) sum += t(s, a, s2);
            if (std::fabs(sum - 1.0) > tol)
                throw std::invalid_argument("TabularMDP: transition row not stochastic");
        }
    for (double v : reward)
        if (!std::isfinite(v)) throw std::invalid_argument("TabularMDP: non-finite reward");
}

Solution value_iteration(const TabularMDP& mdp, double tol, int max_sweeps, double tie_tol) {
    if (mdp.gamma >= 1.0) throw std::invalid_argument("value_iteration: gamma must be < 1");
    mdp.validate(1e-9);
    Solution sol;
    sol.v.assign(static_cast<size_t>(mdp.n_states), 0.0);
    std::vector<double> next(static_cast<size_t>(mdp.n_states), 0.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double residual = 0.0;
        for (int s = 0; s < mdp.n_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions; ++a) {
                double q = mdp.r(s, a);
                for (int s2 = 0; s2 < mdp.n_states; ++s2)
                    q += mdp.gamma * mdp.t(s, a, s2) * sol.v[static_cast<size_t>(s2)];
                best = std::max(best, q);
            }
            next[static_cast<size_t>(s)] = best;
            residual = std::max(residual, std::fabs(best - sol.v[static_cast<size_t>(s)]));
        }
        sol.v.swap(next);
        sol.sweeps = sweep + 1;
        sol.residual = residual;
        if (residual < tol) break;
    }
    sol.q.assign(static_cast<size_t>(mdp.n_states) * mdp.n_actions, 0.0);
    sol.greedy_sets.assign(static_cast<size_t>(mdp.n_states), {});
    for (int s = 0; s < mdp.n_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions; ++a) {
            double q = mdp.r(s, a);
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                q += mdp.gamma * mdp.t(s, a, s2) * sol.v[static_cast<size_t>(s2)];
            sol.q[static_cast<size_t>(s) * mdp.n_actions + a] = q;
            best = std::max(best, q);
        }
        // widen the tie tolerance by the numerical error actually present in Q:
        // the value-iteration convergence error (bounded via the final residual)
        // and floating-point rounding at the Q magnitude. Large uniform offsets
        // (e.g. from big potentials) then cannot turn noise into spurious
        // tie-set differences, while exact small gaps stay resolved.
        double scale = 1.0;
        for (int a = 0; a < mdp.n_actions; ++a)
            scale = std::max(scale,
                             std::fabs(sol.q[static_cast<size_t>(s) * mdp.n_actions + a]));
        double tie = std::max(tie_tol, 1e-13 * scale +
                                           10.0 * sol.residual * mdp.gamma / (1.0 - mdp.gamma));
        for (int a = 0; a < mdp.n_actions; ++a)
            if (sol.q[static_cast<size_t>(s) * mdp.n_actions + a] >= best - tie)
                sol.greedy_sets[static_cast<size_t>(s)].push_back(a);
    }
    return sol;
}

TabularMDP apply_shaping_f(const TabularMDP& mdp, const std::vector<double>& f) {
    if (f.size() != mdp.transition.size())
        throw std::invalid_argument("apply_shaping_f: shape mismatch");
    TabularMDP shaped = mdp;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            double add = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                add += mdp.t(s, a, s2) *
                       f[(static_cast<size_t>(s) * mdp.n_actions + a) * mdp.n_states + s2];
            shaped.r(s, a) += add;
        }
    return shaped;
}

TabularMDP apply_shaping(const TabularMDP& mdp, const std::vector<double>& phi) {
    if (phi.size() != static_cast<size_t>(mdp.n_states))
        throw std::invalid_argument("apply_shaping: potential size mismatch");
    std::vector<double> f(mdp.transition.size(), 0.0);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                f[(static_cast<size_t>(s) * mdp.n_actions + a) * mdp.n_states + s2] =
                    mdp.gamma * phi[static_cast<size_t>(s2)] - phi[static_cast<size_t>(s)];
    return apply_shaping_f(mdp, f);
}

namespace {

bool greedy_sets_equal(const Solution& a, const Solution& b) {
    if (a.greedy_sets.size() != b.greedy_sets.size()) return false;
    for (size_t s = 0; s < a.greedy_sets.size(); ++s)
        if (a.greedy_sets[s] != b.greedy_sets[s]) return false;
    return true;
}

}  // namespace

InvarianceReport policy_invariance_check(const TabularMDP& mdp, const std::vector<double>& phi,
                                         double tol) {
    Solution base = value_iteration(mdp, tol);
    Solution shaped = value_iteration(apply_shaping(mdp, phi), tol);
    InvarianceReport report;
    report.policies_equal = greedy_sets_equal(base, shaped);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            double expect = base.q[static_cast<size_t>(s) * mdp.n_actions + a] -
                            phi[static_cast<size_t>(s)];
            double err =
                std::fabs(shaped.q[static_cast<size_t>(s) * mdp.n_actions + a] - expect);
            report.max_q_identity_error = std::max(report.max_q_identity_error, err);
        }
    return report;
}

LinearTransformReport linear_transform_check(const TabularMDP& mdp, double scale, double shift,
                                             double tol) {
    if (scale <= 0.0) throw std::invalid_argument("linear_transform_check: scale must be > 0");
    TabularMDP scaled = mdp;
    for (double& r : scaled.reward) r = scale * r + shift;
    Solution base = value_iteration(mdp, tol);
    Solution after = value_iteration(scaled, tol);
    LinearTransformReport report;
    report.policies_equal = greedy_sets_equal(base, after);
    double offset = shift / (1.0 - mdp.gamma);
    for (size_t i = 0; i < base.q.size(); ++i) {
        double err = std::fabs(after.q[i] - (scale * base.q[i] + offset));
        report.max_q_identity_error = std::max(report.max_q_identity_error, err);
    }
    return report;
}

TabularMDP random_gridworld(uint64_t seed, int side, double slip, double gamma) {
    Rng rng(seed);
    TabularMDP mdp;
    mdp.n_states = side * side;
    mdp.n_actions = 5;  // 4 moves + no-op
    mdp.gamma = gamma;
    mdp.transition.assign(
        static_cast<size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states, 0.0);
    mdp.reward.assign(static_cast<size_t>(mdp.n_states) * mdp.n_actions, 0.0);

    auto clamp_cell = [&](int x, int y) {
        x = std::min(side - 1, std::max(0, x));
        y = std::min(side - 1, std::max(0, y));
        return y * side + x;
    };
    const int dx[4] = {0, 0, -1, 1};
    const int dy[4] = {-1, 1, 0, 0};
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            int s = y * side + x;
            for (int a = 0; a < 4; ++a) {
                // intended move with probability 1 - slip; slip spreads uniformly
                // over the other three moves
                for (int m = 0; m < 4; ++m) {
                    double p = (m == a) ? 1.0 - slip : slip / 3.0;
                    mdp.t(s, a, clamp_cell(x + dx[m], y + dy[m])) += p;
                }
                mdp.r(s, a) = static_cast<double>(rng.uniform_int(-1, 1));
            }
            mdp.t(s, 4, s) = 1.0;  // no-op
            mdp.r(s, 4) = static_cast<double>(rng.uniform_int(-1, 1));
        }
    return mdp;
}

}  // namespace playroom
