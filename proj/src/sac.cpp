#include "playroom/sac.hpp"

#include <cmath>
#include <stdexcept>

namespace playroom {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)
constexpr double kJacobianEps = 1e-6;

double squash_forward(double u) { return (std::tanh(u) + 1.0) * 0.5; }  // a_f in [0, 1]
double squash_turn(double u) { return std::tanh(u); }                   // a_r in [-1, 1]

// log-density of the squashed sample given pre-squash u ~ N(mean, std)
double squashed_log_prob(double u, double mean, double log_std, bool forward_dim) {
    double std = std::exp(log_std);
    double z = (u - mean) / std;
    double lp = -log_std - 0.5 * z * z - kHalfLog2Pi;
    double t = std::tanh(u);
    lp -= std::log(1.0 - t * t + kJacobianEps);
    if (forward_dim) lp += std::log(2.0);  // |da/du| = (1 - tanh^2) / 2
    return lp;
}

}  // namespace

void SacConfig::validate() const {
    if (alpha < 0.0 || lr <= 0.0 || gamma <= 0.0 || gamma >= 1.0 || workers <= 0 ||
        update_every <= 0 || batch <= 0 || buffer_capacity == 0 || tau <= 0.0 || tau > 1.0 ||
        updates_per_round <= 0)
        throw std::invalid_argument("SacConfig: invalid value");
    if (static_cast<size_t>(batch) > buffer_capacity)
        throw std::invalid_argument("SacConfig: batch must not exceed buffer capacity");
}

Action select_action(const ParamSet& params, const std::vector<double>& obs_flat,
                     ActionMode mode, Rng& rng) {
    Mat obs(1, static_cast<int>(obs_flat.size()));
    obs.d = obs_flat;
    Mat mean, log_std;
    infer_policy(params, obs, mean, log_std);
    double uf = mean.at(0, 0);
    double ur = mean.at(0, 1);
    if (mode == ActionMode::Stochastic) {
        uf += std::exp(log_std.at(0, 0)) * rng.normal();
        ur += std::exp(log_std.at(0, 1)) * rng.normal();
    }
    Action a;
    a.a_f = squash_forward(uf);
    a.a_r = squash_turn(ur);
    return a;
}

SacLearner::SacLearner(const NetworkSpec& spec, uint64_t seed, const SacConfig& config)
    : params(make_params(spec, seed)),
      targets(params),
      critic_opt(AdamState::for_params(params, config.lr)),
      policy_opt(AdamState::for_params(params, config.lr)) {}

void SacLearner::polyak(double tau) {
    for (size_t i = 0; i < params.params.size(); ++i) {
        auto& tv = targets.params[i].value.data;
        const auto& pv = params.params[i].value.data;
        for (size_t k = 0; k < tv.size(); ++k) tv[k] = tau * pv[k] + (1.0 - tau) * tv[k];
    }
}

SacLosses SacLearner::update(const std::vector<const Transition*>& batch,
                             const SacConfig& config, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("sac_update: empty batch");
    const int n = static_cast<int>(batch.size());
    const int obs_dim = params.spec.obs_dim();

    Mat obs(n, obs_dim), next_obs(n, obs_dim), action(n, 2);
    std::vector<double> reward(static_cast<size_t>(n)), not_done(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) {
        const Transition& t = *batch[static_cast<size_t>(r)];
        if (static_cast<int>(t.obs.size()) != obs_dim)
            throw std::invalid_argument("sac_update: transition width mismatch");
        std::copy(t.obs.begin(), t.obs.end(), obs.d.begin() + static_cast<size_t>(r) * obs_dim);
        std::copy(t.next_obs.begin(), t.next_obs.end(),
                  next_obs.d.begin() + static_cast<size_t>(r) * obs_dim);
        action.at(r, 0) = t.action_f;
        action.at(r, 1) = t.action_r;
        reward[static_cast<size_t>(r)] = t.reward;
        not_done[static_cast<size_t>(r)] = t.done ? 0.0 : 1.0;
    }

    // Q targets: r + gamma * (1 - done) * (min target Q(s', a') - alpha * log pi(a'|s'))
    Mat y(n, 1);
    {
        Mat nmean, nlogstd;
        infer_policy(params, next_obs, nmean, nlogstd);
        Mat next_action(n, 2);
        std::vector<double> logpi(static_cast<size_t>(n), 0.0);
        for (int r = 0; r < n; ++r) {
            for (int d = 0; d < 2; ++d) {
                double u = nmean.at(r, d) + std::exp(nlogstd.at(r, d)) * rng.normal();
                logpi[static_cast<size_t>(r)] +=
                    squashed_log_prob(u, nmean.at(r, d), nlogstd.at(r, d), d == 0);
                next_action.at(r, d) = (d == 0) ? squash_forward(u) : squash_turn(u);
            }
        }
        Mat nfeat = infer_features(targets, next_obs);
        Mat tq1 = infer_q(targets, nfeat, next_action, 1);
        Mat tq2 = infer_q(targets, nfeat, next_action, 2);
        for (int r = 0; r < n; ++r) {
            double q = std::min(tq1.at(r, 0), tq2.at(r, 0));
            y.at(r, 0) = reward[static_cast<size_t>(r)] +
                         config.gamma * not_done[static_cast<size_t>(r)] *
                             (q - config.alpha * logpi[static_cast<size_t>(r)]);
        }
    }

    SacLosses losses;

    // critic step
    {
        Tape tape;
        int obs_node = tape.input(obs);
        int act_node = tape.input(action);
        int y_node = tape.input(y);
        int feat = features_forward(tape, params, obs_node);
        int q1 = q_forward(tape, params, feat, act_node, 1);
        int q2 = q_forward(tape, params, feat, act_node, 2);
        int l1 = tape.mean_all(tape.square(tape.sub(q1, y_node)));
        int l2 = tape.mean_all(tape.square(tape.sub(q2, y_node)));
        int loss = tape.add(l1, l2);
        losses.q1 = tape.value(l1).at(0, 0);
        losses.q2 = tape.value(l2).at(0, 0);
        if (!std::isfinite(losses.q1) || !std::isfinite(losses.q2)) {
            losses.ok = false;
            return losses;
        }
        tape.backward(loss);
        auto grads = collect_grads(tape, params,
                                   {Partition::VisionEncoder, Partition::AudioEncoder,
                                    Partition::Fusion, Partition::ObjectEmbed, Partition::QHead1,
                                    Partition::QHead2});
        adam_step(params, grads, critic_opt);
    }

    // policy step: E[alpha * log pi(a|s) - min Q(s, a)] with reparameterized actions;
    // only the policy head moves
    {
        Mat eps(n, 2);
        for (double& v : eps.d) v = rng.normal();

        Tape tape;
        int obs_node = tape.input(obs);
        PolicyNodes pn = policy_forward(tape, params, obs_node);
        int std_node = tape.exp_op(pn.log_std);
        int u = tape.add(pn.mean, tape.mul(std_node, tape.input(eps)));
        int t = tape.tanh_op(u);
        int tf = tape.slice_cols(t, 0, 1);
        int tr = tape.slice_cols(t, 1, 1);
        int act = tape.concat_cols(tape.affine(tf, 0.5, 0.5), tr);

        // log pi: Gaussian part with z = eps, minus the squash Jacobian
        Mat eps_term(n, 2);
        for (int r = 0; r < n; ++r)
            for (int d = 0; d < 2; ++d)
                eps_term.at(r, d) = 0.5 * eps.at(r, d) * eps.at(r, d) + kHalfLog2Pi -
                                    (d == 0 ? std::log(2.0) : 0.0);
        int lp = tape.sub(tape.affine(pn.log_std, -1.0, 0.0), tape.input(eps_term));
        int jac = tape.log_op(tape.affine(tape.square(t), -1.0, 1.0 + kJacobianEps));
        lp = tape.sum_cols(tape.sub(lp, jac));  // n x 1

        int q1 = q_forward(tape, params, pn.features, act, 1);
        int q2 = q_forward(tape, params, pn.features, act, 2);
        int qmin = tape.min_op(q1, q2);
        int loss = tape.mean_all(tape.sub(tape.affine(lp, config.alpha, 0.0), qmin));
        losses.policy = tape.value(loss).at(0, 0);
        {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s -= tape.value(lp).at(r, 0);
            losses.mean_entropy = s / n;
        }
        if (!std::isfinite(losses.policy)) {
            losses.ok = false;
            return losses;
        }
        tape.backward(loss);
        auto grads = collect_grads(tape, params, {Partition::PolicyHead});
        adam_step(params, grads, policy_opt);
    }

    polyak(config.tau);
    return losses;
}

double SacLearner::bc_update(const std::vector<const Transition*>& demos) {
    if (demos.empty()) throw std::invalid_argument("bc_update: empty demonstration batch");
    const int n = static_cast<int>(demos.size());
    const int obs_dim = params.spec.obs_dim();
    Mat obs(n, obs_dim), target(n, 2);
    for (int r = 0; r < n; ++r) {
        const Transition& t = *demos[static_cast<size_t>(r)];
        std::copy(t.obs.begin(), t.obs.end(), obs.d.begin() + static_cast<size_t>(r) * obs_dim);
        target.at(r, 0) = t.action_f;
        target.at(r, 1) = t.action_r;
    }
    // regress the pre-squash mean onto atanh of the (clipped) demo actions:
    // demonstrations sit at the squash saturation points (a_r = 1, a_f = 0 or 1)
    // where a squashed-space MSE has vanishing gradients
    Mat pre_target(n, 2);
    auto clip = [](double v) { return std::clamp(v, -0.995, 0.995); };
    for (int r = 0; r < n; ++r) {
        pre_target.at(r, 0) = std::atanh(clip(2.0 * target.at(r, 0) - 1.0));
        pre_target.at(r, 1) = std::atanh(clip(target.at(r, 1)));
    }
    Tape tape;
    int obs_node = tape.input(obs);
    PolicyNodes pn = policy_forward(tape, params, obs_node);
    int loss = tape.mean_all(tape.square(tape.sub(pn.mean, tape.input(pre_target))));
    double loss_value = tape.value(loss).at(0, 0);
    tape.backward(loss);
    auto grads = collect_grads(tape, params,
                               {Partition::VisionEncoder, Partition::AudioEncoder,
                                Partition::Fusion, Partition::ObjectEmbed, Partition::PolicyHead});
    adam_step(params, grads, policy_opt);
    return loss_value;
}

}  // namespace playroom
