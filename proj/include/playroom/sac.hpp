#pragma once

#include <vector>

#include "playroom/adam.hpp"
#include "playroom/network.hpp"
#include "playroom/replay.hpp"
#include "playroom/world.hpp"

namespace playroom {

struct SacConfig {
    double alpha = 0.01;          // entropy coefficient
    double lr = 0.0003;
    double gamma = 0.99;
    int workers = 8;
    int update_every = 256;       // environment steps per update round
    int batch = 512;
    size_t buffer_capacity = 20000;
    double tau = 0.005;           // Polyak averaging rate for target networks
    int updates_per_round = 1;    // gradient steps per update round
    int warmup_transitions = 512; // no updates until the buffer holds this many

    void validate() const;
};

enum class ActionMode { Stochastic, Deterministic };

Action select_action(const ParamSet& params, const std::vector<double>& obs_flat,
                     ActionMode mode, Rng& rng);

struct SacLosses {
    double q1 = 0.0;
    double q2 = 0.0;
    double policy = 0.0;
    double mean_entropy = 0.0;
    bool ok = true;  // false if a non-finite loss aborted the update
};

struct SacLearner {
    ParamSet params;
    ParamSet targets;
    AdamState critic_opt;
    AdamState policy_opt;

    SacLearner(const NetworkSpec& spec, uint64_t seed, const SacConfig& config);

    SacLosses update(const std::vector<const Transition*>& batch, const SacConfig& config,
                     Rng& rng);

    // supervised regression of the deterministic policy onto mentor actions;
    // steps encoders, fusion, embedding and policy head
    double bc_update(const std::vector<const Transition*>& demos);

private:
    void polyak(double tau);
};

}  // namespace playroom
