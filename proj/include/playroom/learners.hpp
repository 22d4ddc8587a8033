#pragma once

#include <string>
#include <vector>

#include "playroom/guidance.hpp"
#include "playroom/sac.hpp"
#include "playroom/senses.hpp"
#include "playroom/world.hpp"

namespace playroom {

struct TrainConfig {
    int64_t total_frames = 40000;
    uint64_t seed = 0;
    int64_t eval_every = 5000;   // frames between periodic evaluations (0 = none)
    int eval_episodes = 10;
    int64_t checkpoint_every = 0;  // frames between checkpoints (0 = final only)
    int bc_batch = 256;
    int bc_updates_per_round = 8;
    size_t demo_capacity = 20000;
    std::string out_dir;  // when set: metrics.csv and checkpoints are written here
};

struct MetricRow {
    int64_t frame = 0;
    double episode_return_base = 0.0;    // nan when no episode finished in the window
    double episode_return_shaped = 0.0;
    double q1_loss = 0.0;
    double q2_loss = 0.0;
    double policy_loss = 0.0;
    double eval_return = 0.0;            // nan except on evaluation rows
};

struct EvalResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    double success_rate = 0.0;  // fraction of episodes that reached the target
    int episodes = 0;
};

// deterministic-policy evaluation on the base (unshaped) reward
EvalResult evaluate_policy(const ParamSet& params, const EnvConfig& env_config,
                           const SenseParams& sense_params, int n_episodes, uint64_t seed);

// same rollout machinery for the scripted mentor and for a uniform random policy
EvalResult evaluate_mentor(const EnvConfig& env_config, const SenseParams& sense_params,
                           int n_episodes, uint64_t seed);
EvalResult evaluate_random(const EnvConfig& env_config, const SenseParams& sense_params,
                           int n_episodes, uint64_t seed);

struct TrainResult {
    ParamSet params;
    std::vector<MetricRow> log;
    int64_t frames = 0;
};

// Alternates experience collection over round-robin workers with SAC updates;
// inside a behavior-cloning window the mentor drives collection and updates
// are supervised.
TrainResult train(const EnvConfig& env_config, const SenseParams& sense_params,
                  const SacConfig& sac_config, const GuidanceSchedule& schedule,
                  const HelperCoefficients& helper, const TrainConfig& train_config);

void write_metrics_csv(const std::vector<MetricRow>& log, const std::string& path);

}  // namespace playroom
