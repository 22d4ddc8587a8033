#include "playroom/learners.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "playroom/checkpoint.hpp"

namespace playroom {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

NetworkSpec spec_for(const SenseParams& sense_params) {
    NetworkSpec spec;
    spec.n_rays = sense_params.n_rays;
    spec.multimodal = sense_params.modality == Modality::Multimodal;
    return spec;
}

struct RolloutStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    int successes = 0;
    int episodes = 0;

    void add(double ep_return, bool success) {
        sum += ep_return;
        sum_sq += ep_return * ep_return;
        successes += success ? 1 : 0;
        ++episodes;
    }
    EvalResult finish() const {
        EvalResult r;
        r.episodes = episodes;
        if (episodes > 0) {
            r.mean = sum / episodes;
            double var = sum_sq / episodes - r.mean * r.mean;
            r.stderr_ = episodes > 1 ? std::sqrt(std::max(0.0, var) / (episodes - 1)) : 0.0;
            r.success_rate = static_cast<double>(successes) / episodes;
        }
        return r;
    }
};

template <typename ActionFn>
EvalResult run_episodes(const EnvConfig& env_config, const SenseParams& sense_params,
                        int n_episodes, uint64_t seed, ActionFn&& pick_action) {
    if (n_episodes <= 0) throw std::invalid_argument("evaluation: n_episodes must be positive");
    (void)sense_params;
    Environment env(env_config);
    RolloutStats stats;
    for (int ep = 0; ep < n_episodes; ++ep) {
        EpisodeState state = env.reset(Rng::derive(seed, static_cast<uint64_t>(ep)));
        double ep_return = 0.0;
        bool success = false;
        while (!state.done) {
            Action a = pick_action(state, ep);
            auto [next, out] = env.step(state, a);
            ep_return += out.reward;
            if (out.reach == Reach::Target) success = true;
            state = next;
        }
        stats.add(ep_return, success);
    }
    return stats.finish();
}

}  // namespace

EvalResult evaluate_policy(const ParamSet& params, const EnvConfig& env_config,
                           const SenseParams& sense_params, int n_episodes, uint64_t seed) {
    Rng rng(Rng::derive(seed, 999));  // unused in deterministic mode
    return run_episodes(env_config, sense_params, n_episodes, seed,
                        [&](const EpisodeState& state, int) {
                            Observation obs = observe(state, env_config, sense_params);
                            return select_action(params, obs.flatten(), ActionMode::Deterministic,
                                                 rng);
                        });
}

EvalResult evaluate_mentor(const EnvConfig& env_config, const SenseParams& sense_params,
                           int n_episodes, uint64_t seed) {
    return run_episodes(env_config, sense_params, n_episodes, seed,
                        [&](const EpisodeState& state, int) {
                            return mentor_action(state, sense_params);
                        });
}

EvalResult evaluate_random(const EnvConfig& env_config, const SenseParams& sense_params,
                           int n_episodes, uint64_t seed) {
    Rng rng(Rng::derive(seed, 77));
    return run_episodes(env_config, sense_params, n_episodes, seed,
                        [&](const EpisodeState&, int) {
                            Action a;
                            a.a_f = rng.uniform();
                            a.a_r = rng.uniform(-1.0, 1.0);
                            return a;
                        });
}

namespace {

struct Worker {
    Environment env;
    EpisodeState state;
    Rng rng;
    std::vector<double> obs_flat;
    double episode_base = 0.0;
    double episode_shaped = 0.0;

    Worker(const EnvConfig& config, uint64_t seed)
        : env(config), state(env.reset(Rng::derive(seed, 0))), rng(seed) {}

    void begin_episode(const SenseParams& sense_params) {
        state = env.reset(rng.next_u64());
        episode_base = 0.0;
        episode_shaped = 0.0;
        obs_flat = observe(state, env.config(), sense_params).flatten();
    }
};

}  // namespace

TrainResult train(const EnvConfig& env_config, const SenseParams& sense_params,
                  const SacConfig& sac_config, const GuidanceSchedule& schedule,
                  const HelperCoefficients& helper, const TrainConfig& train_config) {
    sac_config.validate();
    const uint64_t seed = train_config.seed;
    NetworkSpec spec = spec_for(sense_params);
    SacLearner learner(spec, Rng::derive(seed, 3000), sac_config);
    Rng update_rng(Rng::derive(seed, 1000));
    ReplayBuffer buffer(sac_config.buffer_capacity);
    ReplayBuffer demos(train_config.demo_capacity);

    std::vector<Worker> workers;
    workers.reserve(static_cast<size_t>(sac_config.workers));
    for (int w = 0; w < sac_config.workers; ++w)
        workers.emplace_back(env_config, Rng::derive(seed, 10 + static_cast<uint64_t>(w)));
    for (auto& w : workers) {
        w.episode_base = 0.0;
        w.episode_shaped = 0.0;
        w.obs_flat = observe(w.state, env_config, sense_params).flatten();
    }

    TrainResult result{learner.params, {}, 0};
    int64_t frame = 0;
    int64_t next_eval = train_config.eval_every > 0 ? train_config.eval_every : -1;
    int64_t next_checkpoint = train_config.checkpoint_every > 0 ? train_config.checkpoint_every : -1;
    double last_eval = kNan;

    if (!train_config.out_dir.empty())
        std::filesystem::create_directories(train_config.out_dir);

    while (frame < train_config.total_frames) {
        bool bc_window = schedule.kind == GuidanceKind::BehaviorClone && schedule.active(frame);
        int steps = static_cast<int>(
            std::min<int64_t>(sac_config.update_every, train_config.total_frames - frame));

        double round_base_sum = 0.0, round_shaped_sum = 0.0;
        int round_episodes = 0;

        // deterministic round-robin across workers
        for (int s = 0; s < steps; ++s) {
            Worker& w = workers[static_cast<size_t>(s % sac_config.workers)];
            Action a;
            if (bc_window) {
                a = mentor_action(w.state, sense_params);
            } else {
                a = select_action(learner.params, w.obs_flat, ActionMode::Stochastic, w.rng);
            }
            EyesightStatus status = eyesight_status(w.state, sense_params);
            auto [next, out] = w.env.step(w.state, a);
            double shaped = effective_reward(schedule, frame, out.reward, status, a, helper);

            Transition t;
            t.obs = w.obs_flat;
            t.action_f = a.a_f;
            t.action_r = a.a_r;
            t.reward = shaped;
            t.done = out.terminal;  // frame-cap truncation still bootstraps

            w.state = next;
            w.episode_base += out.reward;
            w.episode_shaped += shaped;
            t.next_obs = observe(next, env_config, sense_params).flatten();
            if (next.done) {
                round_base_sum += w.episode_base;
                round_shaped_sum += w.episode_shaped;
                ++round_episodes;
                w.begin_episode(sense_params);
            } else {
                w.obs_flat = t.next_obs;
            }

            if (bc_window) {
                demos.push(std::move(t));  // SAC replay is frozen during the cloning window
            } else {
                buffer.push(std::move(t));
            }
            ++frame;
        }

        SacLosses losses;
        if (bc_window) {
            double loss = kNan;
            int bc_batch = std::min<int>(train_config.bc_batch, static_cast<int>(demos.size()));
            if (bc_batch > 0) {
                for (int k = 0; k < train_config.bc_updates_per_round; ++k) {
                    auto batch = demos.sample(static_cast<size_t>(bc_batch), update_rng);
                    loss = learner.bc_update(batch);
                }
            }
            losses.policy = loss;
            losses.q1 = kNan;
            losses.q2 = kNan;
        } else if (buffer.size() >= static_cast<size_t>(
                       std::max(sac_config.batch, sac_config.warmup_transitions))) {
            for (int k = 0; k < sac_config.updates_per_round; ++k) {
                auto batch = buffer.sample(static_cast<size_t>(sac_config.batch), update_rng);
                losses = learner.update(batch, sac_config, update_rng);
                if (!losses.ok) break;
            }
        } else {
            losses.q1 = kNan;
            losses.q2 = kNan;
            losses.policy = kNan;
        }

        bool eval_now = next_eval > 0 && frame >= next_eval;
        if (eval_now) {
            EvalResult ev = evaluate_policy(learner.params, env_config, sense_params,
                                            train_config.eval_episodes,
                                            Rng::derive(seed, 2000) + static_cast<uint64_t>(frame));
            last_eval = ev.mean;
            next_eval += train_config.eval_every;
        }
        if (next_checkpoint > 0 && frame >= next_checkpoint && !train_config.out_dir.empty()) {
            save_checkpoint(learner.params,
                            train_config.out_dir + "/checkpoint_" + std::to_string(frame) + ".ckpt");
            next_checkpoint += train_config.checkpoint_every;
        }

        MetricRow row;
        row.frame = frame;
        row.episode_return_base = round_episodes > 0 ? round_base_sum / round_episodes : kNan;
        row.episode_return_shaped = round_episodes > 0 ? round_shaped_sum / round_episodes : kNan;
        row.q1_loss = losses.q1;
        row.q2_loss = losses.q2;
        row.policy_loss = losses.policy;
        row.eval_return = eval_now ? last_eval : kNan;
        result.log.push_back(row);
    }

    result.params = learner.params;
    result.frames = frame;
    if (!train_config.out_dir.empty()) {
        write_metrics_csv(result.log, train_config.out_dir + "/metrics.csv");
        save_checkpoint(result.params, train_config.out_dir + "/checkpoint_final.ckpt");
    }
    return result;
}

void write_metrics_csv(const std::vector<MetricRow>& log, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_metrics_csv: cannot open " + path);
    os << "frame,episode_return_base,episode_return_shaped,q1_loss,q2_loss,policy_loss,eval_return\n";
    char buf[256];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      static_cast<long long>(row.frame), row.episode_return_base,
                      row.episode_return_shaped, row.q1_loss, row.q2_loss, row.policy_loss,
                      row.eval_return);
        os << buf;
    }
}

}  // namespace playroom
