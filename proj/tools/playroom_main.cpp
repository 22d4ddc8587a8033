#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "playroom/checkpoint.hpp"
#include "playroom/config.hpp"
#include "playroom/harness.hpp"
#include "playroom/tabular.hpp"
#include "playroom/transfer.hpp"

using nlohmann::json;
using namespace playroom;

namespace {

void write_config_snapshot(const RunConfig& config, const std::string& dir) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream os(dir + "/config.json");
    os << to_json(config).dump(2) << "\n";
}

NetworkSpec spec_for(const SenseParams& senses) {
    NetworkSpec spec;
    spec.n_rays = senses.n_rays;
    spec.multimodal = senses.modality == Modality::Multimodal;
    return spec;
}

json eval_to_json(const EvalResult& ev) {
    return {{"mean", ev.mean},
            {"stderr", ev.stderr_},
            {"success_rate", ev.success_rate},
            {"episodes", ev.episodes}};
}

int cmd_train(const RunConfig& config) {
    write_config_snapshot(config, config.train.out_dir);
    TrainResult result = train(config.env, config.senses, config.sac, config.guidance,
                               config.helper, config.train);
    EvalResult ev = evaluate_policy(result.params, config.env, config.senses,
                                    config.experiment.eval_episodes,
                                    Rng::derive(config.train.seed, 555000));
    json out = {{"frames", result.frames},
                {"kind", to_string(config.guidance.kind)},
                {"t_g", config.guidance.t_g},
                {"duration", config.guidance.duration},
                {"final_eval", eval_to_json(ev)},
                {"out_dir", config.train.out_dir}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& config, const std::string& out_dir) {
    write_config_snapshot(config, out_dir);
    RunReport report = run_protocol(config, out_dir);
    json cells = json::array();
    for (const auto& cell : report.cells)
        cells.push_back({{"kind", to_string(cell.kind)},
                         {"t_g", cell.t_g},
                         {"seeds", cell.seeds},
                         {"mean_j", cell.mean_j},
                         {"stderr_j", cell.stderr_j},
                         {"max_j", cell.max_j}});
    json out = {{"best_kind", to_string(report.best_kind)},
                {"best_t_g", report.best_t_g},
                {"cells", cells}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_eval(const RunConfig& config, const std::string& checkpoint, int episodes, uint64_t seed) {
    ParamSet params = load_checkpoint(checkpoint, spec_for(config.senses));
    EvalResult ev = eval_policy(params, config.env, config.senses, episodes, seed);
    json out = {{"checkpoint", checkpoint}, {"eval", eval_to_json(ev)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_plot(const RunConfig& config, const std::string& checkpoint, int episodes, uint64_t seed,
             const std::string& out_dir) {
    ParamSet params = load_checkpoint(checkpoint, spec_for(config.senses));
    export_trajectories(params, config.env, config.senses, episodes, seed, out_dir);
    std::cout << json({{"episodes", episodes}, {"out_dir", out_dir}}).dump(2) << "\n";
    return 0;
}

int cmd_oracle(uint64_t seed, int n_worlds) {
    json worlds = json::array();
    bool all_ok = true;
    for (int i = 0; i < n_worlds; ++i) {
        uint64_t s = Rng::derive(seed, static_cast<uint64_t>(i));
        TabularMDP mdp = random_gridworld(s);
        Rng rng(Rng::derive(s, 99));
        std::vector<double> phi(static_cast<size_t>(mdp.n_states));
        for (double& p : phi) p = rng.uniform(-10.0, 10.0);
        InvarianceReport inv = policy_invariance_check(mdp, phi);
        LinearTransformReport aff = linear_transform_check(mdp, 3.0, 5.0);
        bool ok = inv.policies_equal && inv.max_q_identity_error < 1e-8 && aff.policies_equal &&
                  aff.max_q_identity_error < 1e-8;
        all_ok = all_ok && ok;
        worlds.push_back({{"seed", s},
                          {"shaping_policies_equal", inv.policies_equal},
                          {"shaping_identity_error", inv.max_q_identity_error},
                          {"affine_policies_equal", aff.policies_equal},
                          {"affine_identity_error", aff.max_q_identity_error},
                          {"ok", ok}});
    }

    EnvConfig env;
    SenseParams senses;
    EvalResult mentor = evaluate_mentor(env, senses, 200, Rng::derive(seed, 500));
    EvalResult random = evaluate_random(env, senses, 200, Rng::derive(seed, 501));

    json out = {{"gridworlds", worlds},
                {"all_gridworlds_ok", all_ok},
                {"mentor_baseline", eval_to_json(mentor)},
                {"random_baseline", eval_to_json(random)}};
    std::cout << out.dump(2) << "\n";
    return all_ok ? 0 : 1;
}

int cmd_probe(const RunConfig& config, const std::vector<std::string>& checkpoints,
              int n_per_class, int epochs, double lr, uint64_t seed,
              const std::string& dataset_path) {
    ProbeDataset dataset;
    if (!dataset_path.empty() && std::filesystem::exists(dataset_path)) {
        dataset = load_probe_dataset(dataset_path);
    } else {
        dataset = generate_probe_dataset(n_per_class, seed, config.env, config.senses);
        if (!dataset_path.empty()) save_probe_dataset(dataset, dataset_path);
    }
    ProbeRanking ranking =
        probe_sweep(checkpoints, spec_for(config.senses), dataset, epochs, lr, seed);
    json ranked = json::array();
    for (size_t i = 0; i < ranking.checkpoints.size(); ++i)
        ranked.push_back(
            {{"checkpoint", ranking.checkpoints[i]}, {"test_accuracy", ranking.accuracies[i]}});
    std::cout << json({{"ranking", ranked}}).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale object-finding RL laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
    app.add_option("--set", overrides, "dotted-path override, e.g. sac.alpha=0.03");
    app.fallthrough();  // allow the global --config/--set after a subcommand name

    auto* train_cmd = app.add_subcommand("train", "train one guidance cell");
    std::string train_out;
    train_cmd->add_option("--out", train_out, "run directory for metrics and checkpoints");

    auto* sweep_cmd = app.add_subcommand("sweep", "run the full guidance-budget protocol");
    std::string sweep_out = "sweep_out";
    sweep_cmd->add_option("--out", sweep_out, "sweep output directory");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the base reward");
    std::string eval_ckpt;
    int eval_episodes = 50;
    uint64_t eval_seed = 12345;
    eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
    eval_cmd->add_option("--episodes", eval_episodes);
    eval_cmd->add_option("--seed", eval_seed);

    auto* plot_cmd = app.add_subcommand("plot", "export overhead trajectory SVGs");
    std::string plot_ckpt, plot_out = "plots";
    int plot_episodes = 10;
    uint64_t plot_seed = 12345;
    plot_cmd->add_option("--checkpoint", plot_ckpt)->required();
    plot_cmd->add_option("--episodes", plot_episodes);
    plot_cmd->add_option("--seed", plot_seed);
    plot_cmd->add_option("--out", plot_out);

    auto* oracle_cmd = app.add_subcommand("oracle", "exact tabular checks and rollout baselines");
    uint64_t oracle_seed = 7;
    int oracle_worlds = 20;
    oracle_cmd->add_option("--seed", oracle_seed);
    oracle_cmd->add_option("--worlds", oracle_worlds);

    auto* probe_cmd = app.add_subcommand("probe", "linear-probe checkpoints on rendered views");
    std::vector<std::string> probe_ckpts;
    int probe_n_per_class = 100, probe_epochs = 2000;
    double probe_lr = 0.01;
    uint64_t probe_seed = 12345;
    std::string probe_dataset;
    probe_cmd->add_option("checkpoints", probe_ckpts, "checkpoint files to rank")->required();
    probe_cmd->add_option("--n-per-class", probe_n_per_class);
    probe_cmd->add_option("--epochs", probe_epochs);
    probe_cmd->add_option("--lr", probe_lr);
    probe_cmd->add_option("--seed", probe_seed);
    probe_cmd->add_option("--dataset", probe_dataset, "binary dataset cache path");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = load_run_config(config_path, overrides);
        if (train_cmd->parsed()) {
            if (!train_out.empty()) config.train.out_dir = train_out;
            return cmd_train(config);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(config, sweep_out);
        if (eval_cmd->parsed()) return cmd_eval(config, eval_ckpt, eval_episodes, eval_seed);
        if (plot_cmd->parsed())
            return cmd_plot(config, plot_ckpt, plot_episodes, plot_seed, plot_out);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_seed, oracle_worlds);
        if (probe_cmd->parsed())
            return cmd_probe(config, probe_ckpts, probe_n_per_class, probe_epochs, probe_lr,
                             probe_seed, probe_dataset);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
