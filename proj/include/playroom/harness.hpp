#pragma once

#include <string>
#include <vector>

#include "playroom/config.hpp"
#include "playroom/learners.hpp"

namespace playroom {

struct GuidanceResult {
    GuidanceKind kind = GuidanceKind::Sparse;
    int64_t t_g = 0;
    uint64_t seed = 0;
    double j = 0.0;        // mean base-reward eval return under the deterministic policy
    double j_stderr = 0.0;
    double success_rate = 0.0;
    std::vector<double> eval_curve;  // periodic eval returns over training
};

struct CellSummary {
    GuidanceKind kind;
    int64_t t_g;
    double mean_j;
    double stderr_j;
    double max_j;  // the inner max over the seed ensemble
    int seeds;
};

struct RunReport {
    std::vector<GuidanceResult> results;
    GuidanceKind best_kind = GuidanceKind::Sparse;
    int64_t best_t_g = 0;
    std::vector<CellSummary> cells;
};

// argmax over (G, t_G) of the max-over-seeds J; tie-break: smaller t_G, then
// kind order Sparse < Helper < BehaviorClone
std::pair<GuidanceKind, int64_t> optimal_guidance(const std::vector<GuidanceResult>& results);

// performance J of a policy: mean base-reward return, deterministic actions,
// helper reward always excluded
EvalResult eval_policy(const ParamSet& params, const EnvConfig& env_config,
                       const SenseParams& sense_params, int n_episodes, uint64_t seed);

// one sweep cell: sparse pretraining for t_G frames then guidance for the
// configured duration, realized as a single schedule window
GuidanceResult run_cell(const RunConfig& config, GuidanceKind kind, int64_t t_g, uint64_t seed,
                        const std::string& out_dir);

// the full protocol grid; partial results are kept if a cell fails
RunReport run_protocol(const RunConfig& config, const std::string& out_dir);

void summarize(const RunReport& report, const std::string& path);

// overhead trajectory plots (SVG) plus a raw pose CSV per episode
void export_trajectories(const ParamSet& params, const EnvConfig& env_config,
                         const SenseParams& sense_params, int n_episodes, uint64_t seed,
                         const std::string& dir);

}  // namespace playroom
