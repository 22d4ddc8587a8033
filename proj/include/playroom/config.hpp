#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "playroom/guidance.hpp"
#include "playroom/learners.hpp"
#include "playroom/sac.hpp"
#include "playroom/senses.hpp"
#include "playroom/world.hpp"

namespace playroom {

// full sweep description; the grid defaults to the 1/2/3/4M pretrain budgets
// and 2M guidance duration mapped through `scale`
struct ExperimentConfig {
    std::vector<int64_t> t_g_grid;
    int64_t duration = 0;
    std::vector<GuidanceKind> kinds = {GuidanceKind::Sparse, GuidanceKind::Helper,
                                       GuidanceKind::BehaviorClone};
    int seeds = 3;
    int eval_episodes = 50;
    double scale = 0.01;  // paper frames -> desk frames

    void apply_scale_defaults();
    void validate() const;
};

struct RunConfig {
    EnvConfig env;
    SenseParams senses;
    SacConfig sac;
    GuidanceSchedule guidance;
    HelperCoefficients helper;
    TrainConfig train;
    ExperimentConfig experiment;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

// loads a config file (empty path = all defaults) and applies dotted-path
// overrides like "sac.alpha=0.03" or "guidance.kind=helper"
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace playroom
