#include "playroom/config.hpp"

#include <fstream>
#include <stdexcept>

namespace playroom {

using nlohmann::json;

void ExperimentConfig::apply_scale_defaults() {
    if (t_g_grid.empty())
        for (int m = 1; m <= 4; ++m)
            t_g_grid.push_back(static_cast<int64_t>(m * 1000000.0 * scale));
    if (duration == 0) duration = static_cast<int64_t>(2000000.0 * scale);
}

void ExperimentConfig::validate() const {
    for (int64_t t : t_g_grid)
        if (t < 0) throw std::invalid_argument("ExperimentConfig: budgets must be >= 0");
    if (duration < 0) throw std::invalid_argument("ExperimentConfig: duration must be >= 0");
    if (seeds < 1) throw std::invalid_argument("ExperimentConfig: seeds must be >= 1");
    if (eval_episodes < 1) throw std::invalid_argument("ExperimentConfig: eval_episodes must be >= 1");
    if (kinds.empty()) throw std::invalid_argument("ExperimentConfig: no guidance kinds");
}

json to_json(const RunConfig& c) {
    json j;
    j["env"] = {{"room_side", c.env.room_side},
                {"min_separation", c.env.min_separation},
                {"reach_radius", c.env.reach_radius},
                {"max_frames", c.env.max_frames},
                {"max_speed", c.env.max_speed},
                {"facing_half_angle_deg", c.env.facing_half_angle_deg},
                {"turn_rate_deg", c.env.turn_rate_deg},
                {"object_radius", c.env.object_radius},
                {"num_objects", c.env.num_objects}};
    j["senses"] = {{"n_rays", c.senses.n_rays},
                   {"fov_half_angle_deg", c.senses.fov_half_angle_deg},
                   {"eye_baseline", c.senses.eye_baseline},
                   {"max_range", c.senses.max_range},
                   {"modality",
                    c.senses.modality == Modality::Multimodal ? "multimodal" : "unimodal"}};
    j["sac"] = {{"alpha", c.sac.alpha},
                {"lr", c.sac.lr},
                {"gamma", c.sac.gamma},
                {"workers", c.sac.workers},
                {"update_every", c.sac.update_every},
                {"batch", c.sac.batch},
                {"buffer_capacity", c.sac.buffer_capacity},
                {"tau", c.sac.tau},
                {"updates_per_round", c.sac.updates_per_round},
                {"warmup_transitions", c.sac.warmup_transitions}};
    j["guidance"] = {{"kind", to_string(c.guidance.kind)},
                     {"t_g_frames", c.guidance.t_g},
                     {"duration_frames", c.guidance.duration},
                     {"helper",
                      {{"blind", c.helper.penalty_blind},
                       {"turn", c.helper.turn_bonus},
                       {"forward", c.helper.forward_bonus}}}};
    j["train"] = {{"total_frames", c.train.total_frames},
                  {"seed", c.train.seed},
                  {"eval_every", c.train.eval_every},
                  {"eval_episodes", c.train.eval_episodes},
                  {"checkpoint_every", c.train.checkpoint_every},
                  {"bc_batch", c.train.bc_batch},
                  {"bc_updates_per_round", c.train.bc_updates_per_round},
                  {"out_dir", c.train.out_dir}};
    std::vector<std::string> kind_names;
    for (GuidanceKind k : c.experiment.kinds) kind_names.push_back(to_string(k));
    j["experiment"] = {{"t_g_grid", c.experiment.t_g_grid},
                       {"duration", c.experiment.duration},
                       {"kinds", kind_names},
                       {"seeds", c.experiment.seeds},
                       {"eval_episodes", c.experiment.eval_episodes},
                       {"scale", c.experiment.scale}};
    return j;
}

namespace {

template <typename T>
void get_to_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("env")) {
        const json& e = j["env"];
        get_to_if(e, "room_side", c.env.room_side);
        get_to_if(e, "min_separation", c.env.min_separation);
        get_to_if(e, "reach_radius", c.env.reach_radius);
        get_to_if(e, "max_frames", c.env.max_frames);
        get_to_if(e, "max_speed", c.env.max_speed);
        get_to_if(e, "facing_half_angle_deg", c.env.facing_half_angle_deg);
        get_to_if(e, "turn_rate_deg", c.env.turn_rate_deg);
        get_to_if(e, "object_radius", c.env.object_radius);
        get_to_if(e, "num_objects", c.env.num_objects);
    }
    if (j.contains("senses")) {
        const json& s = j["senses"];
        get_to_if(s, "n_rays", c.senses.n_rays);
        get_to_if(s, "fov_half_angle_deg", c.senses.fov_half_angle_deg);
        get_to_if(s, "eye_baseline", c.senses.eye_baseline);
        get_to_if(s, "max_range", c.senses.max_range);
        if (s.contains("modality")) {
            std::string m = s["modality"].get<std::string>();
            if (m == "unimodal")
                c.senses.modality = Modality::Unimodal;
            else if (m == "multimodal")
                c.senses.modality = Modality::Multimodal;
            else
                throw std::invalid_argument("config: unknown modality " + m);
        }
    }
    if (j.contains("sac")) {
        const json& s = j["sac"];
        get_to_if(s, "alpha", c.sac.alpha);
        get_to_if(s, "lr", c.sac.lr);
        get_to_if(s, "gamma", c.sac.gamma);
        get_to_if(s, "workers", c.sac.workers);
        get_to_if(s, "update_every", c.sac.update_every);
        get_to_if(s, "batch", c.sac.batch);
        get_to_if(s, "buffer_capacity", c.sac.buffer_capacity);
        get_to_if(s, "tau", c.sac.tau);
        get_to_if(s, "updates_per_round", c.sac.updates_per_round);
        get_to_if(s, "warmup_transitions", c.sac.warmup_transitions);
    }
    if (j.contains("guidance")) {
        const json& g = j["guidance"];
        if (g.contains("kind")) c.guidance.kind = guidance_kind_from_string(g["kind"]);
        get_to_if(g, "t_g_frames", c.guidance.t_g);
        get_to_if(g, "duration_frames", c.guidance.duration);
        if (g.contains("helper")) {
            const json& h = g["helper"];
            get_to_if(h, "blind", c.helper.penalty_blind);
            get_to_if(h, "turn", c.helper.turn_bonus);
            get_to_if(h, "forward", c.helper.forward_bonus);
        }
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        get_to_if(t, "total_frames", c.train.total_frames);
        get_to_if(t, "seed", c.train.seed);
        get_to_if(t, "eval_every", c.train.eval_every);
        get_to_if(t, "eval_episodes", c.train.eval_episodes);
        get_to_if(t, "checkpoint_every", c.train.checkpoint_every);
        get_to_if(t, "bc_batch", c.train.bc_batch);
        get_to_if(t, "bc_updates_per_round", c.train.bc_updates_per_round);
        get_to_if(t, "out_dir", c.train.out_dir);
    }
    if (j.contains("experiment")) {
        const json& e = j["experiment"];
        get_to_if(e, "t_g_grid", c.experiment.t_g_grid);
        get_to_if(e, "duration", c.experiment.duration);
        if (e.contains("kinds")) {
            c.experiment.kinds.clear();
            for (const auto& k : e["kinds"])
                c.experiment.kinds.push_back(guidance_kind_from_string(k.get<std::string>()));
        }
        get_to_if(e, "seeds", c.experiment.seeds);
        get_to_if(e, "eval_episodes", c.experiment.eval_episodes);
        get_to_if(e, "scale", c.experiment.scale);
    }
    c.experiment.apply_scale_defaults();
    return c;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("config: cannot open " + path);
        is >> j;
    }
    for (const std::string& ov : overrides) {
        size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + ov);
        std::string key = ov.substr(0, eq);
        std::string value = ov.substr(eq + 1);
        json* node = &j;
        size_t pos = 0;
        while (true) {
            size_t dot = key.find('.', pos);
            std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
            if (dot == std::string::npos) {
                json parsed = json::parse(value, nullptr, false);
                (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
                break;
            }
            node = &(*node)[part];
            pos = dot + 1;
        }
    }
    return run_config_from_json(j);
}

}  // namespace playroom
