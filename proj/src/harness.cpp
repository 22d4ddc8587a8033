#include "playroom/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

namespace playroom {

namespace {

int kind_order(GuidanceKind kind) {
    switch (kind) {
        case GuidanceKind::Sparse: return 0;
        case GuidanceKind::Helper: return 1;
        default: return 2;
    }
}

}  // namespace

std::pair<GuidanceKind, int64_t> optimal_guidance(const std::vector<GuidanceResult>& results) {
    if (results.empty()) throw std::invalid_argument("optimal_guidance: empty result list");
    std::map<std::pair<int, int64_t>, double> best_j;  // (kind order, t_g) -> max over seeds
    for (const auto& r : results) {
        auto key = std::make_pair(kind_order(r.kind), r.t_g);
        auto it = best_j.find(key);
        if (it == best_j.end() || r.j > it->second) best_j[key] = r.j;
    }
    std::pair<int, int64_t> best_key = best_j.begin()->first;
    double best = best_j.begin()->second;
    for (const auto& [key, j] : best_j) {
        if (j > best ||
            (j == best && (key.second < best_key.second ||
                           (key.second == best_key.second && key.first < best_key.first)))) {
            best = j;
            best_key = key;
        }
    }
    GuidanceKind kind = best_key.first == 0   ? GuidanceKind::Sparse
                        : best_key.first == 1 ? GuidanceKind::Helper
                                              : GuidanceKind::BehaviorClone;
    return {kind, best_key.second};
}

EvalResult eval_policy(const ParamSet& params, const EnvConfig& env_config,
                       const SenseParams& sense_params, int n_episodes, uint64_t seed) {
    return evaluate_policy(params, env_config, sense_params, n_episodes, seed);
}

GuidanceResult run_cell(const RunConfig& config, GuidanceKind kind, int64_t t_g, uint64_t seed,
                        const std::string& out_dir) {
    RunConfig cell = config;
    cell.guidance.kind = kind;
    cell.guidance.t_g = t_g;
    cell.guidance.duration = config.experiment.duration;
    cell.train.total_frames = t_g + config.experiment.duration;
    cell.train.seed = seed;
    cell.train.out_dir = out_dir;

    TrainResult trained = train(cell.env, cell.senses, cell.sac, cell.guidance, cell.helper,
                                cell.train);

    GuidanceResult result;
    result.kind = kind;
    result.t_g = t_g;
    result.seed = seed;
    // evaluation seeds are disjoint from the training stream by construction
    EvalResult ev = eval_policy(trained.params, cell.env, cell.senses,
                                config.experiment.eval_episodes, Rng::derive(seed, 555000));
    result.j = ev.mean;
    result.j_stderr = ev.stderr_;
    result.success_rate = ev.success_rate;
    for (const auto& row : trained.log)
        if (!std::isnan(row.eval_return)) result.eval_curve.push_back(row.eval_return);
    return result;
}

RunReport run_protocol(const RunConfig& config, const std::string& out_dir) {
    config.experiment.validate();
    RunReport report;
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    for (GuidanceKind kind : config.experiment.kinds) {
        for (int64_t t_g : config.experiment.t_g_grid) {
            for (int s = 0; s < config.experiment.seeds; ++s) {
                uint64_t seed = config.train.seed + static_cast<uint64_t>(s);
                std::string cell_dir;
                if (!out_dir.empty())
                    cell_dir = out_dir + "/cell_" + to_string(kind) + "_" +
                               std::to_string(t_g) + "_s" + std::to_string(seed);
                try {
                    report.results.push_back(run_cell(config, kind, t_g, seed, cell_dir));
                } catch (const std::exception& e) {
                    std::cerr << "cell " << to_string(kind) << " t_g=" << t_g << " seed=" << seed
                              << " failed: " << e.what() << "\n";
                }
            }
        }
    }
    if (!report.results.empty()) {
        auto [kind, t_g] = optimal_guidance(report.results);
        report.best_kind = kind;
        report.best_t_g = t_g;
        std::map<std::pair<int, int64_t>, std::vector<double>> groups;
        for (const auto& r : report.results)
            groups[{kind_order(r.kind), r.t_g}].push_back(r.j);
        for (const auto& [key, js] : groups) {
            CellSummary cell;
            cell.kind = key.first == 0   ? GuidanceKind::Sparse
                        : key.first == 1 ? GuidanceKind::Helper
                                         : GuidanceKind::BehaviorClone;
            cell.t_g = key.second;
            cell.seeds = static_cast<int>(js.size());
            double sum = 0.0, sum_sq = 0.0, mx = js[0];
            for (double j : js) {
                sum += j;
                sum_sq += j * j;
                mx = std::max(mx, j);
            }
            cell.mean_j = sum / static_cast<double>(js.size());
            double var = sum_sq / static_cast<double>(js.size()) - cell.mean_j * cell.mean_j;
            cell.stderr_j = js.size() > 1
                                ? std::sqrt(std::max(0.0, var) / static_cast<double>(js.size() - 1))
                                : 0.0;
            cell.max_j = mx;
            report.cells.push_back(cell);
        }
    }
    if (!out_dir.empty()) summarize(report, out_dir + "/summary.csv");
    return report;
}

void summarize(const RunReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("summarize: cannot open " + path);
    os << "# per-cell mean/stderr/max of J (base-reward eval return) and the selected optimum\n";
    os << "kind,t_g,seeds,mean_j,stderr_j,max_j,selected\n";
    char buf[256];
    for (const auto& cell : report.cells) {
        bool selected = cell.kind == report.best_kind && cell.t_g == report.best_t_g;
        std::snprintf(buf, sizeof(buf), "%s,%lld,%d,%.6f,%.6f,%.6f,%d\n",
                      to_string(cell.kind).c_str(), static_cast<long long>(cell.t_g), cell.seeds,
                      cell.mean_j, cell.stderr_j, cell.max_j, selected ? 1 : 0);
        os << buf;
    }
}

void export_trajectories(const ParamSet& params, const EnvConfig& env_config,
                         const SenseParams& sense_params, int n_episodes, uint64_t seed,
                         const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream poses(dir + "/poses.csv");
    if (!poses) throw std::runtime_error("export_trajectories: cannot write to " + dir);
    poses << "episode,frame,x,y,heading\n";

    Environment env(env_config);
    Rng rng(Rng::derive(seed, 444));
    const double scale = 30.0;  // svg pixels per unit
    for (int ep = 0; ep < n_episodes; ++ep) {
        EpisodeState state = env.reset(Rng::derive(seed, static_cast<uint64_t>(ep)));
        std::vector<Pose> path{state.pose};
        EpisodeState start = state;
        while (!state.done) {
            Observation obs = observe(state, env_config, sense_params);
            Action a = select_action(params, obs.flatten(), ActionMode::Deterministic, rng);
            auto [next, out] = env.step(state, a);
            state = next;
            path.push_back(state.pose);
        }
        for (size_t f = 0; f < path.size(); ++f) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%d,%zu,%.6f,%.6f,%.6f\n", ep, f, path[f].x,
                          path[f].y, path[f].heading);
            poses << buf;
        }

        std::ofstream svg(dir + "/trajectory_" + std::to_string(ep) + ".svg");
        double side = env_config.room_side * scale;
        svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << side << "' height='" << side
            << "' viewBox='0 0 " << side << " " << side << "'>\n";
        svg << "<rect x='0' y='0' width='" << side << "' height='" << side
            << "' fill='white' stroke='black'/>\n";
        for (size_t i = 0; i < start.objects.size(); ++i) {
            const auto& obj = start.objects[i];
            const char* color = (static_cast<int>(i) == start.target_index) ? "green" : "red";
            svg << "<circle cx='" << obj.x * scale << "' cy='" << (env_config.room_side - obj.y) * scale
                << "' r='" << env_config.reach_radius * scale << "' fill='none' stroke='" << color
                << "'/>\n";
            svg << "<circle cx='" << obj.x * scale << "' cy='" << (env_config.room_side - obj.y) * scale
                << "' r='" << obj.radius * scale << "' fill='" << color << "'/>\n";
        }
        svg << "<polyline fill='none' stroke='gray' points='";
        for (const auto& p : path)
            svg << p.x * scale << "," << (env_config.room_side - p.y) * scale << " ";
        svg << "'/>\n";
        svg << "<circle cx='" << path.front().x * scale << "' cy='"
            << (env_config.room_side - path.front().y) * scale << "' r='4' fill='blue'/>\n";
        svg << "</svg>\n";
    }
}

}  // namespace playroom
