#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "playroom/harness.hpp"

using namespace playroom;

namespace {

GuidanceResult result(GuidanceKind kind, int64_t t_g, uint64_t seed, double j) {
    GuidanceResult r;
    r.kind = kind;
    r.t_g = t_g;
    r.seed = seed;
    r.j = j;
    return r;
}

}  // namespace

TEST_CASE("the published helper-budget table selects the 2M helper cell") {
    std::vector<GuidanceResult> results = {
        result(GuidanceKind::Helper, 2000000, 0, 0.03),
        result(GuidanceKind::Helper, 1000000, 0, 0.00),
        result(GuidanceKind::Helper, 3000000, 0, -0.01),
        result(GuidanceKind::Helper, 4000000, 0, -0.01),
    };
    auto [kind, t_g] = optimal_guidance(results);
    CHECK(kind == GuidanceKind::Helper);
    CHECK(t_g == 2000000);
}

TEST_CASE("selection takes the max over seeds within a cell") {
    std::vector<GuidanceResult> results = {
        result(GuidanceKind::Sparse, 100, 0, 0.9),   // one lucky sparse seed
        result(GuidanceKind::Sparse, 100, 1, -0.5),
        result(GuidanceKind::Helper, 100, 0, 0.5),
        result(GuidanceKind::Helper, 100, 1, 0.6),
    };
    auto [kind, t_g] = optimal_guidance(results);
    CHECK(kind == GuidanceKind::Sparse);
    CHECK(t_g == 100);
}

TEST_CASE("optimal_guidance tie-breaks and errors") {
    CHECK_THROWS_AS(optimal_guidance({}), std::invalid_argument);

    auto single = optimal_guidance({result(GuidanceKind::BehaviorClone, 7, 0, -0.2)});
    CHECK(single.first == GuidanceKind::BehaviorClone);
    CHECK(single.second == 7);

    // equal J: smaller t_G wins
    auto by_tg = optimal_guidance({result(GuidanceKind::Helper, 200, 0, 0.5),
                                   result(GuidanceKind::Helper, 100, 0, 0.5)});
    CHECK(by_tg.second == 100);

    // equal J and t_G: kind order Sparse < Helper < BehaviorClone
    auto by_kind = optimal_guidance({result(GuidanceKind::BehaviorClone, 100, 0, 0.5),
                                     result(GuidanceKind::Sparse, 100, 0, 0.5)});
    CHECK(by_kind.first == GuidanceKind::Sparse);
}

TEST_CASE("optimal_guidance is permutation-invariant") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<GuidanceResult> results;
        int n = 3 + static_cast<int>(rng.uniform_int(0, 9));
        for (int i = 0; i < n; ++i) {
            GuidanceKind kind = static_cast<GuidanceKind>(rng.uniform_int(0, 2));
            int64_t t_g = 1000 * rng.uniform_int(1, 4);
            results.push_back(result(kind, t_g, static_cast<uint64_t>(i),
                                     rng.uniform(-1.0, 1.0)));
        }
        auto base = optimal_guidance(results);
        std::vector<GuidanceResult> shuffled = results;
        for (size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1],
                      shuffled[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
        auto after = optimal_guidance(shuffled);
        CHECK(base.first == after.first);
        CHECK(base.second == after.second);
    }
}

TEST_CASE("eval_policy rejects zero episodes and stays on the base reward scale") {
    EnvConfig env;
    SenseParams senses;
    NetworkSpec spec;
    ParamSet p = make_params(spec, 2);
    CHECK_THROWS_AS(eval_policy(p, env, senses, 0, 1), std::invalid_argument);
    EvalResult ev = eval_policy(p, env, senses, 10, 1);
    CHECK(ev.episodes == 10);
    // per-episode base return is one of {-1, 0, +1}, so the mean is bounded
    CHECK(ev.mean >= -1.0);
    CHECK(ev.mean <= 1.0);
}

TEST_CASE("summarize writes one row per cell plus a documented header") {
    RunReport report;
    report.results = {result(GuidanceKind::Helper, 100, 0, 0.5)};
    CellSummary cell;
    cell.kind = GuidanceKind::Helper;
    cell.t_g = 100;
    cell.mean_j = 0.5;
    cell.stderr_j = 0.0;
    cell.max_j = 0.5;
    cell.seeds = 1;
    report.cells = {cell};
    report.best_kind = GuidanceKind::Helper;
    report.best_t_g = 100;

    auto path = std::filesystem::temp_directory_path() / "summary_test.csv";
    summarize(report, path.string());
    std::ifstream is(path);
    std::string comment, header, row, extra;
    std::getline(is, comment);
    std::getline(is, header);
    std::getline(is, row);
    CHECK(comment.rfind("#", 0) == 0);
    CHECK(header == "kind,t_g,seeds,mean_j,stderr_j,max_j,selected");
    CHECK(row == "helper,100,1,0.500000,0.000000,0.500000,1");
    CHECK_FALSE(std::getline(is, extra));
    std::filesystem::remove(path);
}

TEST_CASE("trajectory export writes pose CSV and SVG plots with room bounds") {
    EnvConfig env;
    SenseParams senses;
    NetworkSpec spec;
    ParamSet p = make_params(spec, 3);
    auto dir = std::filesystem::temp_directory_path() / "traj_test";
    std::filesystem::remove_all(dir);
    export_trajectories(p, env, senses, 2, 17, dir.string());

    CHECK(std::filesystem::exists(dir / "poses.csv"));
    CHECK(std::filesystem::exists(dir / "trajectory_0.svg"));
    CHECK(std::filesystem::exists(dir / "trajectory_1.svg"));

    std::ifstream csv(dir / "poses.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "episode,frame,x,y,heading");

    std::ifstream svg(dir / "trajectory_0.svg");
    std::stringstream ss;
    ss << svg.rdbuf();
    std::string body = ss.str();
    // 18-unit room at 30 px/unit
    CHECK(body.find("viewBox='0 0 540 540'") != std::string::npos);
    CHECK(body.find("<polyline") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("a tiny sweep aggregates cells and persists a summary") {
    RunConfig config;
    config.sac.workers = 2;
    config.sac.update_every = 64;
    config.sac.batch = 16;
    config.sac.warmup_transitions = 16;
    config.train.seed = 10;
    config.train.eval_every = 0;
    config.train.eval_episodes = 2;
    config.experiment.t_g_grid = {64};
    config.experiment.duration = 64;
    config.experiment.kinds = {GuidanceKind::Sparse, GuidanceKind::Helper};
    config.experiment.seeds = 2;
    config.experiment.eval_episodes = 3;

    auto dir = std::filesystem::temp_directory_path() / "sweep_test";
    std::filesystem::remove_all(dir);
    RunReport report = run_protocol(config, dir.string());
    CHECK(report.results.size() == 4);  // 2 kinds x 1 budget x 2 seeds
    CHECK(report.cells.size() == 2);
    for (const auto& cell : report.cells) CHECK(cell.seeds == 2);
    auto selected = optimal_guidance(report.results);
    CHECK(report.best_kind == selected.first);
    CHECK(report.best_t_g == selected.second);
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    std::filesystem::remove_all(dir);
}
