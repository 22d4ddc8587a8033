#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "playroom/guidance.hpp"

using namespace playroom;

namespace {

EpisodeState state_with_target_bearing(double bearing_rad, double distance) {
    EpisodeState s;
    s.pose = {9.0, 9.0, 0.0};
    ObjectInstance obj;
    obj.category = 2;
    obj.x = 9.0 + distance * std::cos(bearing_rad);
    obj.y = 9.0 + distance * std::sin(bearing_rad);
    s.objects = {obj};
    s.target_index = 0;
    return s;
}

}  // namespace

TEST_CASE("guidance kind names round-trip") {
    for (GuidanceKind k :
         {GuidanceKind::Sparse, GuidanceKind::Helper, GuidanceKind::BehaviorClone})
        CHECK(guidance_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(guidance_kind_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("helper reward matches the branch formulas on the exhaustive 27-case grid") {
    HelperCoefficients coeffs;
    const double afs[] = {0.0, 0.5, 1.0};
    const double ars[] = {-1.0, 0.0, 1.0};
    for (EyesightStatus st : {EyesightStatus::Out, EyesightStatus::Left, EyesightStatus::Right})
        for (double af : afs)
            for (double ar : ars) {
                double got = helper_reward(st, Action{af, ar}, coeffs);
                double want = 0.0;
                switch (st) {
                    case EyesightStatus::Out: want = -0.03 * af; break;
                    case EyesightStatus::Left: want = 0.05 * ar + 0.03 * af; break;
                    case EyesightStatus::Right: want = -0.05 * ar + 0.03 * af; break;
                }
                CHECK(got == want);  // exact equality, no tolerance
            }
}

TEST_CASE("named helper reward examples") {
    HelperCoefficients coeffs;
    CHECK(helper_reward(EyesightStatus::Out, Action{1.0, 0.7}, coeffs) == -0.03);
    CHECK(helper_reward(EyesightStatus::Left, Action{1.0, 1.0}, coeffs) == 0.08);
    CHECK(helper_reward(EyesightStatus::Right, Action{0.0, 0.0}, coeffs) == 0.0);
}

TEST_CASE("effective reward equals base exactly outside the guidance window") {
    HelperCoefficients coeffs;
    GuidanceSchedule sched{GuidanceKind::Helper, 100, 50};
    Action a{1.0, 1.0};
    double base = 0.25;
    for (int64_t frame : {int64_t{0}, int64_t{98}, int64_t{99}, int64_t{150}, int64_t{151},
                          int64_t{100000}})
        CHECK(effective_reward(sched, frame, base, EyesightStatus::Left, a, coeffs) == base);
    for (int64_t frame : {int64_t{100}, int64_t{101}, int64_t{149}})
        CHECK(effective_reward(sched, frame, base, EyesightStatus::Left, a, coeffs) ==
              base + 0.08);
    // the frame index is the only thing that changed across the boundary
    CHECK(effective_reward(sched, 99, base, EyesightStatus::Left, a, coeffs) !=
          effective_reward(sched, 100, base, EyesightStatus::Left, a, coeffs));
}

TEST_CASE("sparse and behavior-clone schedules never touch the reward") {
    HelperCoefficients coeffs;
    for (GuidanceKind kind : {GuidanceKind::Sparse, GuidanceKind::BehaviorClone}) {
        GuidanceSchedule sched{kind, 0, 1000};
        for (int64_t frame : {int64_t{0}, int64_t{500}, int64_t{999}})
            CHECK(effective_reward(sched, frame, -1.0, EyesightStatus::Left, Action{1.0, 1.0},
                                   coeffs) == -1.0);
    }
}

TEST_CASE("mentor searches when blind and tracks when the target is visible") {
    SenseParams params;
    double half = deg_to_rad(params.fov_half_angle_deg);

    EpisodeState out = state_with_target_bearing(kPi, 5.0);
    Action a = mentor_action(out, params);
    CHECK(a.a_f == 0.0);
    CHECK(a.a_r == 1.0);

    EpisodeState ahead = state_with_target_bearing(0.0, 5.0);
    a = mentor_action(ahead, params);
    CHECK(a.a_f == 1.0);
    CHECK(a.a_r == doctest::Approx(0.0));

    EpisodeState half_left = state_with_target_bearing(half / 2.0, 5.0);
    a = mentor_action(half_left, params);
    CHECK(a.a_f == 1.0);
    CHECK(a.a_r == doctest::Approx(0.125));

    EpisodeState half_right = state_with_target_bearing(-half / 2.0, 5.0);
    a = mentor_action(half_right, params);
    CHECK(a.a_r == doctest::Approx(-0.125));
}

TEST_CASE("mentor actions stay within bounds and turn toward the target") {
    SenseParams params;
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        double bearing = rng.uniform(-kPi, kPi);
        EpisodeState s = state_with_target_bearing(bearing, rng.uniform(1.0, 12.0));
        Action a = mentor_action(s, params);
        CHECK(a.a_f >= 0.0);
        CHECK(a.a_f <= 1.0);
        CHECK(a.a_r >= -1.0);
        CHECK(a.a_r <= 1.0);
        if (eyesight_status(s, params) != EyesightStatus::Out)
            CHECK(a.a_r * bearing >= 0.0);  // tracking turn has the bearing's sign
    }
}

TEST_CASE("exact potential constructions are recognized") {
    int n_states = 6, n_actions = 3;
    double gamma = 0.9;
    size_t total = static_cast<size_t>(n_states) * n_actions * n_states;
    Rng rng(3);
    std::vector<double> phi(static_cast<size_t>(n_states));
    for (double& p : phi) p = rng.uniform(-5.0, 5.0);

    std::vector<double> f(total, 0.0);
    std::vector<uint8_t> support(total, 0);
    for (size_t idx = 0; idx < total; ++idx) {
        if (rng.uniform() < 0.4) continue;  // sparse support
        int s2 = static_cast<int>(idx % n_states);
        int s = static_cast<int>(idx / (static_cast<size_t>(n_actions) * n_states));
        support[idx] = 1;
        f[idx] = gamma * phi[static_cast<size_t>(s2)] - phi[static_cast<size_t>(s)];
    }
    PotentialFitReport report = is_potential_based(f, support, n_states, n_actions, gamma);
    CHECK(report.representable);
    CHECK(report.residual < 1e-9);
}

TEST_CASE("zero shaping is trivially potential-based") {
    int n_states = 4, n_actions = 2;
    size_t total = static_cast<size_t>(n_states) * n_actions * n_states;
    std::vector<double> f(total, 0.0);
    std::vector<uint8_t> support(total, 1);
    PotentialFitReport report = is_potential_based(f, support, n_states, n_actions, 0.9);
    CHECK(report.representable);
    for (double p : report.potential) CHECK(std::fabs(p) < 1e-6);
}

TEST_CASE("a nonzero constant with gamma = 1 is not potential-based") {
    int n_states = 4, n_actions = 2;
    size_t total = static_cast<size_t>(n_states) * n_actions * n_states;
    std::vector<double> f(total, 0.5);
    std::vector<uint8_t> support(total, 1);
    PotentialFitReport report = is_potential_based(f, support, n_states, n_actions, 1.0);
    CHECK_FALSE(report.representable);
    CHECK(report.residual > 1e-3);
}

TEST_CASE("degenerate potential-fit inputs are usage errors") {
    CHECK_THROWS_AS(is_potential_based({}, {}, 0, 0, 0.9), std::invalid_argument);
    std::vector<double> f(8, 0.0);
    std::vector<uint8_t> support(8, 0);  // nothing supported
    CHECK_THROWS_AS(is_potential_based(f, support, 2, 2, 0.9), std::invalid_argument);
}
