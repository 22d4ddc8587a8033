#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "playroom/adam.hpp"
#include "playroom/checkpoint.hpp"
#include "playroom/network.hpp"
#include "playroom/tensor.hpp"

using namespace playroom;

namespace {

Mat random_obs(const NetworkSpec& spec, int batch, Rng& rng) {
    Mat obs(batch, spec.obs_dim());
    for (double& v : obs.d) v = rng.uniform();
    // make the one-hot block an actual one-hot per row
    for (int r = 0; r < batch; ++r) {
        int base = spec.obs_dim() - 10;
        for (int c = 0; c < 10; ++c) obs.at(r, base + c) = 0.0;
        obs.at(r, base + rng.uniform_int(0, 9)) = 1.0;
    }
    return obs;
}

}  // namespace

TEST_CASE("invalid network specs cannot construct parameters") {
    NetworkSpec spec;
    spec.fusion_dim = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_params(spec, 1), std::invalid_argument);
}

TEST_CASE("gradient check passes for default shapes") {
    for (bool multimodal : {false, true}) {
        NetworkSpec spec;
        spec.multimodal = multimodal;
        for (uint64_t seed = 0; seed < 3; ++seed) {
            GradCheckReport report = grad_check(spec, seed);
            INFO("multimodal=" << multimodal << " seed=" << seed
                               << " worst=" << report.worst_param);
            CHECK(report.max_rel_error < 1e-4);
        }
    }
}

TEST_CASE("linear-layer gradient has the closed form") {
    // loss = sum of outputs of y = xW + b  =>  dW[i][o] = sum_r x[r][i], db[o] = batch
    Tensor w({3, 2});
    Tensor b({2});
    Rng rng(11);
    for (double& v : w.data) v = rng.uniform(-1.0, 1.0);
    Mat x(4, 3);
    for (double& v : x.d) v = rng.uniform(-1.0, 1.0);

    Tape tape;
    int xn = tape.input(x);
    int wn = tape.param(0, w, false);
    int bn = tape.param(1, b, true);
    int y = tape.linear(xn, wn, bn);
    int loss = tape.mean_all(y);  // mean = sum / 8
    tape.backward(loss);

    const Tensor& gw = tape.param_grad(0);
    for (int i = 0; i < 3; ++i)
        for (int o = 0; o < 2; ++o) {
            double want = 0.0;
            for (int r = 0; r < 4; ++r) want += x.at(r, i);
            want /= 8.0;
            CHECK(gw.data[static_cast<size_t>(i) * 2 + o] == doctest::Approx(want).epsilon(1e-12));
        }
    const Tensor& gb = tape.param_grad(1);
    for (int o = 0; o < 2; ++o)
        CHECK(gb.data[static_cast<size_t>(o)] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero object-embedding weights annihilate the features") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 5);
    for (double& v : p.at("e_w").data) v = 0.0;
    for (double& v : p.at("e_b").data) v = 0.0;
    Rng rng(6);
    Mat obs = random_obs(spec, 3, rng);
    Mat feat = infer_features(p, obs);
    for (double v : feat.d) CHECK(v == 0.0);
}

TEST_CASE("the target one-hot only enters through the mask") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 5);
    Rng rng(7);
    Mat obs = random_obs(spec, 1, rng);
    Mat obs2 = obs;
    int base = spec.obs_dim() - 10;
    for (int c = 0; c < 10; ++c) obs2.at(0, base + c) = 0.0;
    obs2.at(0, base + 0) = 0.0;
    obs2.at(0, base + 1) = 1.0;  // guaranteed different from obs? force it below
    for (int c = 0; c < 10; ++c) obs.at(0, base + c) = 0.0;
    obs.at(0, base + 0) = 1.0;

    Mat f1 = infer_features(p, obs);
    Mat f2 = infer_features(p, obs2);
    bool differs = false;
    for (size_t i = 0; i < f1.d.size(); ++i)
        if (f1.d[i] != f2.d[i]) differs = true;
    CHECK(differs);
}

TEST_CASE("forward is pure and the inference path is bit-identical to the tape") {
    NetworkSpec spec;
    spec.multimodal = true;
    ParamSet p = make_params(spec, 9);
    Rng rng(8);
    Mat obs = random_obs(spec, 2, rng);
    Mat action(2, 2);
    for (double& v : action.d) v = rng.uniform(-1.0, 1.0);

    ForwardOut a = forward(p, obs, action);
    ForwardOut b = forward(p, obs, action);
    for (size_t i = 0; i < a.q1.d.size(); ++i) CHECK(a.q1.d[i] == b.q1.d[i]);

    Mat feat = infer_features(p, obs);
    for (size_t i = 0; i < feat.d.size(); ++i) CHECK(feat.d[i] == a.features.d[i]);
    Mat mean, log_std;
    infer_policy(p, obs, mean, log_std);
    for (size_t i = 0; i < mean.d.size(); ++i) CHECK(mean.d[i] == a.mean.d[i]);
    for (size_t i = 0; i < log_std.d.size(); ++i) {
        CHECK(log_std.d[i] == a.log_std.d[i]);
        CHECK(log_std.d[i] >= kLogStdMin);
        CHECK(log_std.d[i] <= kLogStdMax);
    }
    Mat q1 = infer_q(p, feat, action, 1);
    Mat q2 = infer_q(p, feat, action, 2);
    for (int r = 0; r < 2; ++r) {
        CHECK(q1.at(r, 0) == a.q1.at(r, 0));
        CHECK(q2.at(r, 0) == a.q2.at(r, 0));
    }
}

TEST_CASE("forward outputs are finite on bounded observations") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 123);
    Rng rng(4);
    Mat obs = random_obs(spec, 8, rng);
    Mat action(8, 2);
    for (double& v : action.d) v = rng.uniform(-1.0, 1.0);
    ForwardOut out = forward(p, obs, action);
    for (double v : out.features.d) CHECK(std::isfinite(v));
    for (double v : out.mean.d) CHECK(std::isfinite(v));
    for (double v : out.q1.d) CHECK(std::isfinite(v));
    for (double v : out.q2.d) CHECK(std::isfinite(v));
}

TEST_CASE("adam updates follow the standard rule") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 1);

    SUBCASE("zero gradients leave parameters unchanged") {
        AdamState opt = AdamState::for_params(p, 0.001);
        std::vector<Tensor> before;
        for (const auto& prm : p.params) before.push_back(prm.value);
        std::vector<const Tensor*> grads(p.params.size(), nullptr);
        std::vector<Tensor> zero;
        zero.reserve(p.params.size());
        for (const auto& prm : p.params) zero.emplace_back(prm.value.shape);
        for (size_t i = 0; i < zero.size(); ++i) grads[i] = &zero[i];
        adam_step(p, grads, opt);
        CHECK(opt.t == 1);
        for (size_t i = 0; i < p.params.size(); ++i)
            for (size_t k = 0; k < p.params[i].value.size(); ++k)
                CHECK(p.params[i].value.data[k] == before[i].data[k]);
    }

    SUBCASE("first step with constant gradient is -lr * sign(g)") {
        AdamState opt = AdamState::for_params(p, 0.001);
        double before0 = p.params[0].value.data[0];
        std::vector<Tensor> g;
        g.reserve(p.params.size());
        for (const auto& prm : p.params) {
            Tensor t(prm.value.shape);
            for (double& v : t.data) v = 0.37;  // any positive constant
            g.push_back(std::move(t));
        }
        std::vector<const Tensor*> grads;
        for (const auto& t : g) grads.push_back(&t);
        adam_step(p, grads, opt);
        // bias-corrected m/sqrt(v) = g/|g| up to epsilon
        CHECK(p.params[0].value.data[0] ==
              doctest::Approx(before0 - 0.001).epsilon(1e-4));
    }

    SUBCASE("lr = 0 leaves parameters unchanged") {
        AdamState opt = AdamState::for_params(p, 0.0);
        double before0 = p.params[0].value.data[0];
        std::vector<Tensor> g;
        for (const auto& prm : p.params) {
            Tensor t(prm.value.shape);
            for (double& v : t.data) v = 1.0;
            g.push_back(std::move(t));
        }
        std::vector<const Tensor*> grads;
        for (const auto& t : g) grads.push_back(&t);
        adam_step(p, grads, opt);
        CHECK(p.params[0].value.data[0] == before0);
    }

    SUBCASE("non-finite gradients reject the update") {
        AdamState opt = AdamState::for_params(p, 0.001);
        double before0 = p.params[0].value.data[0];
        std::vector<Tensor> g;
        for (const auto& prm : p.params) g.emplace_back(prm.value.shape);
        g[0].data[0] = std::numeric_limits<double>::quiet_NaN();
        std::vector<const Tensor*> grads;
        for (const auto& t : g) grads.push_back(&t);
        CHECK_THROWS_AS(adam_step(p, grads, opt), std::runtime_error);
        CHECK(p.params[0].value.data[0] == before0);
    }
}

TEST_CASE("checkpoints round-trip through the binary format") {
    NetworkSpec spec;
    spec.multimodal = true;
    ParamSet p = make_params(spec, 77);
    std::string path = (std::filesystem::temp_directory_path() / "netcore_ckpt_test.bin").string();
    save_checkpoint(p, path);
    CHECK(checkpoint_spec_hash(path) == spec.hash());

    ParamSet loaded = load_checkpoint(path, spec);
    REQUIRE(loaded.params.size() == p.params.size());
    for (size_t i = 0; i < p.params.size(); ++i) {
        CHECK(loaded.params[i].name == p.params[i].name);
        for (size_t k = 0; k < p.params[i].value.size(); ++k) {
            // values survive the float32 narrowing exactly once
            float f = static_cast<float>(p.params[i].value.data[k]);
            CHECK(loaded.params[i].value.data[k] == static_cast<double>(f));
        }
    }

    NetworkSpec other;
    other.multimodal = false;
    CHECK_THROWS_AS(load_checkpoint(path, other), std::runtime_error);
    std::filesystem::remove(path);
}
