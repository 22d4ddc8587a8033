#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>

#include "playroom/checkpoint.hpp"
#include "playroom/transfer.hpp"

using namespace playroom;

namespace {

ProbeDataset small_dataset(uint64_t seed, int n_per_class = 30) {
    EnvConfig env;
    SenseParams senses;
    return generate_probe_dataset(n_per_class, seed, env, senses);
}

}  // namespace

TEST_CASE("dataset construction is balanced, split and deterministic") {
    ProbeDataset a = small_dataset(42, 100);
    CHECK(a.train_features.size() == 800);
    CHECK(a.test_features.size() == 200);
    CHECK(a.feature_dim == 256);
    for (int c = 0; c < 10; ++c) {
        CHECK(std::count(a.train_labels.begin(), a.train_labels.end(), c) == 80);
        CHECK(std::count(a.test_labels.begin(), a.test_labels.end(), c) == 20);
    }

    ProbeDataset b = small_dataset(42, 100);
    CHECK(a.train_features == b.train_features);
    CHECK(a.test_features == b.test_features);
    CHECK(a.train_labels == b.train_labels);

    CHECK_THROWS_AS(generate_probe_dataset(0, 1, EnvConfig{}, SenseParams{}),
                    std::invalid_argument);
}

TEST_CASE("every probe view actually shows its object") {
    ProbeDataset ds = small_dataset(7, 20);
    auto check_split = [&](const std::vector<std::vector<double>>& feats) {
        for (const auto& f : feats) {
            bool object_hit = false;
            for (size_t i = 0; i + 3 < f.size(); i += 4) {
                double r = f[i], g = f[i + 1], b = f[i + 2];
                // object discs have exactly one lit channel; walls are mid-gray
                int zero = (r == 0.0) + (g == 0.0) + (b == 0.0);
                if (zero == 2) object_hit = true;
            }
            CHECK(object_hit);
        }
    };
    check_split(ds.train_features);
    check_split(ds.test_features);
}

TEST_CASE("linear_probe freezes the encoder and learns above chance") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 5);
    std::vector<Tensor> before;
    for (const auto& prm : p.params) before.push_back(prm.value);

    ProbeDataset ds = small_dataset(3, 50);
    ProbeReport report = linear_probe(p, ds, 600, 0.01, 1);

    for (size_t i = 0; i < p.params.size(); ++i)
        CHECK(std::memcmp(p.params[i].value.data.data(), before[i].data.data(),
                          before[i].size() * sizeof(double)) == 0);

    CHECK(report.train_accuracy > 0.2);  // well above the 0.1 chance level
    CHECK(report.test_accuracy >= 0.0);
    CHECK(report.test_accuracy <= 1.0);

    // accuracy agrees with the confusion matrix
    int diag = 0, total = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            total += report.confusion[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (i == j) diag += report.confusion[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
    CHECK(total == static_cast<int>(ds.test_features.size()));
    CHECK(report.test_accuracy == doctest::Approx(static_cast<double>(diag) / total));
}

TEST_CASE("shuffled labels collapse the probe to chance level") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 6);
    ProbeDataset ds = small_dataset(8, 100);
    Rng rng(9);
    for (size_t i = ds.train_labels.size(); i > 1; --i)
        std::swap(ds.train_labels[i - 1],
                  ds.train_labels[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    ProbeReport report = linear_probe(p, ds, 400, 0.01, 2);
    CHECK(report.test_accuracy >= 0.0);
    CHECK(report.test_accuracy <= 0.22);  // 0.10 +/- a generous margin
}

TEST_CASE("probe accuracy is invariant to dataset item order") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 11);
    ProbeDataset ds = small_dataset(13, 30);
    ProbeReport base = linear_probe(p, ds, 300, 0.01, 3);

    ProbeDataset shuffled = ds;
    Rng rng(14);
    for (size_t i = shuffled.train_features.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
        std::swap(shuffled.train_features[i - 1], shuffled.train_features[j]);
        std::swap(shuffled.train_labels[i - 1], shuffled.train_labels[j]);
    }
    ProbeReport after = linear_probe(p, shuffled, 300, 0.01, 3);
    CHECK(std::fabs(base.test_accuracy - after.test_accuracy) <= 0.03);
}

TEST_CASE("train accuracy dominates test accuracy on average") {
    NetworkSpec spec;
    double train_sum = 0.0, test_sum = 0.0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        ParamSet p = make_params(spec, 100 + seed);
        ProbeDataset ds = small_dataset(20 + seed, 30);
        ProbeReport r = linear_probe(p, ds, 300, 0.01, seed);
        train_sum += r.train_accuracy;
        test_sum += r.test_accuracy;
    }
    CHECK(train_sum >= test_sum);
}

TEST_CASE("probe_sweep ranks checkpoints and rejects mixed specs") {
    NetworkSpec spec;
    ParamSet p = make_params(spec, 21);
    auto dir = std::filesystem::temp_directory_path() / "probe_sweep_test";
    std::filesystem::create_directories(dir);
    std::string ck1 = (dir / "a.ckpt").string();
    std::string ck2 = (dir / "b.ckpt").string();
    save_checkpoint(p, ck1);
    save_checkpoint(p, ck2);

    ProbeDataset ds = small_dataset(31, 20);
    ProbeRanking ranking = probe_sweep({ck1, ck2}, spec, ds, 200, 0.01, 4);
    REQUIRE(ranking.checkpoints.size() == 2);
    // identical checkpoints with the same probe seed give identical accuracy
    CHECK(ranking.accuracies[0] == ranking.accuracies[1]);

    NetworkSpec other;
    other.multimodal = true;
    ParamSet q = make_params(other, 22);
    std::string ck3 = (dir / "c.ckpt").string();
    save_checkpoint(q, ck3);
    CHECK_THROWS_AS(probe_sweep({ck1, ck3}, spec, ds, 200, 0.01, 4), std::invalid_argument);
    CHECK_THROWS_AS(probe_sweep({}, spec, ds, 200, 0.01, 4), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("datasets round-trip through the binary cache") {
    ProbeDataset ds = small_dataset(51, 10);
    auto path = std::filesystem::temp_directory_path() / "probe_ds_test.bin";
    save_probe_dataset(ds, path.string());
    ProbeDataset loaded = load_probe_dataset(path.string());
    CHECK(loaded.feature_dim == ds.feature_dim);
    CHECK(loaded.train_labels == ds.train_labels);
    CHECK(loaded.test_labels == ds.test_labels);
    REQUIRE(loaded.train_features.size() == ds.train_features.size());
    for (size_t i = 0; i < ds.train_features.size(); ++i)
        for (size_t k = 0; k < ds.train_features[i].size(); ++k) {
            float f = static_cast<float>(ds.train_features[i][k]);
            CHECK(loaded.train_features[i][k] == static_cast<double>(f));
        }
    std::filesystem::remove(path);
}
