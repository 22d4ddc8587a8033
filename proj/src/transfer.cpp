#include "playroom/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "playroom/checkpoint.hpp"
#include "playroom/tensor.hpp"

namespace playroom {

namespace {

std::vector<double> render_view(int category, Rng& rng, const EnvConfig& env_config,
                                const SenseParams& sense_params) {
    double fov = deg_to_rad(sense_params.fov_half_angle_deg);
    double margin = deg_to_rad(5.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        EpisodeState state;
        state.pose.x = rng.uniform(0.2 * env_config.room_side, 0.8 * env_config.room_side);
        state.pose.y = rng.uniform(0.2 * env_config.room_side, 0.8 * env_config.room_side);
        state.pose.heading = wrap_angle(rng.uniform(-kPi, kPi));
        double bearing = rng.uniform(-(fov - margin), fov - margin);
        double dist = rng.uniform(1.5, 8.0);
        ObjectInstance obj;
        obj.category = category;
        obj.color = static_cast<ObjectColor>(rng.uniform_int(0, 2));
        obj.radius = env_config.object_radius;
        obj.x = state.pose.x + dist * std::cos(state.pose.heading + bearing);
        obj.y = state.pose.y + dist * std::sin(state.pose.heading + bearing);
        if (obj.x < obj.radius || obj.x > env_config.room_side - obj.radius ||
            obj.y < obj.radius || obj.y > env_config.room_side - obj.radius)
            continue;
        state.objects.push_back(obj);
        state.target_index = 0;
        VisionObs vision = render_vision(state, env_config, sense_params);
        std::vector<double> flat;
        flat.reserve(static_cast<size_t>(2 * sense_params.n_rays * 4));
        for (const auto& eye : vision.eyes)
            for (const auto& s : eye) {
                flat.push_back(s.r);
                flat.push_back(s.g);
                flat.push_back(s.b);
                flat.push_back(s.depth);
            }
        return flat;
    }
    throw std::runtime_error("generate_probe_dataset: could not place object in room");
}

}  // namespace

ProbeDataset generate_probe_dataset(int n_per_class, uint64_t seed, const EnvConfig& env_config,
                                    const SenseParams& sense_params) {
    if (n_per_class < 1)
        throw std::invalid_argument("generate_probe_dataset: n_per_class must be >= 1");
    ProbeDataset ds;
    ds.feature_dim = 2 * sense_params.n_rays * 4;
    int n_train = std::max(1, (n_per_class * 4) / 5);
    int n_test = n_per_class - n_train;
    for (int c = 0; c < 10; ++c) {
        Rng train_rng(Rng::derive(seed, 100 + static_cast<uint64_t>(c)));
        for (int i = 0; i < n_train; ++i) {
            ds.train_features.push_back(render_view(c, train_rng, env_config, sense_params));
            ds.train_labels.push_back(c);
        }
        // test stream is seeded disjointly from the train stream
        Rng test_rng(Rng::derive(seed, 900 + static_cast<uint64_t>(c)));
        for (int i = 0; i < n_test; ++i) {
            ds.test_features.push_back(render_view(c, test_rng, env_config, sense_params));
            ds.test_labels.push_back(c);
        }
    }
    return ds;
}

namespace {

// frozen vision-encoder features for a batch of raw ray scans
Mat encode(const ParamSet& encoder, const std::vector<std::vector<double>>& features) {
    const Tensor& w1 = encoder.at("v1_w");
    int in_dim = w1.shape[0];
    Mat x(static_cast<int>(features.size()), in_dim);
    for (size_t r = 0; r < features.size(); ++r) {
        if (static_cast<int>(features[r].size()) != in_dim)
            throw std::invalid_argument("linear_probe: feature width does not match encoder");
        std::copy(features[r].begin(), features[r].end(),
                  x.d.begin() + static_cast<size_t>(r) * in_dim);
    }
    Tape tape;
    int node = tape.input(std::move(x));
    int w1n = tape.param(0, encoder.at("v1_w"), false);
    int b1n = tape.param(1, encoder.at("v1_b"), true);
    int w2n = tape.param(2, encoder.at("v2_w"), false);
    int b2n = tape.param(3, encoder.at("v2_b"), true);
    int h = tape.relu(tape.linear(node, w1n, b1n));
    int out = tape.relu(tape.linear(h, w2n, b2n));
    return tape.value(out);
}

struct TinyAdam {
    double lr;
    long long t = 0;
    Tensor m_w, v_w, m_b, v_b;

    TinyAdam(double lr_, const Tensor& w, const Tensor& b)
        : lr(lr_), m_w(w.shape), v_w(w.shape), m_b(b.shape), v_b(b.shape) {}

    void step(Tensor& p, const Tensor& g, Tensor& m, Tensor& v, double bc1, double bc2) {
        for (size_t k = 0; k < p.size(); ++k) {
            m.data[k] = 0.9 * m.data[k] + 0.1 * g.data[k];
            v.data[k] = 0.999 * v.data[k] + 0.001 * g.data[k] * g.data[k];
            p.data[k] -= lr * (m.data[k] / bc1) / (std::sqrt(v.data[k] / bc2) + 1e-8);
        }
    }

    void update(Tensor& w, Tensor& b, const Tensor& gw, const Tensor& gb) {
        ++t;
        double bc1 = 1.0 - std::pow(0.9, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(0.999, static_cast<double>(t));
        step(w, gw, m_w, v_w, bc1, bc2);
        step(b, gb, m_b, v_b, bc1, bc2);
    }
};

int predict_row(const Mat& feats, int r, const Tensor& w, const Tensor& b) {
    int best = 0;
    double best_v = -1e300;
    for (int c = 0; c < 10; ++c) {
        double v = b.data[static_cast<size_t>(c)];
        for (int i = 0; i < feats.cols; ++i)
            v += feats.at(r, i) * w.data[static_cast<size_t>(i) * 10 + c];
        if (v > best_v) {
            best_v = v;
            best = c;
        }
    }
    return best;
}

}  // namespace

ProbeReport linear_probe(const ParamSet& encoder, const ProbeDataset& dataset, int max_epochs,
                         double lr, uint64_t seed) {
    if (dataset.train_features.empty()) throw std::invalid_argument("linear_probe: empty dataset");
    Mat train_feats = encode(encoder, dataset.train_features);
    Mat test_feats = encode(encoder, dataset.test_features);
    int feat_dim = train_feats.cols;

    Rng rng(Rng::derive(seed, 31));
    Tensor w({feat_dim, 10});
    double bound = std::sqrt(1.0 / feat_dim);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    Tensor b({10});
    TinyAdam opt(lr, w, b);

    double best_loss = 1e300;
    int stale = 0;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        Tape tape;
        int x = tape.input(train_feats);
        int wn = tape.param(0, w, false);
        int bn = tape.param(1, b, true);
        int logits = tape.linear(x, wn, bn);
        int loss = tape.softmax_xent(logits, dataset.train_labels);
        double loss_value = tape.value(loss).at(0, 0);
        tape.backward(loss);
        opt.update(w, b, tape.param_grad(0), tape.param_grad(1));
        // plateau stop
        if (loss_value < best_loss - 1e-7) {
            best_loss = loss_value;
            stale = 0;
        } else if (++stale >= 25) {
            break;
        }
    }

    ProbeReport report;
    int hit = 0;
    for (int r = 0; r < train_feats.rows; ++r)
        if (predict_row(train_feats, r, w, b) == dataset.train_labels[static_cast<size_t>(r)])
            ++hit;
    report.train_accuracy = static_cast<double>(hit) / train_feats.rows;
    hit = 0;
    for (int r = 0; r < test_feats.rows; ++r) {
        int pred = predict_row(test_feats, r, w, b);
        int truth = dataset.test_labels[static_cast<size_t>(r)];
        report.confusion[static_cast<size_t>(truth)][static_cast<size_t>(pred)] += 1;
        if (pred == truth) ++hit;
    }
    report.test_accuracy = test_feats.rows > 0 ? static_cast<double>(hit) / test_feats.rows : 0.0;
    return report;
}

ProbeRanking probe_sweep(const std::vector<std::string>& checkpoint_paths,
                         const NetworkSpec& spec, const ProbeDataset& dataset, int max_epochs,
                         double lr, uint64_t seed) {
    if (checkpoint_paths.empty()) throw std::invalid_argument("probe_sweep: no checkpoints");
    uint64_t hash0 = checkpoint_spec_hash(checkpoint_paths.front());
    for (const auto& path : checkpoint_paths)
        if (checkpoint_spec_hash(path) != hash0)
            throw std::invalid_argument("probe_sweep: mixed checkpoint spec hashes");

    std::vector<std::pair<double, std::string>> scored;
    for (const auto& path : checkpoint_paths) {
        ParamSet params = load_checkpoint(path, spec);
        ProbeReport report = linear_probe(params, dataset, max_epochs, lr, seed);
        scored.emplace_back(report.test_accuracy, path);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    ProbeRanking ranking;
    for (const auto& [acc, path] : scored) {
        ranking.checkpoints.push_back(path);
        ranking.accuracies.push_back(acc);
    }
    return ranking;
}

void save_probe_dataset(const ProbeDataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_probe_dataset: cannot open " + path);
    const char magic[8] = {'P', 'R', 'P', 'R', 'O', 'B', 'E', '1'};
    os.write(magic, sizeof(magic));
    auto write_u32 = [&](uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    write_u32(static_cast<uint32_t>(ds.feature_dim));
    write_u32(static_cast<uint32_t>(ds.train_features.size()));
    write_u32(static_cast<uint32_t>(ds.test_features.size()));
    auto write_split = [&](const std::vector<std::vector<double>>& feats,
                           const std::vector<int>& labels) {
        for (const auto& f : feats)
            for (double v : f) {
                float fv = static_cast<float>(v);
                os.write(reinterpret_cast<const char*>(&fv), 4);
            }
        for (int l : labels) {
            uint8_t b = static_cast<uint8_t>(l);
            os.write(reinterpret_cast<const char*>(&b), 1);
        }
    };
    write_split(ds.train_features, ds.train_labels);
    write_split(ds.test_features, ds.test_labels);
}

ProbeDataset load_probe_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_probe_dataset: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "PRPROBE1", 8) != 0)
        throw std::runtime_error("load_probe_dataset: bad magic");
    auto read_u32 = [&]() {
        uint32_t v = 0;
        is.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    ProbeDataset ds;
    ds.feature_dim = static_cast<int>(read_u32());
    uint32_t n_train = read_u32();
    uint32_t n_test = read_u32();
    auto read_split = [&](std::vector<std::vector<double>>& feats, std::vector<int>& labels,
                          uint32_t n) {
        feats.assign(n, std::vector<double>(static_cast<size_t>(ds.feature_dim)));
        for (auto& f : feats)
            for (double& v : f) {
                float fv = 0.0f;
                is.read(reinterpret_cast<char*>(&fv), 4);
                v = static_cast<double>(fv);
            }
        labels.assign(n, 0);
        for (int& l : labels) {
            uint8_t b = 0;
            is.read(reinterpret_cast<char*>(&b), 1);
            l = b;
        }
    };
    read_split(ds.train_features, ds.train_labels, n_train);
    read_split(ds.test_features, ds.test_labels, n_test);
    if (!is) throw std::runtime_error("load_probe_dataset: truncated file");
    return ds;
}

}  // namespace playroom
