#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playroom/rng.hpp"
#include "playroom/tensor.hpp"

namespace playroom {

enum class Partition {
    VisionEncoder,
    AudioEncoder,
    Fusion,
    ObjectEmbed,
    PolicyHead,
    QHead1,
    QHead2,
};

struct NetworkSpec {
    int n_rays = 32;
    bool multimodal = false;
    int vision_hidden = 64;
    int vision_out = 64;
    int audio_hidden = 32;
    int fusion_dim = 64;  // interaction feature dimension F; embedding dim equals F
    int head_hidden = 64;

    int vision_in() const { return 2 * n_rays * 4; }
    int audio_in() const { return 20; }
    int obs_dim() const { return vision_in() + (multimodal ? audio_in() : 0) + 10; }

    void validate() const;
    std::string serialize() const;
    uint64_t hash() const;
};

struct Param {
    std::string name;
    Partition partition;
    Tensor value;
    bool is_bias = false;
};

struct ParamSet {
    NetworkSpec spec;
    std::vector<Param> params;

    int index_of(const std::string& name) const;
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    size_t total_size() const;
};

ParamSet make_params(const NetworkSpec& spec, uint64_t seed);

// log-std bounds for the policy head
constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;

// Tape-based forward passes. Observations are rows of the flat layout
// (vision, audio if multimodal, target one-hot).
struct PolicyNodes {
    int features = -1;  // masked interaction features, batch x F
    int mean = -1;      // batch x 2 (pre-squash, order: a_f, a_r)
    int log_std = -1;   // batch x 2, clamped
};

int features_forward(Tape& tape, const ParamSet& p, int obs_node);
PolicyNodes policy_forward(Tape& tape, const ParamSet& p, int obs_node);
int q_forward(Tape& tape, const ParamSet& p, int features_node, int action_node, int head);

// whole-network forward for one observation batch and one action batch;
// returns masked features, policy mean/log-std and both Q columns
struct ForwardOut {
    Mat features;
    Mat mean;
    Mat log_std;
    Mat q1;
    Mat q2;
};
ForwardOut forward(const ParamSet& p, const Mat& obs, const Mat& action);

// tape-free inference path (bit-identical to the tape forward)
Mat infer_features(const ParamSet& p, const Mat& obs);
void infer_policy(const ParamSet& p, const Mat& obs, Mat& mean, Mat& log_std);
Mat infer_q(const ParamSet& p, const Mat& features, const Mat& action, int head);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
};

// compares reverse-mode gradients against central finite differences over all
// parameters on a random input and random linear loss
// compares reverse-mode gradients against central finite differences on a
// deterministic sample of up to coords_per_param coordinates per parameter
// tensor (small tensors are covered exhaustively); coords_per_param <= 0
// checks every coordinate
GradCheckReport grad_check(const NetworkSpec& spec, uint64_t seed, double h = 1e-4,
                           int coords_per_param = 64);

}  // namespace playroom
