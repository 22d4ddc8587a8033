#pragma once

#include <array>
#include <string>
#include <vector>

#include "playroom/network.hpp"
#include "playroom/senses.hpp"
#include "playroom/world.hpp"

namespace playroom {

// synthetic single-object views rendered through the binocular ray scan
struct ProbeDataset {
    int feature_dim = 0;                 // flattened vision block width
    std::vector<std::vector<double>> train_features;
    std::vector<int> train_labels;
    std::vector<std::vector<double>> test_features;
    std::vector<int> test_labels;
};

struct ProbeReport {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::array<std::array<int, 10>, 10> confusion{};  // [true][predicted], test split
};

// one object of random color per view, distance in [1.5, 8], bearing inside
// the FOV; 80/20 train/test split from disjoint seed streams
ProbeDataset generate_probe_dataset(int n_per_class, uint64_t seed, const EnvConfig& env_config,
                                    const SenseParams& sense_params);

// trains a linear softmax head on frozen vision-encoder features
ProbeReport linear_probe(const ParamSet& encoder, const ProbeDataset& dataset, int max_epochs,
                         double lr, uint64_t seed);

struct ProbeRanking {
    std::vector<std::string> checkpoints;  // sorted by descending test accuracy
    std::vector<double> accuracies;
};

ProbeRanking probe_sweep(const std::vector<std::string>& checkpoint_paths,
                         const NetworkSpec& spec, const ProbeDataset& dataset, int max_epochs,
                         double lr, uint64_t seed);

// flat binary cache: header + float32 features + uint8 labels
void save_probe_dataset(const ProbeDataset& dataset, const std::string& path);
ProbeDataset load_probe_dataset(const std::string& path);

}  // namespace playroom
