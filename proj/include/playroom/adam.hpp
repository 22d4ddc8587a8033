#pragma once

#include <vector>

#include "playroom/network.hpp"
#include "playroom/tensor.hpp"

namespace playroom {

struct AdamState {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long t = 0;
    std::vector<Tensor> m;  // first moments, one per parameter
    std::vector<Tensor> v;  // second moments

    static AdamState for_params(const ParamSet& params, double lr);
};

// One Adam step over the selected parameters. `grads[i]` may be null for
// parameters that did not participate; they are skipped. Throws on non-finite
// gradients without touching any parameter.
void adam_step(ParamSet& params, const std::vector<const Tensor*>& grads, AdamState& state);

// convenience: pull gradients for a subset of partitions out of a tape
std::vector<const Tensor*> collect_grads(const Tape& tape, const ParamSet& params,
                                         const std::vector<Partition>& partitions);

}  // namespace playroom
