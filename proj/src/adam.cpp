#include "playroom/adam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace playroom {

AdamState AdamState::for_params(const ParamSet& params, double lr) {
    AdamState s;
    s.lr = lr;
    s.m.reserve(params.params.size());
    s.v.reserve(params.params.size());
    for (const auto& p : params.params) {
        s.m.emplace_back(p.value.shape);
        s.v.emplace_back(p.value.shape);
    }
    return s;
}

void adam_step(ParamSet& params, const std::vector<const Tensor*>& grads, AdamState& state) {
    if (grads.size() != params.params.size() || state.m.size() != params.params.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    for (size_t i = 0; i < grads.size(); ++i) {
        if (!grads[i]) continue;
        if (grads[i]->size() != params.params[i].value.size())
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        for (double g : grads[i]->data)
            if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
    }
    state.t += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < grads.size(); ++i) {
        if (!grads[i]) continue;
        Tensor& p = params.params[i].value;
        Tensor& m = state.m[i];
        Tensor& v = state.v[i];
        for (size_t k = 0; k < p.size(); ++k) {
            double g = grads[i]->data[k];
            m.data[k] = state.beta1 * m.data[k] + (1.0 - state.beta1) * g;
            v.data[k] = state.beta2 * v.data[k] + (1.0 - state.beta2) * g * g;
            double mhat = m.data[k] / bc1;
            double vhat = v.data[k] / bc2;
            p.data[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

std::vector<const Tensor*> collect_grads(const Tape& tape, const ParamSet& params,
                                         const std::vector<Partition>& partitions) {
    std::vector<const Tensor*> grads(params.params.size(), nullptr);
    for (size_t i = 0; i < params.params.size(); ++i) {
        bool wanted = std::find(partitions.begin(), partitions.end(),
                                params.params[i].partition) != partitions.end();
        if (wanted && tape.has_param_grad(static_cast<int>(i)))
            grads[i] = &tape.param_grad(static_cast<int>(i));
    }
    return grads;
}

}  // namespace playroom
