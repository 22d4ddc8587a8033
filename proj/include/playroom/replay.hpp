#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "playroom/rng.hpp"

namespace playroom {

struct Transition {
    std::vector<double> obs;       // flat observation
    double action_f = 0.0;
    double action_r = 0.0;
    double reward = 0.0;           // effective reward at collection time
    std::vector<double> next_obs;
    bool done = false;             // terminal only; frame-cap truncation stores false
    uint64_t id = 0;               // insertion id, for bookkeeping and tests
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
        data_.reserve(capacity);
    }

    void push(Transition t) {
        t.id = next_id_++;
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[cursor_] = std::move(t);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    size_t size() const { return data_.size(); }
    size_t capacity() const { return capacity_; }
    uint64_t total_inserted() const { return next_id_; }
    const Transition& at(size_t i) const { return data_[i]; }

    std::vector<const Transition*> sample(size_t n, Rng& rng) const {
        if (data_.empty()) throw std::logic_error("ReplayBuffer: sample from empty buffer");
        std::vector<const Transition*> out;
        out.reserve(n);
        for (size_t i = 0; i < n; ++i)
            out.push_back(&data_[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(data_.size()) - 1))]);
        return out;
    }

private:
    size_t capacity_;
    size_t cursor_ = 0;
    uint64_t next_id_ = 0;
    std::vector<Transition> data_;
};

}  // namespace playroom
