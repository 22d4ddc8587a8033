#pragma once

#include <string>

#include "playroom/network.hpp"

namespace playroom {

// Flat binary checkpoint: magic "PRCHKPT1", little-endian u64 spec hash,
// u32 parameter count, then per parameter a u32 name length + name bytes +
// u32 rank + u32 dims, followed by all values as little-endian float32 in
// declaration order.
void save_checkpoint(const ParamSet& params, const std::string& path);
ParamSet load_checkpoint(const std::string& path, const NetworkSpec& expected_spec);

// reads only the spec hash from a checkpoint header
uint64_t checkpoint_spec_hash(const std::string& path);

}  // namespace playroom
