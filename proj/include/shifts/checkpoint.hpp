#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shifts/optim.hpp"
#include "shifts/tensor.hpp"

namespace shifts {

/// Checkpoint layout: a UTF-8 text manifest followed by a binary payload.
///   line 1: "shifts-checkpoint v1"
///   line 2: parameter count
///   then one record per parameter: "<name> <d0,d1,...> f32"
///   then the values of every parameter, little-endian float32, in manifest
///   order. Optimizer moment buffers are not stored.
void save_checkpoint(const std::string& path, const ParamSet& params);

std::vector<std::pair<std::string, Tensor>> load_checkpoint(const std::string& path);

/// Load values into an existing registry; names and shapes must match exactly.
void load_checkpoint_into(const std::string& path, ParamSet& params);

}  // namespace shifts
