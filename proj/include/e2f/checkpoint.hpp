#pragma once

#include <string>

#include "e2f/model.hpp"

namespace e2f {

// Checkpoint directory layout:
//   <dir>/arch.json    architecture config + ordered weight names
//   <dir>/params.e2fw  concatenated tensor records in the listed order
// Weights are stored as float32 (tensor container format); save/load/save is
// byte-stable.
void save_checkpoint(const ModelParams& params, const std::string& dir);
ModelParams load_checkpoint(const std::string& dir);

}  // namespace e2f
