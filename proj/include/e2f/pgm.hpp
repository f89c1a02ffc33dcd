#pragma once

#include <cstddef>
#include <string>

#include "e2f/tensor.hpp"

namespace e2f {

// Binary PGM (P5, 8-bit): pixel = round(255 * v) with v clamped to [0, 1].
void write_pgm(const std::string& path, const Tensor& volume, std::size_t depth_slice);

}  // namespace e2f
