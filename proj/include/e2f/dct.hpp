#pragma once

#include "e2f/tensor.hpp"

namespace e2f {

// Orthonormal type-II / type-III discrete cosine transforms over all three
// axes of a volume (type-III is the exact inverse of type-II).
Tensor dct2_3d(const Tensor& v);
Tensor dct3_3d(const Tensor& v);

}  // namespace e2f
