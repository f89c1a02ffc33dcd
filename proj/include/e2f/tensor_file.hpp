#pragma once

#include <iosfwd>
#include <string>

#include "e2f/tensor.hpp"

namespace e2f {

// Tensor container: magic "E2F1", ndim (u32 LE), dims (u32 LE each),
// payload of product(dims) IEEE-754 float32 LE values, last axis fastest.
// Values are widened to double on read and rounded to float32 on write.

void write_tensor(const std::string& path, const Tensor& t);
Tensor read_tensor(const std::string& path);

// Stream variants; records are self-describing so they can be concatenated
// (checkpoint container format).
void write_tensor_record(std::ostream& os, const Tensor& t);
Tensor read_tensor_record(std::istream& is, const std::string& context);

}  // namespace e2f
