#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "e2f/objectives.hpp"
#include "e2f/tensor.hpp"

namespace e2f {

struct ArchitectureConfig {
    int input_t = 20;
    int input_c = 64;
    int input_f = 249;
    int feature_depth = 256;  // N
    int out_d = 30;
    int out_w = 64;
    int out_h = 64;
    std::vector<int> encoder_depths = {64, 128, 256};
    std::vector<std::pair<int, int>> encoder_kernels = {{1, 3}, {1, 3}, {1, 3}};
    std::vector<std::pair<int, int>> encoder_strides = {{1, 2}, {1, 2}, {1, 1}};

    void validate() const;  // throws "invalid architecture: ..." on violation

    // frequency extent after each encoder stage (zero padding (0, (k-1)/2))
    std::vector<int> encoder_freq_extents() const;

    // decoder depth schedule N -> N/2 -> N/4 -> D (floored at D)
    std::vector<int> decoder_depths() const;

    bool operator==(const ArchitectureConfig&) const = default;
};

// Flat, ordered collection of named weight arrays; the order and shapes are
// fully determined by the config.
struct ModelParams {
    ArchitectureConfig config;
    std::vector<std::string> names;
    std::vector<Tensor> values;

    const Tensor& find(const std::string& name) const;
};

using GradList = std::vector<Tensor>;  // parallel to ModelParams::values

// Deterministic initialization: conv weights ~ N(0, 2/fan_in), biases 0,
// norm gains 1, norm biases 0.
ModelParams init_params(const ArchitectureConfig& config, std::uint64_t seed);

// Shape skeleton without random fill (all conv weights zero).
ModelParams zero_params(const ArchitectureConfig& config);

GradList zero_grads(const ModelParams& params);

// Per-depth-slice 2-D bicubic interpolation (Keys kernel a = -0.5, half-pixel
// centers, edge-clamped); exact pass-through when sizes already match.
// Input N x A x B -> output N x out_rows x out_cols.
Tensor bicubic_resize(const Tensor& values, std::size_t out_rows, std::size_t out_cols);

Tensor eeg_encode(const Tensor& x, const ModelParams& params);
Tensor unet_forward(const Tensor& x_eeg, const ModelParams& params);
Tensor fmri_decode(const Tensor& x_unet, const ModelParams& params);
Tensor e2fnet_forward(const Tensor& x, const ModelParams& params);

// Intermediate shapes recorded during a traced forward (for tests and
// diagnostics; the full activation cache lives inside the backward pass).
struct ForwardTrace {
    std::vector<std::size_t> encoder_pre_resize_dims;  // (N, C, F'')
    std::vector<std::size_t> unet_innermost_dims;      // (N, W/4, H/4)
};

Tensor e2fnet_forward_traced(const Tensor& x, const ModelParams& params, ForwardTrace& trace);

// Reverse-mode gradients of the combined loss with respect to every weight
// array; result is shape-isomorphic to params.values.
GradList e2fnet_backward(const Tensor& x, const Tensor& y, const ModelParams& params,
                         const LossConfig& loss_config, double* loss_out = nullptr);

// Accumulating variant used by the training loop: grads += scale * dL/dtheta.
double e2fnet_backward_accumulate(const Tensor& x, const Tensor& y,
                                  const ModelParams& params, const LossConfig& loss_config,
                                  double scale, GradList& grads);

}  // namespace e2f
