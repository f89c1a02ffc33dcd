#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "e2f/model.hpp"
#include "e2f/preprocess.hpp"

namespace e2f {

struct TrainConfig {
    double learning_rate = 1e-3;
    int warmup_steps = 50;
    int epochs = 50;
    int batch_size = 64;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double weight_decay = 0.01;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    // fraction of the dataset held out of gradient updates for per-epoch
    // metric logging; 0 disables the holdout and metrics are taken on a
    // slice of the training data instead
    double monitor_fraction = 0.1;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct OptimState {
    long step = 0;
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;

    static OptimState init(const ModelParams& params);
};

// Linear warmup to learning_rate over warmup_steps, constant afterwards.
double lr_at_step(long step, const TrainConfig& config);

// Decoupled weight decay applied before the bias-corrected adaptive term.
void adamw_step(ModelParams& params, const GradList& grads, OptimState& state,
                const TrainConfig& config,
                std::optional<double> lr_override = std::nullopt);

struct StepRecord {
    long step = 0;
    int epoch = 0;
    double lr = 0.0;
    double loss = 0.0;
    // per-epoch monitor metrics, present on the last step of each epoch
    bool has_epoch_metrics = false;
    double epoch_ssim = 0.0;
    double epoch_psnr = 0.0;
};

struct TrainResult {
    ModelParams params;
    std::vector<StepRecord> log;
    bool monitor_is_heldout = false;
    std::size_t n_train = 0;
    std::size_t n_monitor = 0;
};

// Seed-deterministic AdamW training under the combined loss. When
// checkpoint_dir is given, a checkpoint is written per epoch and at
// completion, and the log is written as line-delimited JSON.
TrainResult train(const std::vector<SamplePair>& dataset, const ArchitectureConfig& arch,
                  const TrainConfig& train_config, const LossConfig& loss_config,
                  const std::string& checkpoint_dir = "");

struct GradCheckLayer {
    std::string name;
    double max_rel_error = 0.0;
    int n_checked = 0;
};

struct GradCheckReport {
    std::vector<GradCheckLayer> layers;
    double max_rel_error = 0.0;
    bool passed = false;
};

// Central finite differences against the analytic backward pass on randomly
// selected coordinates (>= 20 per weight array when available).
GradCheckReport grad_check(const ArchitectureConfig& arch, const LossConfig& loss_config,
                           std::uint64_t seed, double tolerance);

}  // namespace e2f
