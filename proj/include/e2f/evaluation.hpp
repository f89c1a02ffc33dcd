#pragma once

#include <string>
#include <vector>

#include "e2f/model.hpp"
#include "e2f/preprocess.hpp"
#include "e2f/training.hpp"

namespace e2f {

struct FoldSpec {
    int fold_index = 0;
    std::vector<std::string> train_subjects;
    std::vector<std::string> eval_subjects;
};

// K folds for K subjects: fold i evaluates subject i and trains on the rest.
std::vector<FoldSpec> loso_split(const std::vector<std::string>& subjects);

// First n_train subjects train, the remainder evaluate.
FoldSpec holdout_split(const std::vector<std::string>& subjects, int n_train);

struct EvalStats {
    double ssim_mean = 0.0;
    double ssim_std = 0.0;
    double psnr_mean = 0.0;
    double psnr_std = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_psnr_infinite = 0;  // excluded from the psnr aggregation
};

// Per-sample SSIM/PSNR of the forward output against the target; means and
// population standard deviations.
EvalStats evaluate(const ModelParams& params, const std::vector<SamplePair>& pairs,
                   const LossConfig& loss_config);

struct FoldResult {
    int fold_index = 0;
    std::vector<std::string> eval_subjects;
    EvalStats stats;
    std::size_t leaked_samples = 0;  // train samples belonging to eval subjects
};

struct MetricsReport {
    std::string protocol;
    std::vector<FoldResult> per_fold;
    // across fold means, population std
    double ssim_mean = 0.0;
    double ssim_std = 0.0;
    double psnr_mean = 0.0;
    double psnr_std = 0.0;

    std::string to_json() const;
    static MetricsReport from_json(const std::string& text);
    std::string to_table() const;  // "mean ± std" rows, 3 decimals
};

void aggregate_folds(MetricsReport& report);

// Trains a fresh model per fold (fold-derived seed) and evaluates it on the
// fold's eval subjects.
MetricsReport run_cross_validation(const std::vector<SamplePair>& dataset,
                                   const std::vector<FoldSpec>& folds,
                                   const ArchitectureConfig& arch,
                                   const TrainConfig& train_config,
                                   const LossConfig& loss_config);

}  // namespace e2f
