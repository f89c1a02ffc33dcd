#pragma once

#include "e2f/tensor.hpp"

namespace e2f {

struct LossConfig {
    double lambda1 = 0.5;
    double lambda2 = 0.5;
    int ssim_window = 11;
    double ssim_sigma = 1.5;
    double data_range = 1.0;
    double k1 = 0.01;
    double k2 = 0.03;

    double c1() const { return (k1 * data_range) * (k1 * data_range); }
    double c2() const { return (k2 * data_range) * (k2 * data_range); }
    void validate() const;
    bool operator==(const LossConfig&) const = default;
};

// 2-D SSIM per depth slice, Gaussian window, valid positions only, averaged
// over positions and slices. Differentiable everywhere.
double ssim(const Tensor& y, const Tensor& y_hat, const LossConfig& config);

// Also fills grad with d(ssim)/d(y_hat).
double ssim_with_grad(const Tensor& y, const Tensor& y_hat, const LossConfig& config,
                      Tensor& grad);

double mse(const Tensor& y, const Tensor& y_hat);

// lambda1 * (1 - ssim) + lambda2 * mse
double combined_loss(const Tensor& y, const Tensor& y_hat, const LossConfig& config);

// Also fills grad with d(loss)/d(y_hat).
double combined_loss_with_grad(const Tensor& y, const Tensor& y_hat,
                               const LossConfig& config, Tensor& grad);

// 10*log10(range^2 / mse); +infinity when mse == 0.
double psnr(const Tensor& y, const Tensor& y_hat, double data_range);

}  // namespace e2f
