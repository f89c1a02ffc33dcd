#include "e2f/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "e2f/parallel.hpp"

namespace e2f {

void LossConfig::validate() const {
    if (lambda1 < 0.0 || lambda1 > 1.0) throw std::invalid_argument("lambda1 must be in [0,1]");
    if (lambda2 < 0.0 || lambda2 > 1.0) throw std::invalid_argument("lambda2 must be in [0,1]");
    if (ssim_window < 1 || ssim_window % 2 == 0)
        throw std::invalid_argument("ssim_window must be odd and positive");
    if (ssim_sigma <= 0.0) throw std::invalid_argument("ssim_sigma must be positive");
    if (data_range <= 0.0) throw std::invalid_argument("data_range must be positive");
    if (c1() <= 0.0 || c2() <= 0.0) throw std::invalid_argument("ssim stabilizers must be positive");
}

namespace {

std::vector<double> gaussian_window(int w, double sigma) {
    std::vector<double> g(static_cast<std::size_t>(w) * w);
    const double c = (w - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < w; ++i) {
        for (int j = 0; j < w; ++j) {
            double di = i - c, dj = j - c;
            double v = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            g[static_cast<std::size_t>(i) * w + j] = v;
            sum += v;
        }
    }
    for (double& v : g) v /= sum;
    return g;
}

void require_same_shape(const Tensor& y, const Tensor& y_hat) {
    if (y.dims != y_hat.dims) throw std::runtime_error("shape mismatch");
}

// Per-slice SSIM with optional analytic gradient scatter.  Writing into grad
// is disjoint across slices, so slices parallelize safely.
double ssim_impl(const Tensor& y, const Tensor& y_hat, const LossConfig& config, Tensor* grad) {
    require_same_shape(y, y_hat);
    config.validate();
    if (y.ndim() != 3) throw std::invalid_argument("ssim expects 3-d volumes");
    const std::size_t d = y.dims[0], w = y.dims[1], h = y.dims[2];
    const int win = config.ssim_window;
    if (w < static_cast<std::size_t>(win) || h < static_cast<std::size_t>(win))
        throw std::invalid_argument("volume smaller than ssim window");
    const auto g = gaussian_window(win, config.ssim_sigma);
    const double cc1 = config.c1();
    const double cc2 = config.c2();
    const std::size_t n_r = w - win + 1;
    const std::size_t n_c = h - win + 1;
    const double n_positions = static_cast<double>(d * n_r * n_c);
    if (grad) {
        *grad = Tensor::zeros(y.dims);
    }

    std::vector<double> slice_sums(d, 0.0);
    parallel_for(d, 1, [&](std::size_t s0, std::size_t s1) {
        for (std::size_t s = s0; s < s1; ++s) {
            double acc = 0.0;
            for (std::size_t r0 = 0; r0 < n_r; ++r0) {
                for (std::size_t c0 = 0; c0 < n_c; ++c0) {
                    double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
                    for (int i = 0; i < win; ++i) {
                        for (int j = 0; j < win; ++j) {
                            const double wt = g[static_cast<std::size_t>(i) * win + j];
                            const double xv = y.at3(s, r0 + i, c0 + j);
                            const double yv = y_hat.at3(s, r0 + i, c0 + j);
                            mx += wt * xv;
                            my += wt * yv;
                            sxx += wt * xv * xv;
                            syy += wt * yv * yv;
                            sxy += wt * xv * yv;
                        }
                    }
                    const double vx = sxx - mx * mx;
                    const double vy = syy - my * my;
                    const double cxy = sxy - mx * my;
                    const double a = 2.0 * mx * my + cc1;
                    const double b = mx * mx + my * my + cc1;
                    const double c = 2.0 * cxy + cc2;
                    const double e = vx + vy + cc2;
                    acc += (a * c) / (b * e);
                    if (grad) {
                        // d(ssim_p)/d(y_hat_j) = w_j (k0 + k1 x_j + k2 y_hat_j)
                        const double k1 = 2.0 * a / (b * e);
                        const double k2 = -2.0 * a * c / (b * e * e);
                        const double k0 = 2.0 * mx * (c - a) / (b * e) +
                                          2.0 * a * c * my * (b - e) / (b * b * e * e);
                        for (int i = 0; i < win; ++i) {
                            for (int j = 0; j < win; ++j) {
                                const double wt = g[static_cast<std::size_t>(i) * win + j];
                                const double xv = y.at3(s, r0 + i, c0 + j);
                                const double yv = y_hat.at3(s, r0 + i, c0 + j);
                                grad->at3(s, r0 + i, c0 + j) +=
                                    wt * (k0 + k1 * xv + k2 * yv) / n_positions;
                            }
                        }
                    }
                }
            }
            slice_sums[s] = acc;
        }
    });
    double total = 0.0;
    for (double v : slice_sums) total += v;
    return total / n_positions;
}

}  // namespace

double ssim(const Tensor& y, const Tensor& y_hat, const LossConfig& config) {
    return ssim_impl(y, y_hat, config, nullptr);
}

double ssim_with_grad(const Tensor& y, const Tensor& y_hat, const LossConfig& config,
                      Tensor& grad) {
    return ssim_impl(y, y_hat, config, &grad);
}

double mse(const Tensor& y, const Tensor& y_hat) {
    require_same_shape(y, y_hat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double diff = y_hat.data[i] - y.data[i];
        acc += diff * diff;
    }
    return acc / static_cast<double>(y.size());
}

double combined_loss(const Tensor& y, const Tensor& y_hat, const LossConfig& config) {
    return config.lambda1 * (1.0 - ssim(y, y_hat, config)) + config.lambda2 * mse(y, y_hat);
}

double combined_loss_with_grad(const Tensor& y, const Tensor& y_hat, const LossConfig& config,
                               Tensor& grad) {
    Tensor ssim_grad;
    const double s = ssim_with_grad(y, y_hat, config, ssim_grad);
    const double m = mse(y, y_hat);
    grad = Tensor::zeros(y.dims);
    const double inv_n = 1.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        grad.data[i] = -config.lambda1 * ssim_grad.data[i] +
                       config.lambda2 * 2.0 * (y_hat.data[i] - y.data[i]) * inv_n;
    }
    return config.lambda1 * (1.0 - s) + config.lambda2 * m;
}

double psnr(const Tensor& y, const Tensor& y_hat, double data_range) {
    if (data_range <= 0.0) throw std::invalid_argument("data_range must be positive");
    const double m = mse(y, y_hat);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / m);
}

}  // namespace e2f
