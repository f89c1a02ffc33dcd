#include "e2f/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "e2f/checkpoint.hpp"
#include "e2f/data_harness.hpp"
#include "e2f/evaluation.hpp"
#include "e2f/rng.hpp"

namespace e2f {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
    if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be non-negative");
    if (epochs < 1) throw std::invalid_argument("epochs must be positive");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (beta1 <= 0.0 || beta1 >= 1.0) throw std::invalid_argument("beta1 must be in (0,1)");
    if (beta2 <= 0.0 || beta2 >= 1.0) throw std::invalid_argument("beta2 must be in (0,1)");
    if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (monitor_fraction < 0.0 || monitor_fraction >= 1.0)
        throw std::invalid_argument("monitor_fraction must be in [0,1)");
}

OptimState OptimState::init(const ModelParams& params) {
    OptimState state;
    state.first_moment = zero_grads(params);
    state.second_moment = zero_grads(params);
    return state;
}

double lr_at_step(long step, const TrainConfig& config) {
    if (step < 1) throw std::invalid_argument("step must be at least 1");
    if (config.warmup_steps <= 0 || step >= config.warmup_steps) return config.learning_rate;
    return config.learning_rate * static_cast<double>(step) /
           static_cast<double>(config.warmup_steps);
}

void adamw_step(ModelParams& params, const GradList& grads, OptimState& state,
                const TrainConfig& config, std::optional<double> lr_override) {
    config.validate();
    if (grads.size() != params.values.size())
        throw std::invalid_argument("gradient count does not match parameter count");
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (grads[i].dims != params.values[i].dims)
            throw std::invalid_argument("gradient shape does not match parameter shape");
        if (!all_finite(grads[i])) throw std::runtime_error("non-finite gradient");
    }
    const double lr = lr_override.value_or(config.learning_rate);
    const long t = state.step + 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < grads.size(); ++i) {
        double* theta = params.values[i].data.data();
        double* m = state.first_moment[i].data.data();
        double* v = state.second_moment[i].data.data();
        const double* g = grads[i].data.data();
        const std::size_t n = grads[i].size();
        for (std::size_t j = 0; j < n; ++j) {
            theta[j] -= lr * config.weight_decay * theta[j];
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            theta[j] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
    state.step = t;
}

namespace {

struct MonitorMetrics {
    double ssim_mean = 0.0;
    double psnr_mean = 0.0;
};

MonitorMetrics monitor_metrics(const ModelParams& params,
                               const std::vector<const SamplePair*>& monitor,
                               const LossConfig& loss_config) {
    MonitorMetrics m;
    double psnr_sum = 0.0;
    std::size_t psnr_n = 0;
    for (const SamplePair* pair : monitor) {
        Tensor y_hat = e2fnet_forward(pair->eeg.values, params);
        m.ssim_mean += ssim(pair->fmri.values, y_hat, loss_config);
        const double p = psnr(pair->fmri.values, y_hat, loss_config.data_range);
        if (std::isfinite(p)) {
            psnr_sum += p;
            ++psnr_n;
        }
    }
    m.ssim_mean /= static_cast<double>(monitor.size());
    m.psnr_mean = psnr_n > 0 ? psnr_sum / static_cast<double>(psnr_n)
                             : std::numeric_limits<double>::infinity();
    return m;
}

void write_log(const std::string& path, const std::vector<StepRecord>& log) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& rec : log) {
        nlohmann::json j{{"step", rec.step}, {"epoch", rec.epoch}, {"lr", rec.lr},
                         {"loss", rec.loss}};
        if (rec.has_epoch_metrics) {
            j["epoch_ssim"] = rec.epoch_ssim;
            j["epoch_psnr"] = rec.epoch_psnr;
        }
        os << j.dump() << "\n";
    }
}

}  // namespace

TrainResult train(const std::vector<SamplePair>& dataset, const ArchitectureConfig& arch,
                  const TrainConfig& train_config, const LossConfig& loss_config,
                  const std::string& checkpoint_dir) {
    arch.validate();
    train_config.validate();
    loss_config.validate();
    if (dataset.empty()) throw std::invalid_argument("empty dataset");

    const std::size_t n_total = dataset.size();
    std::size_t n_monitor =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_total) * train_config.monitor_fraction));
    const bool heldout = n_monitor >= 1 && n_monitor < n_total;
    if (!heldout) n_monitor = 0;
    const std::size_t n_train = n_total - n_monitor;

    std::vector<const SamplePair*> train_set, monitor_set;
    for (std::size_t i = 0; i < n_train; ++i) train_set.push_back(&dataset[i]);
    if (heldout) {
        for (std::size_t i = n_train; i < n_total; ++i) monitor_set.push_back(&dataset[i]);
    } else {
        for (std::size_t i = 0; i < std::min<std::size_t>(n_total, 8); ++i)
            monitor_set.push_back(&dataset[i]);
    }

    if (!checkpoint_dir.empty()) std::filesystem::create_directories(checkpoint_dir);

    TrainResult result;
    result.params = init_params(arch, train_config.seed);
    result.monitor_is_heldout = heldout;
    result.n_train = n_train;
    result.n_monitor = monitor_set.size();
    OptimState state = OptimState::init(result.params);
    long global_step = 0;

    for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
        const auto batches =
            batch(n_train, static_cast<std::size_t>(train_config.batch_size), train_config.seed,
                  epoch);
        for (const auto& indices : batches) {
            GradList grads = zero_grads(result.params);
            double loss_sum = 0.0;
            const double scale = 1.0 / static_cast<double>(indices.size());
            try {
                for (std::size_t idx : indices) {
                    loss_sum += e2fnet_backward_accumulate(train_set[idx]->eeg.values,
                                                           train_set[idx]->fmri.values,
                                                           result.params, loss_config, scale, grads);
                }
                adamw_step(result.params, grads, state, train_config,
                           lr_at_step(global_step + 1, train_config));
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string(e.what()) + " (training step " +
                                         std::to_string(global_step + 1) + ")");
            }
            ++global_step;
            StepRecord rec;
            rec.step = global_step;
            rec.epoch = epoch;
            rec.lr = lr_at_step(global_step, train_config);
            rec.loss = loss_sum * scale;
            result.log.push_back(rec);
        }
        const MonitorMetrics m = monitor_metrics(result.params, monitor_set, loss_config);
        result.log.back().has_epoch_metrics = true;
        result.log.back().epoch_ssim = m.ssim_mean;
        result.log.back().epoch_psnr = m.psnr_mean;
        if (!checkpoint_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof(name), "epoch_%04d", epoch);
            save_checkpoint(result.params, checkpoint_dir + "/" + name);
        }
    }
    if (!checkpoint_dir.empty()) {
        save_checkpoint(result.params, checkpoint_dir + "/final");
        write_log(checkpoint_dir + "/train_log.jsonl", result.log);
    }
    return result;
}

GradCheckReport grad_check(const ArchitectureConfig& arch, const LossConfig& loss_config,
                           std::uint64_t seed, double tolerance) {
    arch.validate();
    loss_config.validate();
    ModelParams params = init_params(arch, seed);

    Rng data_rng(mix64(seed, 0x64617461));
    Tensor x({static_cast<std::size_t>(arch.input_t), static_cast<std::size_t>(arch.input_c),
              static_cast<std::size_t>(arch.input_f)});
    for (double& v : x.data) v = data_rng.uniform();
    Tensor y({static_cast<std::size_t>(arch.out_d), static_cast<std::size_t>(arch.out_w),
              static_cast<std::size_t>(arch.out_h)});
    for (double& v : y.data) v = data_rng.uniform();

    const GradList analytic = e2fnet_backward(x, y, params, loss_config);

    const double h = 1e-3;
    GradCheckReport report;
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        GradCheckLayer layer;
        layer.name = params.names[i];
        const std::size_t n = params.values[i].size();
        Rng pick(mix64(seed, i));
        std::vector<std::size_t> coords;
        if (n <= 20) {
            for (std::size_t j = 0; j < n; ++j) coords.push_back(j);
        } else {
            while (coords.size() < 20) {
                const std::size_t j = pick.below(n);
                if (std::find(coords.begin(), coords.end(), j) == coords.end())
                    coords.push_back(j);
            }
        }
        for (std::size_t j : coords) {
            ModelParams perturbed = params;
            perturbed.values[i].data[j] = params.values[i].data[j] + h;
            const double up = combined_loss(y, e2fnet_forward(x, perturbed), loss_config);
            perturbed.values[i].data[j] = params.values[i].data[j] - h;
            const double down = combined_loss(y, e2fnet_forward(x, perturbed), loss_config);
            const double fd = (up - down) / (2.0 * h);
            const double rel =
                std::abs(analytic[i].data[j] - fd) / std::max(std::abs(fd), 1e-2);
            layer.max_rel_error = std::max(layer.max_rel_error, rel);
            ++layer.n_checked;
        }
        report.max_rel_error = std::max(report.max_rel_error, layer.max_rel_error);
        report.layers.push_back(std::move(layer));
    }
    report.passed = report.max_rel_error <= tolerance;
    return report;
}

}  // namespace e2f
