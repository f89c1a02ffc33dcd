#include "e2f/config_json.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>

namespace e2f {

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys,
                    const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(keys.begin(), keys.end(),
                         [&](const char* k) { return key == k; }) == keys.end())
            throw std::runtime_error(context + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<std::pair<int, int>> pairs_from_json(const nlohmann::json& j) {
    std::vector<std::pair<int, int>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw std::runtime_error("expected [a, b] pairs, got " + e.dump());
        out.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    return out;
}

nlohmann::json pairs_to_json(const std::vector<std::pair<int, int>>& pairs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [a, b] : pairs) j.push_back({a, b});
    return j;
}

}  // namespace

nlohmann::json arch_to_json(const ArchitectureConfig& c) {
    return {{"input_t", c.input_t},
            {"input_c", c.input_c},
            {"input_f", c.input_f},
            {"feature_depth", c.feature_depth},
            {"out_d", c.out_d},
            {"out_w", c.out_w},
            {"out_h", c.out_h},
            {"encoder_depths", c.encoder_depths},
            {"encoder_kernels", pairs_to_json(c.encoder_kernels)},
            {"encoder_strides", pairs_to_json(c.encoder_strides)}};
}

ArchitectureConfig arch_from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"input_t", "input_c", "input_f", "feature_depth", "out_d", "out_w", "out_h",
                    "encoder_depths", "encoder_kernels", "encoder_strides"},
                   "architecture config");
    ArchitectureConfig c;
    read_if(j, "input_t", c.input_t);
    read_if(j, "input_c", c.input_c);
    read_if(j, "input_f", c.input_f);
    read_if(j, "feature_depth", c.feature_depth);
    read_if(j, "out_d", c.out_d);
    read_if(j, "out_w", c.out_w);
    read_if(j, "out_h", c.out_h);
    read_if(j, "encoder_depths", c.encoder_depths);
    if (j.contains("encoder_kernels")) c.encoder_kernels = pairs_from_json(j.at("encoder_kernels"));
    if (j.contains("encoder_strides")) c.encoder_strides = pairs_from_json(j.at("encoder_strides"));
    c.validate();
    return c;
}

nlohmann::json preprocess_to_json(const PreprocessConfig& c) {
    return {{"temporal_context", c.temporal_context},
            {"cutoff_bins", c.cutoff_bins},
            {"remove_dc", c.remove_dc},
            {"alignment", c.alignment}};
}

PreprocessConfig preprocess_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"temporal_context", "cutoff_bins", "remove_dc", "alignment"},
                   "preprocess config");
    PreprocessConfig c;
    read_if(j, "temporal_context", c.temporal_context);
    read_if(j, "cutoff_bins", c.cutoff_bins);
    read_if(j, "remove_dc", c.remove_dc);
    read_if(j, "alignment", c.alignment);
    c.validate();
    return c;
}

nlohmann::json train_to_json(const TrainConfig& c) {
    return {{"learning_rate", c.learning_rate},
            {"warmup_steps", c.warmup_steps},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"weight_decay", c.weight_decay},
            {"epsilon", c.epsilon},
            {"seed", c.seed},
            {"monitor_fraction", c.monitor_fraction}};
}

TrainConfig train_from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"learning_rate", "warmup_steps", "epochs", "batch_size", "beta1", "beta2",
                    "weight_decay", "epsilon", "seed", "monitor_fraction"},
                   "train config");
    TrainConfig c;
    read_if(j, "learning_rate", c.learning_rate);
    read_if(j, "warmup_steps", c.warmup_steps);
    read_if(j, "epochs", c.epochs);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "beta1", c.beta1);
    read_if(j, "beta2", c.beta2);
    read_if(j, "weight_decay", c.weight_decay);
    read_if(j, "epsilon", c.epsilon);
    read_if(j, "seed", c.seed);
    read_if(j, "monitor_fraction", c.monitor_fraction);
    c.validate();
    return c;
}

nlohmann::json loss_to_json(const LossConfig& c) {
    return {{"lambda1", c.lambda1},
            {"lambda2", c.lambda2},
            {"ssim_window", c.ssim_window},
            {"ssim_sigma", c.ssim_sigma},
            {"data_range", c.data_range},
            {"k1", c.k1},
            {"k2", c.k2}};
}

LossConfig loss_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"lambda1", "lambda2", "ssim_window", "ssim_sigma", "data_range", "k1", "k2"},
                   "loss config");
    LossConfig c;
    read_if(j, "lambda1", c.lambda1);
    read_if(j, "lambda2", c.lambda2);
    read_if(j, "ssim_window", c.ssim_window);
    read_if(j, "ssim_sigma", c.ssim_sigma);
    read_if(j, "data_range", c.data_range);
    read_if(j, "k1", c.k1);
    read_if(j, "k2", c.k2);
    c.validate();
    return c;
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j{{"dataset_root", c.dataset_root},
                     {"output_dir", c.output_dir},
                     {"protocol", c.protocol},
                     {"arch", arch_to_json(c.arch)},
                     {"preprocess", preprocess_to_json(c.preprocess)},
                     {"train", train_to_json(c.train)},
                     {"loss", loss_to_json(c.loss)}};
    if (c.protocol == "holdout") j["n_train"] = c.n_train;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    reject_unknown(
        j, {"dataset_root", "output_dir", "protocol", "n_train", "arch", "preprocess", "train",
            "loss"},
        "run config");
    RunConfig c;
    c.dataset_root = j.at("dataset_root").get<std::string>();
    c.output_dir = j.at("output_dir").get<std::string>();
    read_if(j, "protocol", c.protocol);
    if (c.protocol != "loso" && c.protocol != "holdout")
        throw std::runtime_error("run config: unknown protocol '" + c.protocol + "'");
    if (c.protocol == "holdout") {
        if (!j.contains("n_train"))
            throw std::runtime_error("run config: holdout protocol requires n_train");
        c.n_train = j.at("n_train").get<int>();
        if (c.n_train < 1) throw std::runtime_error("run config: n_train must be positive");
    } else if (j.contains("n_train")) {
        throw std::runtime_error("run config: n_train only applies to the holdout protocol");
    }
    if (j.contains("arch")) c.arch = arch_from_json(j.at("arch"));
    if (j.contains("preprocess")) c.preprocess = preprocess_from_json(j.at("preprocess"));
    if (j.contains("train")) c.train = train_from_json(j.at("train"));
    if (j.contains("loss")) c.loss = loss_from_json(j.at("loss"));
    return c;
}

RunConfig read_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config parse failure at " + path + ": " + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace e2f
