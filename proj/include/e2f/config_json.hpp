#pragma once

#include <string>

#include "json.hpp"

#include "e2f/model.hpp"
#include "e2f/objectives.hpp"
#include "e2f/preprocess.hpp"
#include "e2f/training.hpp"

namespace e2f {

// JSON (de)serialization for the config structs. Parsers reject unknown keys
// so stale run configs fail loudly.

nlohmann::json arch_to_json(const ArchitectureConfig& c);
ArchitectureConfig arch_from_json(const nlohmann::json& j);

nlohmann::json preprocess_to_json(const PreprocessConfig& c);
PreprocessConfig preprocess_from_json(const nlohmann::json& j);

nlohmann::json train_to_json(const TrainConfig& c);
TrainConfig train_from_json(const nlohmann::json& j);

nlohmann::json loss_to_json(const LossConfig& c);
LossConfig loss_from_json(const nlohmann::json& j);

struct RunConfig {
    std::string dataset_root;
    std::string output_dir;
    std::string protocol = "loso";  // "loso" or "holdout"
    int n_train = 0;                // holdout only
    ArchitectureConfig arch;
    PreprocessConfig preprocess;
    TrainConfig train;
    LossConfig loss;
};

nlohmann::json run_config_to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig read_run_config(const std::string& path);

}  // namespace e2f
