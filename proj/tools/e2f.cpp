#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "e2f/checkpoint.hpp"
#include "e2f/config_json.hpp"
#include "e2f/data_harness.hpp"
#include "e2f/evaluation.hpp"
#include "e2f/pgm.hpp"
#include "e2f/tensor_file.hpp"
#include "e2f/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One writer per output directory; released when the command finishes.
class DirLock {
  public:
    explicit DirLock(const std::string& dir) {
        std::filesystem::create_directories(dir);
        path_ = dir + "/.lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw std::runtime_error("output directory is locked by another invocation: " + dir);
    }
    ~DirLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

  private:
    std::string path_;
    int fd_ = -1;
};

void write_run_config(const e2f::RunConfig& config, const std::string& dir) {
    std::ofstream os(dir + "/run_config.json", std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + dir + "/run_config.json");
    os << e2f::run_config_to_json(config).dump(2) << "\n";
}

e2f::RunConfig load_config(const std::string& path, std::uint64_t* seed_override) {
    e2f::RunConfig config;
    try {
        config = e2f::read_run_config(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (seed_override) config.train.seed = *seed_override;
    return config;
}

e2f::DatasetManifest open_dataset(const e2f::RunConfig& config) {
    const auto manifest = e2f::read_manifest(config.dataset_root + "/manifest.json");
    if (!(manifest.preprocess == config.preprocess))
        throw UsageError("manifest/config mismatch: dataset was preprocessed with different settings");
    return manifest;
}

e2f::FoldSpec training_split(const e2f::RunConfig& config, const e2f::DatasetManifest& manifest) {
    const auto ids = manifest.subject_ids();
    if (config.protocol == "holdout") {
        try {
            return e2f::holdout_split(ids, config.n_train);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    // loso: the standalone checkpoint trains on every subject; per-fold
    // training happens inside eval
    e2f::FoldSpec fold;
    fold.train_subjects = ids;
    fold.eval_subjects = ids;
    return fold;
}

int cmd_synth_data(const e2f::SyntheticSpec& spec, const std::string& out_dir) {
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    DirLock lock(out_dir);
    e2f::generate_synthetic(spec, out_dir);
    std::cout << out_dir << "/manifest.json\n";
    return kExitOk;
}

int cmd_preprocess(const std::string& config_path, const std::string& out_dir,
                   std::uint64_t* seed_override) {
    const auto config = load_config(config_path, seed_override);
    const auto manifest = open_dataset(config);
    const auto pairs = e2f::load_pairs(manifest, manifest.subject_ids());
    if (pairs.empty()) throw std::runtime_error("dataset produced no pairs");
    std::cout << "subjects: " << manifest.subjects.size() << "\n"
              << "pairs: " << pairs.size() << "\n"
              << "eeg sample shape: " << e2f::shape_str(pairs[0].eeg.values.dims) << "\n"
              << "volume shape: " << e2f::shape_str(pairs[0].fmri.values.dims) << "\n";
    if (!out_dir.empty()) {
        DirLock lock(out_dir);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            char stem[32];
            std::snprintf(stem, sizeof(stem), "pair_%05zu", i);
            e2f::write_tensor(out_dir + "/" + stem + "_eeg.e2f", pairs[i].eeg.values);
            e2f::write_tensor(out_dir + "/" + stem + "_fmri.e2f", pairs[i].fmri.values);
        }
        std::cout << "wrote " << pairs.size() << " pairs to " << out_dir << "\n";
    }
    return kExitOk;
}

int cmd_train(const std::string& config_path, std::uint64_t* seed_override) {
    const auto config = load_config(config_path, seed_override);
    const auto manifest = open_dataset(config);
    const auto fold = training_split(config, manifest);
    const auto pairs = e2f::load_pairs(manifest, fold.train_subjects);
    DirLock lock(config.output_dir);
    write_run_config(config, config.output_dir);
    const auto result = e2f::train(pairs, config.arch, config.train, config.loss,
                                   config.output_dir + "/checkpoints");
    std::cout << "steps: " << result.log.size() << "\n"
              << "final loss: " << result.log.back().loss << "\n"
              << "checkpoint: " << config.output_dir << "/checkpoints/final\n";
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_path,
             std::uint64_t* seed_override) {
    const auto config = load_config(config_path, seed_override);
    const auto manifest = open_dataset(config);
    e2f::ModelParams params = e2f::load_checkpoint(checkpoint_path);
    if (!(params.config == config.arch))
        throw UsageError("architecture mismatch between checkpoint and run config");

    e2f::MetricsReport report;
    if (config.protocol == "holdout") {
        const auto fold = training_split(config, manifest);
        const auto eval_pairs = e2f::load_pairs(manifest, fold.eval_subjects);
        e2f::FoldResult result;
        result.fold_index = fold.fold_index;
        result.eval_subjects = fold.eval_subjects;
        result.stats = e2f::evaluate(params, eval_pairs, config.loss);
        report.protocol = "holdout";
        report.per_fold.push_back(std::move(result));
        e2f::aggregate_folds(report);
    } else {
        const auto folds = e2f::loso_split(manifest.subject_ids());
        const auto pairs = e2f::load_pairs(manifest, manifest.subject_ids());
        report = e2f::run_cross_validation(pairs, folds, config.arch, config.train, config.loss);
    }

    DirLock lock(config.output_dir);
    write_run_config(config, config.output_dir);
    {
        std::ofstream os(config.output_dir + "/report.json", std::ios::trunc);
        os << report.to_json() << "\n";
    }
    {
        std::ofstream os(config.output_dir + "/report.txt", std::ios::trunc);
        os << report.to_table();
    }
    std::cout << report.to_table();
    return kExitOk;
}

int cmd_export_slices(const std::string& checkpoint_path, const std::string& dataset_root,
                      const std::string& subject, int volume_index, const std::string& out_dir) {
    const auto manifest = e2f::read_manifest(dataset_root + "/manifest.json");
    e2f::ModelParams params = e2f::load_checkpoint(checkpoint_path);
    std::vector<e2f::SamplePair> pairs;
    try {
        pairs = e2f::load_pairs(manifest, {subject});
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const e2f::SamplePair* target = nullptr;
    for (const auto& pair : pairs)
        if (pair.fmri.volume_index == volume_index) target = &pair;
    if (!target)
        throw UsageError("no volume with index " + std::to_string(volume_index) +
                         " for subject " + subject);
    const e2f::Tensor generated = e2f::e2fnet_forward(target->eeg.values, params);
    DirLock lock(out_dir);
    for (std::size_t slice = 0; slice < target->fmri.values.dims[0]; ++slice) {
        char name[64];
        std::snprintf(name, sizeof(name), "slice_%03zu_target.pgm", slice);
        e2f::write_pgm(out_dir + "/" + name, target->fmri.values, slice);
        std::snprintf(name, sizeof(name), "slice_%03zu_generated.pgm", slice);
        e2f::write_pgm(out_dir + "/" + name, generated, slice);
    }
    std::cout << "wrote " << 2 * target->fmri.values.dims[0] << " slices to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"E2fNet EEG-to-fMRI synthesis pipeline"};
    app.require_subcommand(1);

    // synth-data
    auto* synth = app.add_subcommand("synth-data", "Generate a synthetic paired dataset");
    synth->set_help_flag("--help", "Print this help message and exit");  // frees --h
    e2f::SyntheticSpec spec;
    std::string synth_out;
    synth->add_option("--subjects", spec.n_subjects, "Number of subjects");
    synth->add_option("--volumes", spec.volumes_per_subject, "Volumes per subject");
    synth->add_option("--blobs", spec.blob_count, "Gaussian blobs per volume");
    synth->add_option("--noise", spec.noise_std, "EEG noise standard deviation");
    synth->add_option("--seed", spec.seed, "Generator seed");
    synth->add_option("--t", spec.geometry.t, "Temporal context");
    synth->add_option("--c", spec.geometry.c, "Electrode count");
    synth->add_option("--f", spec.geometry.f, "Frequency feature count");
    synth->add_option("--d", spec.geometry.d, "Volume depth");
    synth->add_option("--w", spec.geometry.w, "Volume width");
    synth->add_option("--h", spec.geometry.h, "Volume height");
    synth->add_option("--out", synth_out, "Dataset root directory")->required();

    // shared --config/--seed
    std::string config_path, checkpoint_path, out_dir, subject, dataset_root;
    std::uint64_t seed_value = 0;
    int volume_index = 0;

    auto* preprocess = app.add_subcommand("preprocess", "Run the preprocessing pipeline");
    preprocess->add_option("--config", config_path, "Run config JSON")->required();
    preprocess->add_option("--out", out_dir, "Directory for preprocessed sample tensors");
    auto* pre_seed = preprocess->add_option("--seed", seed_value, "Training seed override");

    auto* train = app.add_subcommand("train", "Train a model on the configured split");
    train->add_option("--config", config_path, "Run config JSON")->required();
    auto* train_seed = train->add_option("--seed", seed_value, "Training seed override");

    auto* eval = app.add_subcommand("eval", "Evaluate under the configured protocol");
    eval->add_option("--config", config_path, "Run config JSON")->required();
    eval->add_option("--checkpoint", checkpoint_path, "Checkpoint directory")->required();
    auto* eval_seed = eval->add_option("--seed", seed_value, "Training seed override");

    auto* exp = app.add_subcommand("export-slices", "Export target/generated volume slices as PGM");
    exp->add_option("--checkpoint", checkpoint_path, "Checkpoint directory")->required();
    exp->add_option("--data", dataset_root, "Dataset root directory")->required();
    exp->add_option("--subject", subject, "Subject id")->required();
    exp->add_option("--volume", volume_index, "Volume index")->required();
    exp->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth_data(spec, synth_out);
        if (preprocess->parsed())
            return cmd_preprocess(config_path, out_dir, pre_seed->count() ? &seed_value : nullptr);
        if (train->parsed())
            return cmd_train(config_path, train_seed->count() ? &seed_value : nullptr);
        if (eval->parsed())
            return cmd_eval(config_path, checkpoint_path,
                            eval_seed->count() ? &seed_value : nullptr);
        if (exp->parsed())
            return cmd_export_slices(checkpoint_path, dataset_root, subject, volume_index, out_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
