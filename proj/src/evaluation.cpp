#include "e2f/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "e2f/objectives.hpp"
#include "e2f/rng.hpp"

namespace e2f {

std::vector<FoldSpec> loso_split(const std::vector<std::string>& subjects) {
    if (subjects.size() < 2) throw std::runtime_error("need at least two subjects");
    std::vector<FoldSpec> folds;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        FoldSpec fold;
        fold.fold_index = static_cast<int>(i);
        fold.eval_subjects = {subjects[i]};
        for (std::size_t j = 0; j < subjects.size(); ++j)
            if (j != i) fold.train_subjects.push_back(subjects[j]);
        folds.push_back(std::move(fold));
    }
    return folds;
}

FoldSpec holdout_split(const std::vector<std::string>& subjects, int n_train) {
    if (n_train < 1) throw std::invalid_argument("n_train must be positive");
    if (static_cast<std::size_t>(n_train) >= subjects.size())
        throw std::runtime_error("empty eval set");
    FoldSpec fold;
    fold.fold_index = 0;
    fold.train_subjects.assign(subjects.begin(), subjects.begin() + n_train);
    fold.eval_subjects.assign(subjects.begin() + n_train, subjects.end());
    return fold;
}

namespace {

void mean_and_std(const std::vector<double>& values, double& mean, double& std_dev) {
    if (values.empty()) {
        mean = 0.0;
        std_dev = 0.0;
        return;
    }
    mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    std_dev = std::sqrt(var);
}

}  // namespace

EvalStats evaluate(const ModelParams& params, const std::vector<SamplePair>& pairs,
                   const LossConfig& loss_config) {
    if (pairs.empty()) throw std::invalid_argument("no pairs to evaluate");
    std::vector<double> ssims, psnrs;
    EvalStats stats;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        try {
            Tensor y_hat = e2fnet_forward(pairs[i].eeg.values, params);
            ssims.push_back(ssim(pairs[i].fmri.values, y_hat, loss_config));
            const double p = psnr(pairs[i].fmri.values, y_hat, loss_config.data_range);
            if (std::isfinite(p))
                psnrs.push_back(p);
            else
                ++stats.n_psnr_infinite;
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(e.what()) + " (sample " + std::to_string(i) +
                                     ", subject " + pairs[i].eeg.subject_id + ")");
        }
    }
    stats.n_samples = pairs.size();
    mean_and_std(ssims, stats.ssim_mean, stats.ssim_std);
    mean_and_std(psnrs, stats.psnr_mean, stats.psnr_std);
    return stats;
}

void aggregate_folds(MetricsReport& report) {
    std::vector<double> ssim_means, psnr_means;
    for (const auto& fold : report.per_fold) {
        ssim_means.push_back(fold.stats.ssim_mean);
        psnr_means.push_back(fold.stats.psnr_mean);
    }
    mean_and_std(ssim_means, report.ssim_mean, report.ssim_std);
    mean_and_std(psnr_means, report.psnr_mean, report.psnr_std);
}

MetricsReport run_cross_validation(const std::vector<SamplePair>& dataset,
                                   const std::vector<FoldSpec>& folds,
                                   const ArchitectureConfig& arch, const TrainConfig& train_config,
                                   const LossConfig& loss_config) {
    std::set<std::string> known;
    for (const auto& pair : dataset) known.insert(pair.eeg.subject_id);
    for (const auto& fold : folds) {
        for (const auto& s : fold.train_subjects)
            if (!known.count(s))
                throw std::invalid_argument("unknown subject in fold spec: " + s);
        for (const auto& s : fold.eval_subjects)
            if (!known.count(s))
                throw std::invalid_argument("unknown subject in fold spec: " + s);
    }

    MetricsReport report;
    report.protocol = folds.size() == 1 ? "holdout" : "loso";
    for (const auto& fold : folds) {
        std::set<std::string> train_ids(fold.train_subjects.begin(), fold.train_subjects.end());
        std::set<std::string> eval_ids(fold.eval_subjects.begin(), fold.eval_subjects.end());
        std::vector<SamplePair> train_pairs, eval_pairs;
        std::size_t leaked = 0;
        for (const auto& pair : dataset) {
            const bool in_train = train_ids.count(pair.eeg.subject_id) > 0;
            const bool in_eval = eval_ids.count(pair.eeg.subject_id) > 0;
            if (in_train) {
                train_pairs.push_back(pair);
                if (in_eval) ++leaked;  // trained on an eval subject's data
            }
            if (in_eval) eval_pairs.push_back(pair);
        }
        try {
            TrainConfig fold_config = train_config;
            fold_config.seed = mix64(train_config.seed, static_cast<std::uint64_t>(fold.fold_index));
            TrainResult trained = train(train_pairs, arch, fold_config, loss_config);
            FoldResult result;
            result.fold_index = fold.fold_index;
            result.eval_subjects = fold.eval_subjects;
            result.stats = evaluate(trained.params, eval_pairs, loss_config);
            result.leaked_samples = leaked;
            report.per_fold.push_back(std::move(result));
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(e.what()) + " (fold " +
                                     std::to_string(fold.fold_index) + ")");
        }
    }
    aggregate_folds(report);
    return report;
}

std::string MetricsReport::to_json() const {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fold : per_fold) {
        folds.push_back({{"fold_index", fold.fold_index},
                         {"eval_subjects", fold.eval_subjects},
                         {"ssim_mean", fold.stats.ssim_mean},
                         {"ssim_std", fold.stats.ssim_std},
                         {"psnr_mean", fold.stats.psnr_mean},
                         {"psnr_std", fold.stats.psnr_std},
                         {"n_samples", fold.stats.n_samples},
                         {"n_psnr_infinite", fold.stats.n_psnr_infinite},
                         {"leaked_samples", fold.leaked_samples}});
    }
    nlohmann::json j{{"protocol", protocol},
                     {"aggregate_over", "fold means"},
                     {"per_fold", folds},
                     {"ssim_mean", ssim_mean},
                     {"ssim_std", ssim_std},
                     {"psnr_mean", psnr_mean},
                     {"psnr_std", psnr_std}};
    return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MetricsReport report;
    report.protocol = j.at("protocol").get<std::string>();
    for (const auto& f : j.at("per_fold")) {
        FoldResult fold;
        fold.fold_index = f.at("fold_index").get<int>();
        fold.eval_subjects = f.at("eval_subjects").get<std::vector<std::string>>();
        fold.stats.ssim_mean = f.at("ssim_mean").get<double>();
        fold.stats.ssim_std = f.at("ssim_std").get<double>();
        fold.stats.psnr_mean = f.at("psnr_mean").get<double>();
        fold.stats.psnr_std = f.at("psnr_std").get<double>();
        fold.stats.n_samples = f.at("n_samples").get<std::size_t>();
        fold.stats.n_psnr_infinite = f.at("n_psnr_infinite").get<std::size_t>();
        fold.leaked_samples = f.at("leaked_samples").get<std::size_t>();
        report.per_fold.push_back(std::move(fold));
    }
    report.ssim_mean = j.at("ssim_mean").get<double>();
    report.ssim_std = j.at("ssim_std").get<double>();
    report.psnr_mean = j.at("psnr_mean").get<double>();
    report.psnr_std = j.at("psnr_std").get<double>();
    return report;
}

std::string MetricsReport::to_table() const {
    std::ostringstream os;
    char buf[128];
    os << "protocol: " << protocol << " (std across fold means)\n";
    os << "fold  eval_subjects         ssim             psnr (dB)        n\n";
    for (const auto& fold : per_fold) {
        std::string subjects;
        for (std::size_t i = 0; i < fold.eval_subjects.size(); ++i) {
            if (i) subjects += ",";
            subjects += fold.eval_subjects[i];
        }
        std::snprintf(buf, sizeof(buf), "%-5d %-20s %6.3f ± %5.3f %7.2f ± %5.2f %5zu\n",
                      fold.fold_index, subjects.c_str(), fold.stats.ssim_mean, fold.stats.ssim_std,
                      fold.stats.psnr_mean, fold.stats.psnr_std, fold.stats.n_samples);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-5s %-20s %6.3f ± %5.3f %7.2f ± %5.2f\n", "all", "-",
                  ssim_mean, ssim_std, psnr_mean, psnr_std);
    os << buf;
    return os.str();
}

}  // namespace e2f
