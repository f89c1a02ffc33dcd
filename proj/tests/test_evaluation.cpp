#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"

#include "e2f/evaluation.hpp"
#include "e2f/rng.hpp"
#include "test_util.hpp"

using namespace e2f;
using e2f_test::random_tensor;

namespace {

ArchitectureConfig tiny_arch() {
    ArchitectureConfig c;
    c.input_t = 2;
    c.input_c = 3;
    c.input_f = 17;
    c.feature_depth = 8;
    c.out_d = 2;
    c.out_w = 8;
    c.out_h = 8;
    c.encoder_depths = {4, 8};
    c.encoder_kernels = {{1, 3}, {1, 3}};
    c.encoder_strides = {{1, 2}, {1, 1}};
    return c;
}

LossConfig tiny_loss() {
    LossConfig loss;
    loss.ssim_window = 5;
    return loss;
}

std::vector<std::string> ids(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "s%02d", i);
        out.emplace_back(buf);
    }
    return out;
}

std::vector<SamplePair> subject_pairs(const std::string& subject, std::size_t n,
                                      std::uint64_t seed) {
    std::vector<SamplePair> ds(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds[i].eeg.values = random_tensor({2, 3, 17}, mix64(seed, 2 * i));
        ds[i].eeg.subject_id = subject;
        ds[i].eeg.volume_index = static_cast<int>(i + 1);
        ds[i].fmri.values = random_tensor({2, 8, 8}, mix64(seed, 2 * i + 1));
        ds[i].fmri.subject_id = subject;
        ds[i].fmri.volume_index = static_cast<int>(i + 1);
    }
    return ds;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("leave-one-subject-out covers every subject exactly once") {
    auto subjects = ids(15);
    auto folds = loso_split(subjects);
    REQUIRE(folds.size() == 15);
    std::set<std::string> evaluated;
    for (const auto& fold : folds) {
        REQUIRE(fold.eval_subjects.size() == 1);
        CHECK(fold.train_subjects.size() == 14);
        evaluated.insert(fold.eval_subjects[0]);
        // no overlap inside a fold
        for (const auto& t : fold.train_subjects) CHECK(t != fold.eval_subjects[0]);
    }
    CHECK(evaluated.size() == 15);
    // each subject trains in exactly K-1 folds
    for (const auto& s : subjects) {
        int train_count = 0;
        for (const auto& fold : folds)
            for (const auto& t : fold.train_subjects)
                if (t == s) ++train_count;
        CHECK(train_count == 14);
    }
    CHECK(folds[3].eval_subjects[0] == subjects[3]);
}

TEST_CASE("two subjects make two folds") {
    auto folds = loso_split(ids(2));
    REQUIRE(folds.size() == 2);
    CHECK(folds[0].eval_subjects == std::vector<std::string>{"s00"});
    CHECK(folds[0].train_subjects == std::vector<std::string>{"s01"});
    CHECK(folds[1].eval_subjects == std::vector<std::string>{"s01"});
}

TEST_CASE("a single subject cannot be split") {
    CHECK_THROWS_WITH_AS(loso_split(ids(1)), doctest::Contains("need at least two subjects"),
                         std::runtime_error);
}

TEST_CASE("holdout keeps manifest order") {
    auto subjects = ids(20);
    FoldSpec fold = holdout_split(subjects, 16);
    REQUIRE(fold.train_subjects.size() == 16);
    REQUIRE(fold.eval_subjects.size() == 4);
    CHECK(fold.train_subjects.front() == "s00");
    CHECK(fold.train_subjects.back() == "s15");
    CHECK(fold.eval_subjects == std::vector<std::string>{"s16", "s17", "s18", "s19"});
}

TEST_CASE("holdout needs something left to evaluate") {
    CHECK_THROWS_WITH_AS(holdout_split(ids(20), 20), doctest::Contains("empty eval set"),
                         std::runtime_error);
    CHECK_THROWS_AS(holdout_split(ids(3), 0), std::invalid_argument);
    FoldSpec fold = holdout_split(ids(3), 2);
    CHECK(fold.eval_subjects == std::vector<std::string>{"s02"});
}

TEST_CASE("a perfect predictor evaluates to unit similarity") {
    ModelParams p = init_params(tiny_arch(), 1);
    auto pairs = subject_pairs("s00", 3, 10);
    for (auto& pair : pairs) pair.fmri.values = e2fnet_forward(pair.eeg.values, p);
    EvalStats stats = evaluate(p, pairs, tiny_loss());
    CHECK(stats.ssim_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stats.ssim_std == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stats.n_samples == 3);
    CHECK(stats.n_psnr_infinite == 3);  // mse is exactly zero on every sample
    CHECK(stats.psnr_mean == 0.0);      // nothing finite to aggregate
}

TEST_CASE("evaluation matches a hand-rolled loop") {
    ModelParams p = init_params(tiny_arch(), 2);
    auto pairs = subject_pairs("s00", 5, 20);
    LossConfig loss = tiny_loss();
    EvalStats stats = evaluate(p, pairs, loss);

    std::vector<double> ssims, psnrs;
    for (const auto& pair : pairs) {
        Tensor y_hat = e2fnet_forward(pair.eeg.values, p);
        ssims.push_back(ssim(pair.fmri.values, y_hat, loss));
        psnrs.push_back(psnr(pair.fmri.values, y_hat, loss.data_range));
    }
    double mean = 0.0;
    for (double s : ssims) mean += s;
    mean /= ssims.size();
    double var = 0.0;
    for (double s : ssims) var += (s - mean) * (s - mean);
    var /= ssims.size();
    CHECK(stats.ssim_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(stats.ssim_std == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
    double pmean = 0.0;
    for (double v : psnrs) pmean += v;
    pmean /= psnrs.size();
    CHECK(stats.psnr_mean == doctest::Approx(pmean).epsilon(1e-12));
    CHECK(stats.n_psnr_infinite == 0);
}

TEST_CASE("evaluation failures carry the sample context") {
    ModelParams p = init_params(tiny_arch(), 3);
    auto pairs = subject_pairs("subj_x", 2, 30);
    pairs[1].eeg.values = random_tensor({2, 3, 16}, 1);  // wrong frequency extent
    CHECK_THROWS_WITH_AS(evaluate(p, pairs, tiny_loss()),
                         doctest::Contains("(sample 1, subject subj_x)"), std::runtime_error);
    CHECK_THROWS_AS(evaluate(p, {}, tiny_loss()), std::invalid_argument);
}

TEST_CASE("fold aggregation averages fold means") {
    MetricsReport report;
    report.protocol = "loso";
    const double ssims[3] = {0.8, 0.6, 0.7};
    const double psnrs[3] = {20.0, 26.0, 23.0};
    for (int i = 0; i < 3; ++i) {
        FoldResult fold;
        fold.fold_index = i;
        fold.stats.ssim_mean = ssims[i];
        fold.stats.psnr_mean = psnrs[i];
        fold.stats.n_samples = 10 * (i + 1);  // aggregation must ignore fold sizes
        report.per_fold.push_back(fold);
    }
    aggregate_folds(report);
    CHECK(report.ssim_mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(report.psnr_mean == doctest::Approx(23.0).epsilon(1e-12));
    // population std over {0.8, 0.6, 0.7}
    CHECK(report.ssim_std == doctest::Approx(std::sqrt(0.02 / 3.0)).epsilon(1e-9));
    CHECK(report.psnr_std == doctest::Approx(std::sqrt(6.0)).epsilon(1e-9));
}

TEST_CASE("cross validation trains per fold without leakage") {
    std::vector<SamplePair> dataset;
    for (int s = 0; s < 3; ++s) {
        auto pairs = subject_pairs(ids(3)[s], 3, 100 + s);
        dataset.insert(dataset.end(), pairs.begin(), pairs.end());
    }
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 6;
    cfg.monitor_fraction = 0.0;
    auto folds = loso_split(ids(3));
    MetricsReport report = run_cross_validation(dataset, folds, tiny_arch(), cfg, tiny_loss());
    CHECK(report.protocol == "loso");
    REQUIRE(report.per_fold.size() == 3);
    double mean = 0.0;
    for (const auto& fold : report.per_fold) {
        CHECK(fold.leaked_samples == 0);
        CHECK(fold.stats.n_samples == 3);
        mean += fold.stats.ssim_mean;
    }
    CHECK(report.ssim_mean == doctest::Approx(mean / 3.0).epsilon(1e-12));

    MetricsReport again = run_cross_validation(dataset, folds, tiny_arch(), cfg, tiny_loss());
    CHECK(again.to_json() == report.to_json());
}

TEST_CASE("a subject on both sides of a fold is evaluated and counted as leaked") {
    std::vector<SamplePair> dataset = subject_pairs("s00", 3, 60);
    auto extra = subject_pairs("s01", 3, 61);
    dataset.insert(dataset.end(), extra.begin(), extra.end());
    FoldSpec dirty;
    dirty.fold_index = 0;
    dirty.train_subjects = {"s00", "s01"};
    dirty.eval_subjects = {"s01"};
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 6;
    cfg.monitor_fraction = 0.0;
    MetricsReport report = run_cross_validation(dataset, {dirty}, tiny_arch(), cfg, tiny_loss());
    REQUIRE(report.per_fold.size() == 1);
    CHECK(report.per_fold[0].leaked_samples == 3);
    CHECK(report.per_fold[0].stats.n_samples == 3);  // still scored, not dropped
}

TEST_CASE("unknown subjects in a fold spec are rejected") {
    auto dataset = subject_pairs("s00", 2, 40);
    FoldSpec fold;
    fold.train_subjects = {"s00"};
    fold.eval_subjects = {"ghost"};
    CHECK_THROWS_WITH_AS(
        run_cross_validation(dataset, {fold}, tiny_arch(), TrainConfig{}, tiny_loss()),
        doctest::Contains("unknown subject"), std::invalid_argument);
}

TEST_CASE("reports survive a json round trip") {
    MetricsReport report;
    report.protocol = "holdout";
    FoldResult fold;
    fold.fold_index = 0;
    fold.eval_subjects = {"s16", "s17"};
    fold.stats = {0.605, 0.046, 21.5, 1.25, 40, 2};
    fold.leaked_samples = 0;
    report.per_fold.push_back(fold);
    aggregate_folds(report);

    MetricsReport back = MetricsReport::from_json(report.to_json());
    CHECK(back.protocol == report.protocol);
    REQUIRE(back.per_fold.size() == 1);
    CHECK(back.per_fold[0].eval_subjects == fold.eval_subjects);
    CHECK(back.per_fold[0].stats.ssim_mean == fold.stats.ssim_mean);
    CHECK(back.per_fold[0].stats.n_psnr_infinite == 2);
    CHECK(back.ssim_mean == report.ssim_mean);
}

TEST_CASE("the table renders mean-plus-minus-std at three decimals") {
    MetricsReport report;
    report.protocol = "loso";
    FoldResult fold;
    fold.fold_index = 0;
    fold.eval_subjects = {"s03"};
    fold.stats = {0.605, 0.046, 22.512, 0.75, 12, 0};
    report.per_fold.push_back(fold);
    aggregate_folds(report);
    std::string table = report.to_table();
    CHECK(table.find("0.605 ± 0.046") != std::string::npos);
    CHECK(table.find("22.51 ±") != std::string::npos);
    CHECK(table.find("loso") != std::string::npos);
    CHECK(table.find("s03") != std::string::npos);
}

}  // TEST_SUITE
