#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/space.hpp"
#include "shgs/training.hpp"

namespace shgs {

// One scatter point: a background, one target value, and the CV result.
struct TrialRecord {
    int iteration_id = 0;
    BackgroundSetting background;
    double target_value = 0.0;
    CvResult result;
};

struct SweepReport {
    std::string dataset_name;
    TargetHyperparameter target = TargetHyperparameter::epochs;
    std::vector<double> values;
    int iterations = 0;
    std::uint64_t master_seed = 0;
    std::vector<TrialRecord> records;  // sorted by (iteration_id, target_value)
    double total_runtime_seconds = 0.0;

    double best_test_auc() const {
        double best = 0.0;
        for (const auto& r : records) best = std::max(best, r.result.test_auc);
        return best;
    }
};

struct SweepOptions {
    int threads = 1;
    std::function<void(const TrialRecord&)> on_trial;  // called as trials finish, any order
};

// The sweep itself: per iteration one fresh background (distinct from all
// earlier ones, redrawing on collision), then one trial per target value.
// Every trial's seed derives from (master_seed, iteration, value index),
// so the records are identical no matter how execution was scheduled.
inline SweepReport run_shgs(const EncodedDataset& data, const SplitPlan& plan,
                            const HyperparameterSpace& space, TargetHyperparameter target,
                            int iterations, std::uint64_t master_seed,
                            const SweepOptions& options = {}) {
    if (iterations < 1) throw std::invalid_argument("run_shgs: iterations must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();

    SweepReport report;
    report.target = target;
    report.iterations = iterations;
    report.master_seed = master_seed;
    report.values = expand_values(space, target).values;

    std::vector<BackgroundSetting> backgrounds;
    backgrounds.reserve(static_cast<std::size_t>(iterations));
    for (int i = 0; i < iterations; ++i) {
        rng_t rng(derive_seed(master_seed, seed_salt::background, static_cast<std::uint64_t>(i)));
        auto bg = sample_background(space, target, rng);
        int retries = 0;
        while (std::find(backgrounds.begin(), backgrounds.end(), bg) != backgrounds.end()) {
            if (++retries > 1000)
                throw data_error("run_shgs: could not draw a distinct background setting");
            bg = sample_background(space, target, rng);
        }
        backgrounds.push_back(std::move(bg));
    }

    const std::size_t n_values = report.values.size();
    const std::size_t n_trials = static_cast<std::size_t>(iterations) * n_values;
    report.records.resize(n_trials);

    std::mutex cb_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n_trials) return;
            const auto i = static_cast<int>(k / n_values);
            const std::size_t j = k % n_values;
            TrialRecord rec;
            rec.iteration_id = i;
            rec.background = backgrounds[static_cast<std::size_t>(i)];
            rec.target_value = report.values[j];
            const auto setting = make_setting(rec.background, rec.target_value);
            const auto seed = derive_seed(master_seed, seed_salt::trial,
                                          static_cast<std::uint64_t>(i), j);
            rec.result = evaluate_setting(data, plan, setting, seed);
            report.records[k] = std::move(rec);
            if (options.on_trial) {
                std::lock_guard<std::mutex> lock(cb_mutex);
                options.on_trial(report.records[k]);
            }
        }
    };

    const int threads = std::max(1, options.threads);
    if (threads == 1 || n_trials == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n_trials);
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    report.total_runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// A reduced target range for a subsequent low-budget grid search.
struct RangeRecommendation {
    double lo = 0.0;
    double hi = 0.0;
    // Present when a sweep report was supplied: the tightest prefix
    // (suffix for momentum) of the value list that still contains every
    // trial within 0.01 AUC of the sweep's best.
    std::optional<std::pair<double, double>> empirical;
};

inline RangeRecommendation recommend_range(TargetHyperparameter target, int n_train,
                                           const SweepReport* report = nullptr) {
    RangeRecommendation rec;
    switch (target) {
        case TargetHyperparameter::epochs:
            rec.lo = 5;
            rec.hi = 100;
            break;
        case TargetHyperparameter::batch_size:
            rec.lo = 1;
            rec.hi = static_cast<double>(n_train / 5);
            break;
        case TargetHyperparameter::dropout:
            rec.lo = 0.0;
            rec.hi = 0.5;
            break;
        case TargetHyperparameter::momentum:
            rec.lo = 0.7;
            rec.hi = 0.9;
            break;
        case TargetHyperparameter::decay:
            rec.lo = 0.0;
            rec.hi = 0.003;
            break;
        case TargetHyperparameter::learning_rate:
            rec.lo = 0.001;
            rec.hi = 0.03;
            break;
        case TargetHyperparameter::l1:
        case TargetHyperparameter::l2:
            rec.lo = 0.0;
            rec.hi = 0.03;
            break;
    }

    if (report != nullptr) {
        if (report->target != target)
            throw std::invalid_argument("recommend_range: report targets " +
                                        std::string(to_string(report->target)) + ", not " +
                                        to_string(target));
        if (report->records.empty())
            throw std::invalid_argument("recommend_range: empty report");
        const double cutoff = report->best_test_auc() - 0.01;
        double good_lo = report->values.back();
        double good_hi = report->values.front();
        for (const auto& r : report->records) {
            if (r.result.test_auc >= cutoff) {
                good_lo = std::min(good_lo, r.target_value);
                good_hi = std::max(good_hi, r.target_value);
            }
        }
        if (target == TargetHyperparameter::momentum)
            rec.empirical = {good_lo, report->values.back()};
        else
            rec.empirical = {report->values.front(), good_hi};
    }
    return rec;
}

}  // namespace shgs
