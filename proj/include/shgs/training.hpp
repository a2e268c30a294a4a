#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <chrono>
#include <numeric>
#include <optional>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/dataset.hpp"
#include "shgs/metrics.hpp"
#include "shgs/network.hpp"
#include "shgs/optimizer.hpp"
#include "shgs/splits.hpp"

namespace shgs {

// One complete value assignment for every tunable hyperparameter. The
// output activation is always sigmoid and the loss binary cross-entropy;
// neither is tunable. momentum is consumed only by the SGD optimizer and
// may be unset (plain SGD).
struct HyperparameterSetting {
    int epochs = 1;
    int batch_size = 1;
    double learning_rate = 0.01;
    double dropout = 0.0;
    std::optional<double> momentum;
    double decay = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    int hidden_layers = 1;
    int hidden_nodes = 1;
    OptimizerKind optimizer = OptimizerKind::sgd;
    Initializer initializer = Initializer::glorot_uniform;
    Activation input_activation = Activation::relu;
    Activation hidden_activation = Activation::relu;

    NetworkArchitecture architecture(int input_dim) const {
        NetworkArchitecture arch;
        arch.input_dim = input_dim;
        arch.hidden_layer_count = hidden_layers;
        arch.hidden_nodes = hidden_nodes;
        arch.input_activation = input_activation;
        arch.hidden_activation = hidden_activation;
        return arch;
    }
};

enum class TrialStatus { ok, diverged };

inline const char* to_string(TrialStatus s) {
    return s == TrialStatus::ok ? "ok" : "diverged";
}

struct FoldAuc {
    double train = 0.0;
    double validation = 0.0;
};

// 5-fold CV result plus the refit-and-holdout score. A diverged trial
// (non-finite loss or parameters anywhere) reports every AUC as exactly
// 0.5, the random-guess baseline.
struct CvResult {
    double mean_train_auc = 0.0;
    double mean_test_auc = 0.0;
    double test_auc = 0.0;
    double runtime_seconds = 0.0;
    std::vector<FoldAuc> fold_aucs;
    TrialStatus status = TrialStatus::ok;
};

// Counters injectable into train()/evaluate_setting(), used by tests to
// observe the update-count law.
struct TrainProbe {
    std::atomic<long long> train_calls{0};
    std::atomic<long long> update_calls{0};
};

struct TrainOutcome {
    NetworkParameters params;
    bool diverged = false;
};

// Mini-batch training of one setting: per epoch a seeded reshuffle, then
// ceil(n/batch_size) batches (the last one smaller, never dropped), each
// running forward with fresh dropout masks, backward, and one optimizer
// update at the epoch's decayed learning rate.
inline TrainOutcome train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                          const HyperparameterSetting& setting, std::uint64_t seed,
                          TrainProbe* probe = nullptr) {
    if (setting.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (setting.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (probe) probe->train_calls.fetch_add(1, std::memory_order_relaxed);

    const auto n = static_cast<std::size_t>(features.rows());
    const auto arch = setting.architecture(static_cast<int>(features.cols()));
    TrainOutcome out;
    out.params = initialize(arch, setting.initializer, derive_seed(seed, seed_salt::init));
    auto opt = OptimizerState::create(setting.optimizer, out.params, setting.learning_rate,
                                      setting.decay,
                                      setting.optimizer == OptimizerKind::sgd
                                          ? setting.momentum.value_or(0.0)
                                          : 0.0);
    rng_t rng(derive_seed(seed, seed_salt::shuffle));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch = static_cast<std::size_t>(setting.batch_size);

    for (int epoch = 0; epoch < setting.epochs; ++epoch) {
        detail::seeded_shuffle(order, rng);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min(batch, n - start);
            Eigen::MatrixXd xb(count, features.cols());
            std::vector<int> yb(count);
            for (std::size_t i = 0; i < count; ++i) {
                xb.row(static_cast<Eigen::Index>(i)) =
                    features.row(static_cast<Eigen::Index>(order[start + i]));
                yb[i] = labels[order[start + i]];
            }
            DropoutMask masks;
            const bool use_masks = setting.dropout > 0.0;
            if (use_masks) masks = sample_masks(arch, setting.dropout, rng);

            const auto cache = forward(arch, out.params, xb, use_masks ? &masks : nullptr);
            const double batch_loss = loss(cache.output(), yb, out.params, setting.l1, setting.l2);
            if (!std::isfinite(batch_loss)) {
                out.diverged = true;
                return out;
            }
            const auto grads = backward(arch, out.params, cache, yb,
                                        use_masks ? &masks : nullptr, setting.l1, setting.l2);
            apply_update(opt, out.params, grads, epoch);
            if (probe) probe->update_calls.fetch_add(1, std::memory_order_relaxed);
            if (!out.params.all_finite()) {
                out.diverged = true;
                return out;
            }
        }
    }
    return out;
}

namespace detail {

inline Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

inline std::vector<int> gather_labels(const std::vector<int>& labels,
                                      const std::vector<std::size_t>& idx) {
    std::vector<int> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
    return out;
}

}  // namespace detail

// The full per-setting protocol: five fold models (train on the other four
// folds, AUC on those folds and on the held-out fold), then a refit on the
// entire training partition scored against the untouched holdout. Exactly
// k+1 train() calls, always, with per-fold seeds derived from (seed, fold).
inline CvResult evaluate_setting(const EncodedDataset& data, const SplitPlan& plan,
                                 const HyperparameterSetting& setting, std::uint64_t seed,
                                 TrainProbe* probe = nullptr) {
    if (plan.fold_count < 2)
        throw std::invalid_argument("evaluate_setting: plan has no k-fold assignment");
    const auto t0 = std::chrono::steady_clock::now();
    const auto arch = setting.architecture(static_cast<int>(data.n_features()));

    CvResult res;
    bool diverged = false;
    for (int f = 0; f < plan.fold_count; ++f) {
        const auto train_idx = plan.train_indices_excluding(f);
        const auto val_idx = plan.fold_indices(f);
        const auto xt = detail::gather_rows(data.features, train_idx);
        const auto yt = detail::gather_labels(data.labels, train_idx);
        const auto outcome = train(xt, yt, setting, derive_seed(seed, static_cast<std::uint64_t>(f)),
                                   probe);
        if (outcome.diverged) {
            diverged = true;
            continue;
        }
        const auto xv = detail::gather_rows(data.features, val_idx);
        const auto yv = detail::gather_labels(data.labels, val_idx);
        FoldAuc fa;
        fa.train = roc_auc(predict_vector(arch, outcome.params, xt), yt);
        fa.validation = roc_auc(predict_vector(arch, outcome.params, xv), yv);
        res.fold_aucs.push_back(fa);
    }

    const auto xt = detail::gather_rows(data.features, plan.train_indices);
    const auto yt = detail::gather_labels(data.labels, plan.train_indices);
    const auto refit =
        train(xt, yt, setting, derive_seed(seed, static_cast<std::uint64_t>(plan.fold_count)),
              probe);
    if (refit.diverged) {
        diverged = true;
    } else {
        const auto xs = detail::gather_rows(data.features, plan.test_indices);
        const auto ys = detail::gather_labels(data.labels, plan.test_indices);
        res.test_auc = roc_auc(predict_vector(arch, refit.params, xs), ys);
    }

    if (diverged) {
        res.status = TrialStatus::diverged;
        res.fold_aucs.assign(static_cast<std::size_t>(plan.fold_count), FoldAuc{0.5, 0.5});
        res.mean_train_auc = res.mean_test_auc = res.test_auc = 0.5;
    } else {
        res.status = TrialStatus::ok;
        double st = 0.0, sv = 0.0;
        for (const auto& fa : res.fold_aucs) {
            st += fa.train;
            sv += fa.validation;
        }
        res.mean_train_auc = st / static_cast<double>(res.fold_aucs.size());
        res.mean_test_auc = sv / static_cast<double>(res.fold_aucs.size());
    }
    res.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace shgs
