#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "shgs/common.hpp"
#include "shgs/dataset.hpp"

namespace shgs {

// Row partition of a dataset: a stratified train/test holdout, later
// augmented with a stratified k-fold assignment of the training rows.
// fold_of[row] is -1 for test rows (and for train rows before the k-fold
// pass).
struct SplitPlan {
    std::size_t n_rows = 0;
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
    std::vector<int> fold_of;                // size n_rows
    int fold_count = 0;

    std::size_t n_train() const { return train_indices.size(); }

    std::vector<std::size_t> fold_indices(int f) const {
        std::vector<std::size_t> out;
        for (std::size_t r : train_indices)
            if (fold_of[r] == f) out.push_back(r);
        return out;
    }

    std::vector<std::size_t> train_indices_excluding(int f) const {
        std::vector<std::size_t> out;
        for (std::size_t r : train_indices)
            if (fold_of[r] != f) out.push_back(r);
        return out;
    }
};

namespace detail {

inline std::vector<std::size_t> class_indices(const std::vector<int>& labels, int cls) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == cls) out.push_back(i);
    return out;
}

inline void seeded_shuffle(std::vector<std::size_t>& v, rng_t& rng) {
    // Fisher-Yates with explicit draws, stable across standard libraries.
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace detail

// Splits off round_half_up(test_fraction * class count) rows of each class
// into the test side, chosen by a seeded within-class shuffle. Remainders
// stay in training.
inline SplitPlan stratified_holdout(const EncodedDataset& data, double test_fraction,
                                    std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must lie in (0,1)");

    SplitPlan plan;
    plan.n_rows = data.n_rows();
    plan.fold_of.assign(plan.n_rows, -1);

    rng_t rng(seed);
    for (int cls : {1, 0}) {
        auto idx = detail::class_indices(data.labels, cls);
        if (idx.empty())
            throw data_error("stratified holdout: class " + std::to_string(cls) + " is empty");
        const auto n_test = static_cast<std::size_t>(
            round_half_up(test_fraction * static_cast<double>(idx.size())));
        if (n_test == 0 || n_test >= idx.size())
            throw data_error("stratified holdout: class " + std::to_string(cls) +
                             " would have an empty side (" + std::to_string(idx.size()) +
                             " rows, " + std::to_string(n_test) + " to test)");
        detail::seeded_shuffle(idx, rng);
        plan.test_indices.insert(plan.test_indices.end(), idx.begin(), idx.begin() + n_test);
        plan.train_indices.insert(plan.train_indices.end(), idx.begin() + n_test, idx.end());
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

// Assigns training rows to k folds: within-class seeded shuffle, then
// round-robin with a fold cursor carried across classes so that both the
// per-fold class counts and the total fold sizes differ by at most one.
inline SplitPlan stratified_kfold(SplitPlan plan, const std::vector<int>& labels, int k,
                                  std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be >= 2");
    if (labels.size() != plan.n_rows)
        throw std::invalid_argument("labels/plan size mismatch");

    rng_t rng(seed);
    std::size_t cursor = 0;
    for (int cls : {1, 0}) {
        std::vector<std::size_t> idx;
        for (std::size_t r : plan.train_indices)
            if (labels[r] == cls) idx.push_back(r);
        if (idx.size() < static_cast<std::size_t>(k))
            throw data_error("stratified k-fold: class " + std::to_string(cls) + " has " +
                             std::to_string(idx.size()) + " training rows, fewer than k=" +
                             std::to_string(k));
        detail::seeded_shuffle(idx, rng);
        for (std::size_t r : idx) {
            plan.fold_of[r] = static_cast<int>(cursor % static_cast<std::size_t>(k));
            ++cursor;
        }
    }
    plan.fold_count = k;
    return plan;
}

}  // namespace shgs
