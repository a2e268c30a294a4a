#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "shgs/common.hpp"

namespace shgs {

// ROC-AUC via the Mann-Whitney rank-sum statistic, ties counted at 1/2
// (mid-rank method). Equivalent to exhaustive pair counting: over all
// (positive, negative) pairs score 1 if the positive ranks higher, 0.5 on
// a tie. O(n log n).
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    if (labels.size() != n) throw std::invalid_argument("roc_auc: scores/labels length mismatch");
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += (y != 0);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw data_error("AUC undefined: both classes required");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + j + 1);  // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) pos_rank_sum += mid_rank;
        i = j;
    }
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace shgs
