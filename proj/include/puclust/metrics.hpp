#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "common.hpp"

namespace puclust {

struct ConfusionCounts
{
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

struct F1Score
{
    double value = 0.0;
    /// precision or recall had a zero denominator, or tp = 0
    bool degenerate = false;
};

inline ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred)
{
    if (y_true.size() != y_pred.size()) throw Error("confusion: length mismatch");
    if (y_true.empty()) throw Error("confusion: empty input");
    ConfusionCounts cc;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == 1;
        const bool p = y_pred[i] == 1;
        if (t && p) ++cc.tp;
        else if (!t && p) ++cc.fp;
        else if (!t && !p) ++cc.tn;
        else ++cc.fn;
    }
    return cc;
}

inline double accuracy(const ConfusionCounts& cc)
{
    if (cc.total() == 0) throw Error("accuracy: no instances");
    return static_cast<double>(cc.tp + cc.tn) / static_cast<double>(cc.total());
}

inline F1Score f1(const ConfusionCounts& cc)
{
    if (cc.tp == 0) return {0.0, true};
    const double precision = static_cast<double>(cc.tp) / static_cast<double>(cc.tp + cc.fp);
    const double recall = static_cast<double>(cc.tp) / static_cast<double>(cc.tp + cc.fn);
    return {2.0 * precision * recall / (precision + recall), false};
}

/// Hard labels: posterior >= threshold.
inline Labels classify(const Vector& posterior, double threshold = 0.5)
{
    Labels out(static_cast<std::size_t>(posterior.size()));
    for (Index i = 0; i < posterior.size(); ++i) out[static_cast<std::size_t>(i)] = posterior(i) >= threshold ? 1 : 0;
    return out;
}

/// Mann-Whitney AUC: P(score of a random positive > score of a random
/// negative), ties counted one half. Sort-based with mid-ranks.
inline double auc(std::span<const int> y_true, std::span<const double> scores)
{
    if (y_true.size() != scores.size()) throw Error("auc: length mismatch");
    const std::size_t n = y_true.size();
    const std::size_t n_pos = count_ones(y_true);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw Error("auc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // twice the rank sum of positives, with mid-ranks for ties (kept integral)
    unsigned long long rank2_sum = 0;
    for (std::size_t k = 0; k < n;) {
        std::size_t end = k;
        while (end < n && scores[order[end]] == scores[order[k]]) ++end;
        const unsigned long long rank2 = static_cast<unsigned long long>(k + 1 + end);  // 2 * mid-rank
        for (std::size_t t = k; t < end; ++t) {
            if (y_true[order[t]] == 1) rank2_sum += rank2;
        }
        k = end;
    }
    const double u2 = static_cast<double>(rank2_sum) - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u2 / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double auc(std::span<const int> y_true, const Vector& scores)
{
    return auc(y_true, std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
}

} // namespace puclust
