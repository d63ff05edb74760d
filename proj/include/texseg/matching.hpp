#pragma once

// Permutation-matched accuracy between an estimated and a true label map.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "texseg/grid.hpp"

namespace texseg {

struct MatchReport {
    std::vector<std::uint32_t> permutation;  ///< estimated label -> truth label
    double accuracy = 0.0;
    double error_rate = 0.0;
    std::size_t mismatched_count = 0;
    std::size_t total = 0;
};

inline constexpr std::size_t kMaxPermutationLabels = 8;

namespace detail {

// counts[e * k_truth + t] over the pixels selected by `mask` (all when empty).
inline std::vector<std::size_t> contingency(std::span<const std::uint32_t> est, std::span<const std::uint32_t> truth,
                                            std::size_t k_est, std::size_t k_truth, const std::vector<bool>& mask,
                                            std::size_t& total) {
    if (est.size() != truth.size()) throw std::invalid_argument("match: label maps differ in size");
    if (!mask.empty() && mask.size() != est.size()) throw std::invalid_argument("match: mask size mismatch");
    std::vector<std::size_t> counts(k_est * k_truth, 0);
    total = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        if (est[i] >= k_est || truth[i] >= k_truth) throw std::invalid_argument("match: label out of range");
        ++counts[est[i] * k_truth + truth[i]];
        ++total;
    }
    return counts;
}

inline MatchReport make_report(std::vector<std::uint32_t> perm, std::size_t matched, std::size_t total) {
    MatchReport r;
    r.permutation = std::move(perm);
    r.total = total;
    r.mismatched_count = total - matched;
    r.accuracy = total ? static_cast<double>(matched) / static_cast<double>(total) : 1.0;
    r.error_rate = total ? static_cast<double>(r.mismatched_count) / static_cast<double>(total) : 0.0;
    return r;
}

// Maximum-weight perfect assignment on a square matrix (Hungarian method,
// potentials form). Returns row -> column.
inline std::vector<std::size_t> max_weight_assignment(const std::vector<double>& weight, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -weight[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) minv[j] = cur, way[j] = j0;
                if (minv[j] < delta) delta = minv[j], j1 = j;
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace detail

/// Best agreement over all k! relabelings of the estimate (k <= 8). Among equally
/// good permutations the lexicographically first wins, so identity is preferred.
inline MatchReport best_permutation_match(std::span<const std::uint32_t> est, std::span<const std::uint32_t> truth,
                                          std::size_t k) {
    if (k == 0) throw std::invalid_argument("match: k must be >= 1");
    if (k > kMaxPermutationLabels)
        throw std::invalid_argument("match: k=" + std::to_string(k) +
                                    " exceeds the exhaustive search limit of 8; use best_injective_match "
                                    "(assignment solver) instead");
    std::size_t total = 0;
    const auto counts = detail::contingency(est, truth, k, k, {}, total);
    std::vector<std::uint32_t> perm(k), best;
    std::iota(perm.begin(), perm.end(), 0u);
    std::size_t best_matched = 0;
    bool have = false;
    do {
        std::size_t matched = 0;
        for (std::size_t e = 0; e < k; ++e) matched += counts[e * k + perm[e]];
        if (!have || matched > best_matched) best_matched = matched, best = perm, have = true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return detail::make_report(std::move(best), best_matched, total);
}

inline MatchReport best_permutation_match(const LabelMap& est, const LabelMap& truth, std::size_t k) {
    if (!est.same_shape(truth))
        throw std::invalid_argument("match: estimate is " + shape_string(est.rows(), est.cols()) + ", truth is " +
                                    shape_string(truth.rows(), truth.cols()));
    return best_permutation_match(est.values(), truth.values(), k);
}

/// Best one-to-one relabeling when the estimate and truth label counts differ.
/// Estimated labels left without a truth partner count as errors; the report's
/// permutation maps such labels to values >= k_truth. Restricted to `mask` when given.
inline MatchReport best_injective_match(std::span<const std::uint32_t> est, std::span<const std::uint32_t> truth,
                                        const std::vector<bool>& mask = {}) {
    std::uint32_t k_est = 0, k_truth = 0;
    for (auto l : est) k_est = std::max(k_est, l + 1);
    for (auto l : truth) k_truth = std::max(k_truth, l + 1);
    const std::size_t k = std::max<std::size_t>({k_est, k_truth, 1});
    std::size_t total = 0;
    const auto counts = detail::contingency(est, truth, k, k, mask, total);
    std::vector<double> weight(k * k, 0.0);
    for (std::size_t e = 0; e < k; ++e)
        for (std::size_t t = 0; t < k_truth; ++t) weight[e * k + t] = static_cast<double>(counts[e * k + t]);
    const auto assign = detail::max_weight_assignment(weight, k);
    std::vector<std::uint32_t> perm(k);
    std::size_t matched = 0;
    for (std::size_t e = 0; e < k; ++e) {
        perm[e] = static_cast<std::uint32_t>(assign[e]);
        if (assign[e] < k_truth) matched += counts[e * k + assign[e]];
    }
    perm.resize(std::max<std::size_t>(k_est, 1));
    return detail::make_report(std::move(perm), matched, total);
}

/// Applies a label mapping; labels outside the mapping are an error.
inline LabelMap relabel(const LabelMap& labels, std::span<const std::uint32_t> mapping) {
    LabelMap out(labels.rows(), labels.cols());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= mapping.size()) throw std::invalid_argument("relabel: label outside mapping");
        out[i] = mapping[labels[i]];
    }
    return out;
}

}  // namespace texseg
