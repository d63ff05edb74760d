#pragma once

// Clustering back ends over feature vectors: size-constrained k-means,
// threshold single-linkage on the subsample grid, and agglomerative
// (single / ward) trees with a size-constrained cut.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "texseg/features.hpp"
#include "texseg/grid.hpp"
#include "texseg/parallel.hpp"
#include "texseg/points.hpp"
#include "texseg/random.hpp"
#include "texseg/union_find.hpp"

namespace texseg {

enum class Metric { Linf, L2 };

inline double distance(Metric metric, std::span<const double> x, std::span<const double> y) {
    return metric == Metric::Linf ? linf_distance(x, y) : std::sqrt(squared_euclidean(x, y));
}

// ---------------------------------------------------------------------------
// Membership matrices
// ---------------------------------------------------------------------------

/// One-hot assignment matrix (points x k).
struct MembershipMatrix {
    std::size_t k = 0;
    std::vector<std::vector<std::uint8_t>> rows;
};

inline MembershipMatrix labels_to_membership(std::span<const std::uint32_t> labels, std::size_t k) {
    MembershipMatrix w{k, {}};
    w.rows.reserve(labels.size());
    for (auto l : labels) {
        if (l >= k) throw std::invalid_argument("membership: label " + std::to_string(l) + " >= k");
        std::vector<std::uint8_t> row(k, 0);
        row[l] = 1;
        w.rows.push_back(std::move(row));
    }
    return w;
}

inline std::vector<std::uint32_t> membership_to_labels(const MembershipMatrix& w) {
    std::vector<std::uint32_t> labels;
    labels.reserve(w.rows.size());
    for (const auto& row : w.rows) {
        if (row.size() != w.k) throw std::invalid_argument("membership: row length != k");
        std::size_t ones = 0, at = 0;
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j]) ++ones, at = j;
        if (ones != 1) throw std::invalid_argument("membership: row is not one-hot");
        labels.push_back(static_cast<std::uint32_t>(at));
    }
    return labels;
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

struct KMeansParams {
    std::size_t k = 2;
    std::size_t restarts = 10;
    std::size_t max_iters = 300;
    std::size_t min_cluster_size = 0;
    Seed seed{0};
    double tol = 1e-10;
};

struct ClusterResult {
    std::vector<std::uint32_t> labels;
    PointSet centroids;  ///< template E, one row per cluster
    double objective_sq_euclid = 0.0;
    double objective_sq_linf = 0.0;
    std::size_t iterations = 0;
    std::size_t restart_index = 0;
    Seed seed{0};
    /// Squared-Euclidean objective of the winning restart after each assignment step,
    /// then after each transfer sweep.
    std::vector<double> trace;
};

/// Sum over points of the squared L-infinity distance to the assigned centroid.
inline double eval_linf_objective(const PointSet& points, std::span<const std::uint32_t> labels,
                                  const PointSet& centroids) {
    if (labels.size() != points.size()) throw std::invalid_argument("objective: label count != point count");
    if (centroids.dim() != points.dim() && !points.empty())
        throw std::invalid_argument("objective: centroid dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] >= centroids.size()) throw std::invalid_argument("objective: label without centroid");
        const double d = linf_distance(points[i], centroids[labels[i]]);
        total += d * d;
    }
    return total;
}

inline double eval_sq_euclid_objective(const PointSet& points, std::span<const std::uint32_t> labels,
                                       const PointSet& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) total += squared_euclidean(points[i], centroids[labels[i]]);
    return total;
}

namespace detail {

inline PointSet cluster_means(const PointSet& points, std::span<const std::uint32_t> labels, std::size_t k) {
    PointSet means(k, points.dim());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto row = means[labels[i]];
        const auto p = points[i];
        for (std::size_t j = 0; j < p.size(); ++j) row[j] += p[j];
        ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] > 0)
            for (double& v : means[c]) v /= static_cast<double>(counts[c]);
    return means;
}

inline PointSet kmeans_plus_plus(const PointSet& points, std::size_t k, Engine& rng) {
    const std::size_t n = points.size();
    PointSet centers(points.dim());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    centers.push_back(points[pick(rng)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_euclidean(points[i], centers[0]);
    while (centers.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t chosen = 0;
        if (total > 0.0) {
            double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= d2[i];
                if (target < 0.0 && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.push_back(points[chosen]);
        const auto c = centers[centers.size() - 1];
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_euclidean(points[i], c));
    }
    return centers;
}

// Moves points from clusters above the floor into clusters below it, cheapest
// squared-Euclidean cost increase first.
inline void enforce_min_size(const PointSet& points, std::vector<std::uint32_t>& labels, const PointSet& centroids,
                             std::size_t k, std::size_t floor) {
    if (floor == 0 || k * floor > points.size()) return;
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t target = 0; target < k; ++target) {
        if (sizes[target] >= floor) continue;
        std::vector<std::pair<double, std::size_t>> moves;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (labels[i] == target) continue;
            const double cost =
                squared_euclidean(points[i], centroids[target]) - squared_euclidean(points[i], centroids[labels[i]]);
            moves.emplace_back(cost, i);
        }
        std::sort(moves.begin(), moves.end());
        for (const auto& [cost, i] : moves) {
            if (sizes[target] >= floor) break;
            if (sizes[labels[i]] <= floor) continue;
            --sizes[labels[i]];
            labels[i] = static_cast<std::uint32_t>(target);
            ++sizes[target];
        }
    }
}

struct LloydRun {
    std::vector<std::uint32_t> labels;
    PointSet centroids;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

inline LloydRun lloyd(const PointSet& points, PointSet centroids, const KMeansParams& params) {
    const std::size_t n = points.size(), k = params.k;
    LloydRun run{std::vector<std::uint32_t>(n, 0), std::move(centroids), 0, {}};
    std::vector<double> dist(n, 0.0);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= params.max_iters; ++it) {
        std::vector<std::uint32_t> next(n, 0);
        parallel_for(0, n, [&](std::size_t i) {
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_euclidean(points[i], run.centroids[c]);
                if (d < best) best = d, arg = static_cast<std::uint32_t>(c);
            }
            next[i] = arg;
            dist[i] = best;
        });
        const double objective = std::accumulate(dist.begin(), dist.end(), 0.0);
        run.trace.push_back(objective);
        run.iterations = it;
        const bool changed = it == 1 || next != run.labels;
        run.labels = std::move(next);

        // Empty clusters take the point farthest from its centroid.
        std::vector<std::size_t> sizes(k, 0);
        for (auto l : run.labels) ++sizes[l];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (sizes[run.labels[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
            if (far == n) break;
            --sizes[run.labels[far]];
            run.labels[far] = static_cast<std::uint32_t>(c);
            sizes[c] = 1;
            dist[far] = 0.0;
        }
        run.centroids = cluster_means(points, run.labels, k);
        if (!changed || (it > 1 && previous - objective <= params.tol * std::max(1.0, previous))) break;
        previous = objective;
    }
    return run;
}

// Single-point transfers after Lloyd converges (Hartigan's rule): a point moves to
// the cluster giving the largest strict drop of the squared-Euclidean objective,
// with means updated incrementally. Each sweep that moves something appends one
// trace entry. Stops at a partition no single transfer can improve.
inline void transfer_refine(const PointSet& points, LloydRun& run, std::size_t k, std::size_t max_sweeps) {
    const std::size_t n = points.size(), dim = points.dim();
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : run.labels) ++sizes[l];
    PointSet& mu = run.centroids;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = run.labels[i];
            if (sizes[a] <= 1) continue;
            const double na = static_cast<double>(sizes[a]);
            const double removal = na / (na - 1.0) * squared_euclidean(points[i], mu[a]);
            std::size_t target = a;
            double gain = 0.0;
            for (std::size_t b = 0; b < k; ++b) {
                if (b == a) continue;
                const double nb = static_cast<double>(sizes[b]);
                const double delta = nb / (nb + 1.0) * squared_euclidean(points[i], mu[b]) - removal;
                if (delta < gain - 1e-12 * std::max(1.0, removal)) gain = delta, target = b;
            }
            if (target == a) continue;
            const double nb = static_cast<double>(sizes[target]);
            for (std::size_t j = 0; j < dim; ++j) {
                mu[a][j] = (mu[a][j] * na - points[i][j]) / (na - 1.0);
                mu[target][j] = (mu[target][j] * nb + points[i][j]) / (nb + 1.0);
            }
            --sizes[a];
            ++sizes[target];
            run.labels[i] = static_cast<std::uint32_t>(target);
            moved = true;
        }
        if (!moved) break;
        run.centroids = cluster_means(points, run.labels, k);
        run.trace.push_back(eval_sq_euclid_objective(points, run.labels, run.centroids));
    }
}

}  // namespace detail

/// Lloyd k-means with k-means++ starts and single-point transfer refinement; keeps the restart with the lowest
/// squared-Euclidean objective and reports the squared-L-infinity objective for it.
inline ClusterResult kmeans(const PointSet& points, const KMeansParams& params) {
    if (params.k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
    if (!(params.tol > 0.0)) throw std::invalid_argument("kmeans: tol must be > 0");
    if (params.restarts == 0 || params.max_iters == 0)
        throw std::invalid_argument("kmeans: restarts and max_iters must be >= 1");
    if (points.size() < params.k)
        throw std::invalid_argument("kmeans: " + std::to_string(points.size()) + " points for k=" +
                                    std::to_string(params.k));
    const std::size_t k = params.k;

    if (k == 1) {
        ClusterResult r;
        r.labels.assign(points.size(), 0);
        r.centroids = detail::cluster_means(points, r.labels, 1);
        r.objective_sq_euclid = eval_sq_euclid_objective(points, r.labels, r.centroids);
        r.objective_sq_linf = eval_linf_objective(points, r.labels, r.centroids);
        r.trace = {r.objective_sq_euclid};
        r.seed = params.seed;
        return r;
    }

    ClusterResult best;
    bool have = false;
    for (std::size_t restart = 0; restart < params.restarts; ++restart) {
        Engine rng = make_engine(derive_seed(params.seed, restart));
        detail::LloydRun run = detail::lloyd(points, detail::kmeans_plus_plus(points, k, rng), params);
        detail::transfer_refine(points, run, k, params.max_iters);
        if (params.min_cluster_size > 0) {
            detail::enforce_min_size(points, run.labels, run.centroids, k, params.min_cluster_size);
            run.centroids = detail::cluster_means(points, run.labels, k);
        }
        const double objective = eval_sq_euclid_objective(points, run.labels, run.centroids);
        if (!have || objective < best.objective_sq_euclid) {
            have = true;
            best.labels = std::move(run.labels);
            best.centroids = std::move(run.centroids);
            best.objective_sq_euclid = objective;
            best.iterations = run.iterations;
            best.restart_index = restart;
            best.trace = std::move(run.trace);
        }
    }
    best.objective_sq_linf = eval_linf_objective(points, best.labels, best.centroids);
    best.seed = params.seed;
    return best;
}

// ---------------------------------------------------------------------------
// Linkage parameters
// ---------------------------------------------------------------------------

struct Threshold {
    double b = 0.0;
};
struct CutToK {
    std::size_t k = 2;
};

struct LinkageParams {
    std::variant<Threshold, CutToK> mode = CutToK{2};
    Metric metric = Metric::Linf;
    std::size_t min_cluster_size = 0;
};

enum class Linkage { Single, Ward };

/// (log n)^(beta/2) / sqrt(n).
inline double theoretical_threshold(double n, double beta = 1.5) {
    if (!(n > 1.0)) throw std::invalid_argument("threshold: n must be > 1");
    return std::pow(std::log(n), beta / 2.0) / std::sqrt(n);
}

// ---------------------------------------------------------------------------
// Nearest-seed label propagation
// ---------------------------------------------------------------------------

/// Gives every unassigned pixel the label of the Euclidean-nearest seed pixel;
/// ties go to the smallest row, then the smallest column.
inline void fill_from_nearest(LabelMap& labels, std::vector<bool>& assigned, std::span<const Pixel> seeds,
                              std::span<const std::uint32_t> seed_labels) {
    if (seeds.empty()) throw std::invalid_argument("nearest fill: no seed pixels");
    std::vector<std::size_t> order(seeds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return seeds[a] < seeds[b]; });
    const long rows = static_cast<long>(labels.rows()), cols = static_cast<long>(labels.cols());
    parallel_for(0, static_cast<std::size_t>(rows), [&](std::size_t r) {
        for (long c = 0; c < cols; ++c) {
            const std::size_t idx = r * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
            if (assigned[idx]) continue;
            long best = std::numeric_limits<long>::max();
            std::size_t arg = order[0];
            for (std::size_t j : order) {
                const long dr = seeds[j].row - static_cast<long>(r), dc = seeds[j].col - c;
                const long d = dr * dr + dc * dc;
                if (d < best) best = d, arg = j;
            }
            labels[idx] = seed_labels[arg];
        }
    });
    std::fill(assigned.begin(), assigned.end(), true);
}

// ---------------------------------------------------------------------------
// Threshold single-linkage on the subsample grid
// ---------------------------------------------------------------------------

/// Grid points joined when their feature distance is below b; components are
/// numbered by their lexicographically smallest grid point. Each component label
/// fills its grid points' patches, and the remaining pixels take the label of the
/// nearest grid point.
inline LabelMap single_linkage_threshold(const SubsampleGrid& grid, const PointSet& features,
                                         const LinkageParams& params, std::size_t rows, std::size_t cols) {
    const auto* threshold = std::get_if<Threshold>(&params.mode);
    if (!threshold) throw std::invalid_argument("single_linkage_threshold: needs Threshold mode");
    if (!(threshold->b > 0.0)) throw std::invalid_argument("single_linkage_threshold: b must be > 0");
    if (grid.points.empty()) throw std::invalid_argument("single_linkage_threshold: empty grid");
    if (features.size() != grid.points.size())
        throw std::invalid_argument("single_linkage_threshold: features not aligned with grid points");
    const std::size_t g = grid.points.size();

    UnionFind uf(g);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = a + 1; b < g; ++b)
            if (distance(params.metric, features[a], features[b]) < threshold->b) uf.unite(a, b);

    std::vector<std::size_t> order(g);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return grid.points[a] < grid.points[b]; });
    std::vector<std::uint32_t> root_label(g, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::uint32_t> point_label(g);
    std::uint32_t next = 0;
    for (std::size_t i : order) {
        const std::size_t root = uf.find(i);
        if (root_label[root] == std::numeric_limits<std::uint32_t>::max()) root_label[root] = next++;
        point_label[i] = root_label[root];
    }

    LabelMap labels(rows, cols, 0);
    std::vector<bool> assigned(rows * cols, false);
    const long m = grid.half_width;
    for (std::size_t i = 0; i < g; ++i) {
        const Pixel u = grid.points[i];
        for (long r = std::max(0L, u.row - m); r <= std::min(static_cast<long>(rows) - 1, u.row + m); ++r)
            for (long c = std::max(0L, u.col - m); c <= std::min(static_cast<long>(cols) - 1, u.col + m); ++c) {
                labels(r, c) = point_label[i];
                assigned[r * cols + c] = true;
            }
    }
    fill_from_nearest(labels, assigned, grid.points, point_label);
    return labels;
}

// ---------------------------------------------------------------------------
// Agglomerative trees
// ---------------------------------------------------------------------------

/// Merge i creates node n + i from nodes a < b; leaves are nodes 0..n-1.
struct Merge {
    std::size_t a = 0;
    std::size_t b = 0;
    double height = 0.0;
    std::size_t size = 0;
};

using Dendrogram = std::vector<Merge>;

namespace detail {

// Turns merges expressed by member points (any order of equal heights kept)
// into node-id form, sorted by height.
inline Dendrogram relabel_merges(std::size_t n, std::vector<std::tuple<double, std::size_t, std::size_t>> raw) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    UnionFind uf(n);
    std::vector<std::size_t> node(n), size(n, 1);
    std::iota(node.begin(), node.end(), 0);
    Dendrogram out;
    out.reserve(raw.size());
    for (const auto& [h, p, q] : raw) {
        const std::size_t rp = uf.find(p), rq = uf.find(q);
        const std::size_t na = node[rp], nb = node[rq], total = size[rp] + size[rq];
        uf.unite(rp, rq);
        const std::size_t root = uf.find(rp);
        node[root] = n + out.size();
        size[root] = total;
        out.push_back({std::min(na, nb), std::max(na, nb), h, total});
    }
    return out;
}

}  // namespace detail

/// Single linkage via a Prim minimum spanning tree.
inline Dendrogram single_linkage_tree(const PointSet& points, Metric metric) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("single linkage: no points");
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double d = distance(metric, points[current], points[j]);
            if (d < best[j]) best[j] = d, from[j] = current;
            if (next == n || best[j] < best[next]) next = j;
        }
        in_tree[next] = true;
        edges.emplace_back(best[next], from[next], next);
        current = next;
    }
    return detail::relabel_merges(n, std::move(edges));
}

/// Ward linkage (nearest-neighbour chain with Lance-Williams updates on squared
/// Euclidean distances); heights are Euclidean merge distances.
inline Dendrogram ward_tree(const PointSet& points) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("ward linkage: no points");
    std::vector<double> d2(n * n, 0.0);
    parallel_for(0, n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) d2[i * n + j] = squared_euclidean(points[i], points[j]);
    });
    std::vector<bool> active(n, true);
    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> chain;
    std::vector<std::tuple<double, std::size_t, std::size_t>> raw;
    while (raw.size() + 1 < n) {
        if (chain.empty())
            chain.push_back(static_cast<std::size_t>(std::find(active.begin(), active.end(), true) - active.begin()));
        std::size_t a = 0, b = 0;
        while (true) {
            a = chain.back();
            std::size_t nearest = n;
            double nd = std::numeric_limits<double>::infinity();
            if (chain.size() >= 2) nearest = chain[chain.size() - 2], nd = d2[a * n + nearest];
            for (std::size_t j = 0; j < n; ++j) {
                if (!active[j] || j == a) continue;
                if (d2[a * n + j] < nd) nd = d2[a * n + j], nearest = j;
            }
            b = nearest;
            if (chain.size() >= 2 && b == chain[chain.size() - 2]) break;
            chain.push_back(b);
        }
        chain.pop_back();
        chain.pop_back();
        raw.emplace_back(std::sqrt(d2[a * n + b]), std::min(a, b), std::max(a, b));
        const std::size_t keep = std::min(a, b), drop = std::max(a, b);
        const double na = static_cast<double>(size[keep]), nb = static_cast<double>(size[drop]);
        const double dab = d2[a * n + b];
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == keep || j == drop) continue;
            const double nj = static_cast<double>(size[j]);
            const double v = ((na + nj) * d2[keep * n + j] + (nb + nj) * d2[drop * n + j] - nj * dab) / (na + nb + nj);
            d2[keep * n + j] = d2[j * n + keep] = v;
        }
        active[drop] = false;
        size[keep] += size[drop];
    }
    return detail::relabel_merges(n, std::move(raw));
}

/// Leaves under each dendrogram node, computed on demand.
inline std::vector<std::size_t> leaves_of(const Dendrogram& tree, std::size_t n, std::size_t node) {
    std::vector<std::size_t> out, stack{node};
    while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        if (x < n) {
            out.push_back(x);
        } else {
            stack.push_back(tree[x - n].a);
            stack.push_back(tree[x - n].b);
        }
    }
    return out;
}

/// Size-constrained cut into at most k clusters. Starting from the root, the most
/// recent merge among the active clusters is undone; children smaller than
/// min_size are set aside, and a node whose children are both small stays whole.
/// Set-aside points take the label of their nearest clustered point under `metric`.
/// Clusters are numbered by their smallest point index. With min_size <= 1 this is
/// the ordinary cut at k clusters.
inline std::vector<std::uint32_t> cut_tree(const Dendrogram& tree, const PointSet& points, std::size_t k,
                                           std::size_t min_size, Metric metric) {
    const std::size_t n = points.size();
    if (tree.size() + 1 != n) throw std::invalid_argument("cut: dendrogram does not match point count");
    if (k == 0) throw std::invalid_argument("cut: k must be >= 1");
    const auto node_size = [&](std::size_t x) { return x < n ? std::size_t{1} : tree[x - n].size; };
    std::vector<std::size_t> active{2 * n - 2};
    std::vector<bool> terminal(2 * n - 1, false);
    while (active.size() < k) {
        std::size_t pick = 0;
        bool found = false;
        for (std::size_t x : active)
            if (x >= n && !terminal[x] && (!found || x > pick)) pick = x, found = true;
        if (!found) break;
        const Merge& mg = tree[pick - n];
        std::vector<std::size_t> kept;
        for (std::size_t child : {mg.a, mg.b})
            if (node_size(child) >= min_size) kept.push_back(child);
        if (kept.empty()) {
            terminal[pick] = true;
            continue;
        }
        active.erase(std::find(active.begin(), active.end(), pick));
        active.insert(active.end(), kept.begin(), kept.end());
    }

    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> clusters;
    for (std::size_t x : active) {
        auto members = leaves_of(tree, n, x);
        const std::size_t first = *std::min_element(members.begin(), members.end());
        clusters.emplace_back(first, std::move(members));
    }
    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> labels(n, unset);
    for (std::size_t j = 0; j < clusters.size(); ++j)
        for (std::size_t p : clusters[j].second) labels[p] = static_cast<std::uint32_t>(j);

    std::vector<std::size_t> clustered;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] != unset) clustered.push_back(i);
    std::vector<std::uint32_t> resolved = labels;
    parallel_for(0, n, [&](std::size_t i) {
        if (labels[i] != unset) return;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j : clustered) {
            const double d = distance(metric, points[i], points[j]);
            if (d < best) best = d, resolved[i] = labels[j];
        }
    });
    return resolved;
}

/// Agglomerative clustering cut to k clusters (CutToK mode). Single linkage uses
/// params.metric; ward always uses squared Euclidean merge costs.
inline std::vector<std::uint32_t> agglomerative(const PointSet& points, const LinkageParams& params,
                                                Linkage linkage) {
    const auto* cut = std::get_if<CutToK>(&params.mode);
    if (!cut) throw std::invalid_argument("agglomerative: needs CutToK mode");
    if (cut->k == 0) throw std::invalid_argument("agglomerative: k must be >= 1");
    if (points.size() < cut->k)
        throw std::invalid_argument("agglomerative: " + std::to_string(points.size()) + " points for k=" +
                                    std::to_string(cut->k));
    const Dendrogram tree = linkage == Linkage::Single ? single_linkage_tree(points, params.metric) : ward_tree(points);
    const Metric assign_metric = linkage == Linkage::Single ? params.metric : Metric::L2;
    return cut_tree(tree, points, cut->k, params.min_cluster_size, assign_metric);
}

}  // namespace texseg
