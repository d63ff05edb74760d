#pragma once

// Monte-Carlo harnesses for the consistency theory: concentration of the
// sample autocovariance, k-means error decay, threshold single-linkage on the
// kernel-convolution model, and Lipschitz behaviour of the true features.

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "texseg/clustering.hpp"
#include "texseg/diagnostics.hpp"
#include "texseg/features.hpp"
#include "texseg/io.hpp"
#include "texseg/matching.hpp"
#include "texseg/mosaic.hpp"
#include "texseg/parallel.hpp"
#include "texseg/pipeline.hpp"
#include "texseg/synth.hpp"

namespace texseg {

/// Replicate r of an experiment at image size n.
inline Seed replicate_seed(Seed seed, std::size_t replicate, std::size_t n) {
    return derive_seed(Seed{seed.value + replicate}, n);
}

// ---------------------------------------------------------------------------
// Concentration of the sample autocovariance at the centre pixel
// ---------------------------------------------------------------------------

struct ConcentrationRow {
    std::size_t n = 0;
    int m = 0;
    std::size_t exceed = 0;
    std::size_t replicates = 0;
    double frequency = 0.0;
};

/// Frequency of max_i |C^_t(i) - C_t(i)| > a at the centre pixel, m = round(sqrt(n)).
inline std::vector<ConcentrationRow> concentration_experiment(const MAModel& model,
                                                              const std::vector<std::size_t>& n_list, double a,
                                                              std::size_t replicates, Seed seed) {
    if (replicates == 0) throw std::invalid_argument("concentration: replicates must be >= 1");
    std::vector<ConcentrationRow> rows;
    for (std::size_t n : n_list) {
        const int m = default_half_width(n);
        if (static_cast<std::size_t>(2 * m + 1) > n) throw std::invalid_argument("concentration: n too small");
        const std::vector<double> truth = ma_true_feature(model, m);
        const Pixel centre{static_cast<long>(n / 2), static_cast<long>(n / 2)};
        std::vector<char> hit(replicates, 0);
        parallel_for(0, replicates, [&](std::size_t r) {
            const Field x = sample_ma_field(model, n, n, replicate_seed(seed, r, n));
            const FeatureVector fv = feature_vector(x, centre, {m, Padding::Reflect}, false);
            double dev = 0.0;
            for (std::size_t i = 0; i < truth.size(); ++i) dev = std::max(dev, std::abs(fv.values[i] - truth[i]));
            hit[r] = dev > a;
        });
        ConcentrationRow row{n, m, 0, replicates, 0.0};
        for (char h : hit) row.exceed += h ? 1 : 0;
        row.frequency = static_cast<double>(row.exceed) / static_cast<double>(replicates);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// k-means error decay on two-region mosaics
// ---------------------------------------------------------------------------

struct ConsistencyParams {
    std::size_t replicates = 20;
    double beta = 1.5;
    std::size_t restarts = 3;
    bool with_location = false;
};

struct ConsistencyRow {
    std::size_t n = 0;
    int m = 0;
    double delta = 0.0;
    double mean_error = 0.0;
    double min_error = 0.0;
    double max_error = 0.0;
    double envelope = std::numeric_limits<double>::quiet_NaN();  ///< (log n)^beta / (delta^2 n)
    double fitted_envelope = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    double fitted_constant = std::numeric_limits<double>::quiet_NaN();
};

/// Mean k-means error rate on VSplit mosaics of model0 | model1 for each n, with
/// the error envelope up to a constant fitted by least squares on log scale.
inline ConsistencyReport consistency_experiment(const MAModel& model0, const MAModel& model1,
                                                const std::vector<std::size_t>& n_list,
                                                const ConsistencyParams& params, Seed seed) {
    if (params.replicates == 0) throw std::invalid_argument("consistency: replicates must be >= 1");
    ConsistencyReport rep;
    for (std::size_t n : n_list) {
        const int m = default_half_width(n);
        ConsistencyRow row;
        row.n = n;
        row.m = m;
        row.delta = separation_delta(model0, model1, m);
        row.degenerate = row.delta == 0.0;
        std::vector<double> errors(params.replicates);
        for (std::size_t r = 0; r < params.replicates; ++r) {
            const Seed rs = replicate_seed(seed, r, n);
            const Mosaic mosaic = compose_mosaic({source::MovingAverage{model0}, source::MovingAverage{model1}},
                                                 geometry::VSplit{}, n, n, rs, true);
            SegmentOptions so;
            so.patch = {m, Padding::Reflect};
            so.with_location = params.with_location;
            so.k = 2;
            so.restarts = params.restarts;
            so.seed = rs;
            errors[r] = best_permutation_match(segment_kmeans(mosaic.image, so).labels, mosaic.truth, 2).error_rate;
        }
        row.min_error = *std::min_element(errors.begin(), errors.end());
        row.max_error = *std::max_element(errors.begin(), errors.end());
        for (double e : errors) row.mean_error += e / static_cast<double>(errors.size());
        if (!row.degenerate) {
            const double dn = static_cast<double>(n);
            row.envelope = std::pow(std::log(dn), params.beta) / (row.delta * row.delta * dn);
        }
        rep.rows.push_back(row);
    }
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& r : rep.rows)
        if (!r.degenerate && r.mean_error > 0.0) sum += std::log(r.mean_error) - std::log(r.envelope), ++used;
    if (used > 0) {
        rep.fitted_constant = std::exp(sum / static_cast<double>(used));
        for (auto& r : rep.rows)
            if (!r.degenerate) r.fitted_envelope = rep.fitted_constant * r.envelope;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Threshold single-linkage on the kernel-convolution model
// ---------------------------------------------------------------------------

struct Theorem2Params {
    Mat2 size0 = Mat2::identity();
    Mat2 size1 = Mat2::isotropic(9.0);
    std::size_t n = 49;
    double coord_scale = 5.0;
    std::optional<double> b;  ///< defaults to theoretical_threshold(n, beta)
    double beta = 1.5;
    std::size_t replicates = 10;
    Metric metric = Metric::Linf;
    bool with_location = true;
    bool standardize = true;
};

struct Theorem2Report {
    std::vector<double> fractions;  ///< correctly labelled share of the covered set, per replicate
    std::vector<std::size_t> components;
    double mean_fraction = 0.0;
    double min_fraction = 0.0;
    double b = 0.0;
    int m = 0;
    std::size_t covered_pixels = 0;
    bool degenerate = false;
};

/// VSplit kernel-size field: size0 left of the split, size1 right.
inline KernelSizeField vsplit_sizes(const Mat2& size0, const Mat2& size1, std::size_t n) {
    KernelSizeField sizes(n, n, size0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = n / 2; c < n; ++c) sizes(r, c) = size1;
    return sizes;
}

/// Threshold single-linkage on a two-region kernel-convolution mosaic; reports the share of the
/// covered set labelled correctly after matching components to regions.
inline Theorem2Report theorem2_experiment(const Theorem2Params& params, Seed seed) {
    if (params.replicates == 0) throw std::invalid_argument("theorem2: replicates must be >= 1");
    const std::size_t n = params.n;
    Theorem2Report rep;
    rep.m = default_half_width(n);
    rep.b = params.b.value_or(theoretical_threshold(static_cast<double>(n), params.beta));
    rep.degenerate = params.size0 == params.size1;

    const KernelSizeField sizes = vsplit_sizes(params.size0, params.size1, n);
    const LabelMap truth = region_mask(geometry::VSplit{}, n, n);
    const GaussianFieldSampler sampler(sizes, params.coord_scale);
    const SubsampleGrid grid = subsample_grid(n, rep.m);
    const std::vector<bool> covered = covered_set(truth, grid);
    for (bool c : covered) rep.covered_pixels += c ? 1 : 0;

    SegmentOptions so;
    so.patch = {rep.m, Padding::Reflect};
    so.with_location = params.with_location;
    so.metric = params.metric;
    for (std::size_t r = 0; r < params.replicates; ++r) {
        Field x = sampler.sample(replicate_seed(seed, r, n));
        if (params.standardize) x = standardize_texture(x);
        const Segmentation seg = segment_threshold(x, so, rep.b);
        rep.components.push_back(label_count(seg.labels));
        rep.fractions.push_back(best_injective_match(seg.labels.values(), truth.values(), covered).accuracy);
    }
    rep.min_fraction = *std::min_element(rep.fractions.begin(), rep.fractions.end());
    for (double f : rep.fractions) rep.mean_fraction += f / static_cast<double>(rep.fractions.size());
    return rep;
}

// ---------------------------------------------------------------------------
// Lipschitz ratio of the true features in the kernel-size metric
// ---------------------------------------------------------------------------

struct Lemma3Row {
    std::size_t n = 0;
    int m = 0;
    std::size_t pairs = 0;
    double max_ratio = 0.0;
    double min_distance = 0.0;  ///< smallest d(s, t) among sampled pairs
};

/// Sizes (1 + slope * col / n) I, varying linearly across columns.
inline KernelSizeField linear_sizes(std::size_t n, double slope) {
    KernelSizeField sizes(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            sizes(r, c) = Mat2::isotropic(1.0 + slope * static_cast<double>(c) / static_cast<double>(n));
    return sizes;
}

/// max over random pixel pairs with d(s, t) > 0 of ||C_t - C_s||_inf / d(s, t),
/// C from the closed-form covariance at coordinate scale 1/n.
inline std::vector<Lemma3Row> lemma3_experiment(const std::vector<std::size_t>& n_list, std::size_t pairs,
                                                Seed seed, double slope = 1.0) {
    std::vector<Lemma3Row> rows;
    for (std::size_t n : n_list) {
        const int m = default_half_width(n);
        const KernelSizeField sizes = linear_sizes(n, slope);
        const double scale = default_coord_scale(n);
        Engine rng = make_engine(derive_seed(seed, n));
        std::uniform_int_distribution<long> coord(0, static_cast<long>(n) - 1);
        std::vector<std::pair<Pixel, Pixel>> picked;
        while (picked.size() < pairs) {
            const Pixel s{coord(rng), coord(rng)}, t{coord(rng), coord(rng)};
            if (kernel_size_metric(sizes, s, t) > 0.0) picked.emplace_back(s, t);
        }
        std::vector<double> ratio(pairs), dist(pairs);
        parallel_for(0, pairs, [&](std::size_t i) {
            const auto& [s, t] = picked[i];
            const auto cs = kernel_true_feature(sizes, s, m, scale), ct = kernel_true_feature(sizes, t, m, scale);
            double gap = 0.0;
            for (std::size_t j = 0; j < cs.size(); ++j) gap = std::max(gap, std::abs(cs[j] - ct[j]));
            dist[i] = kernel_size_metric(sizes, s, t);
            ratio[i] = gap / dist[i];
        });
        rows.push_back({n, m, pairs, *std::max_element(ratio.begin(), ratio.end()),
                        *std::min_element(dist.begin(), dist.end())});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

inline std::string concentration_csv(const std::vector<ConcentrationRow>& rows, Seed seed) {
    std::ostringstream os;
    os << "n,m,replicates,exceed,frequency\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.m << ',' << r.replicates << ',' << r.exceed << ',' << format_exact(r.frequency) << '\n';
    os << "# seed=" << seed.value << '\n';
    return os.str();
}

inline std::string consistency_csv(const ConsistencyReport& rep, Seed seed) {
    std::ostringstream os;
    os << "n,m,delta,mean_error,min_error,max_error,envelope,fitted_envelope,degenerate\n";
    for (const auto& r : rep.rows)
        os << r.n << ',' << r.m << ',' << format_exact(r.delta) << ',' << format_exact(r.mean_error) << ','
           << format_exact(r.min_error) << ',' << format_exact(r.max_error) << ','
           << (r.degenerate ? std::string("nan") : format_exact(r.envelope)) << ','
           << (std::isnan(r.fitted_envelope) ? std::string("nan") : format_exact(r.fitted_envelope)) << ','
           << (r.degenerate ? 1 : 0) << '\n';
    os << "# seed=" << seed.value << '\n';
    return os.str();
}

inline std::string theorem2_csv(const Theorem2Report& rep, Seed seed) {
    std::ostringstream os;
    os << "replicate,components,covered_pixels,fraction,b,m,degenerate\n";
    for (std::size_t i = 0; i < rep.fractions.size(); ++i)
        os << i << ',' << rep.components[i] << ',' << rep.covered_pixels << ',' << format_exact(rep.fractions[i])
           << ',' << format_exact(rep.b) << ',' << rep.m << ',' << (rep.degenerate ? 1 : 0) << '\n';
    os << "# mean_fraction=" << format_exact(rep.mean_fraction) << '\n';
    os << "# seed=" << seed.value << '\n';
    return os.str();
}

inline std::string lemma3_csv(const std::vector<Lemma3Row>& rows, Seed seed) {
    std::ostringstream os;
    os << "n,m,pairs,max_ratio,min_distance\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.m << ',' << r.pairs << ',' << format_exact(r.max_ratio) << ','
           << format_exact(r.min_distance) << '\n';
    os << "# seed=" << seed.value << '\n';
    return os.str();
}

}  // namespace texseg
