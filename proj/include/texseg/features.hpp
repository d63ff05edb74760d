#pragma once

// Patch autocovariance features.
//
// For a pixel t with patch S_t of side 2m+1 and a lag i in M = {-m..m}^2,
//   C^_t(i) = sum_{s, s+i in S_t} X_s X_{s+i} / ((2m+1-|i1|)(2m+1-|i2|)).
// Lags are stored in row-major lag order; only the half of M with
// (i1 > 0) or (i1 == 0 and i2 >= 0) is computed and mirrored to -i.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "texseg/grid.hpp"
#include "texseg/io.hpp"
#include "texseg/parallel.hpp"
#include "texseg/points.hpp"

namespace texseg {

/// How patches are completed near the image border.
enum class Padding {
    Reflect,  ///< mirror without repeating the edge pixel: -1 -> 1
    Wrap,     ///< toroidal
    Shrink,   ///< clip the window; divisors use the clipped pair count
};

struct PatchParams {
    int half_width = 1;
    Padding padding = Padding::Reflect;
};

inline int patch_side(int half_width) { return 2 * half_width + 1; }
inline std::size_t lag_count(int half_width) {
    const auto side = static_cast<std::size_t>(patch_side(half_width));
    return side * side;
}
inline std::size_t lag_index(long i1, long i2, int m) {
    return static_cast<std::size_t>((i1 + m) * patch_side(m) + (i2 + m));
}

/// round(sqrt(n)), the default patch half-width for an n x n image.
inline int default_half_width(std::size_t n) {
    return std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)))));
}

inline void validate(const PatchParams& params, std::size_t rows, std::size_t cols) {
    if (params.half_width < 0) throw std::invalid_argument("patch half_width must be >= 0");
    if (params.padding == Padding::Wrap &&
        static_cast<std::size_t>(params.half_width) > std::min(rows, cols) / 2)
        throw std::invalid_argument("wrap padding needs half_width <= min(rows, cols)/2");
}

inline long reflect_index(long i, long n) {
    if (n == 1) return 0;
    const long period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

inline long wrap_index(long i, long n) {
    i %= n;
    return i < 0 ? i + n : i;
}

/// Pixel window around a center; for Shrink it holds only the clipped extent.
using Patch = Field;

inline Patch extract_patch(const Field& field, Pixel t, const PatchParams& params) {
    if (!field.contains(t)) throw std::out_of_range("extract_patch: pixel outside field");
    validate(params, field.rows(), field.cols());
    const long m = params.half_width;
    const long rows = static_cast<long>(field.rows()), cols = static_cast<long>(field.cols());
    if (params.padding == Padding::Shrink) {
        const long r0 = std::max(0L, t.row - m), r1 = std::min(rows - 1, t.row + m);
        const long c0 = std::max(0L, t.col - m), c1 = std::min(cols - 1, t.col + m);
        Patch p(static_cast<std::size_t>(r1 - r0 + 1), static_cast<std::size_t>(c1 - c0 + 1));
        for (long r = r0; r <= r1; ++r)
            for (long c = c0; c <= c1; ++c) p(r - r0, c - c0) = field(r, c);
        return p;
    }
    const auto resolve = params.padding == Padding::Reflect ? reflect_index : wrap_index;
    const auto side = static_cast<std::size_t>(2 * m + 1);
    Patch p(side, side);
    for (long dr = -m; dr <= m; ++dr)
        for (long dc = -m; dc <= m; ++dc)
            p(dr + m, dc + m) = field(resolve(t.row + dr, rows), resolve(t.col + dc, cols));
    return p;
}

/// Mean of X_s X_{s+lag} over all s with both ends inside the patch.
/// Zero when no such pair exists.
inline double sample_autocov(const Patch& patch, long lag_row, long lag_col) {
    const long rows = static_cast<long>(patch.rows()), cols = static_cast<long>(patch.cols());
    const long pair_rows = rows - std::labs(lag_row), pair_cols = cols - std::labs(lag_col);
    if (pair_rows <= 0 || pair_cols <= 0) return 0.0;
    const long r0 = std::max(0L, -lag_row), c0 = std::max(0L, -lag_col);
    double sum = 0.0;
    for (long r = r0; r < r0 + pair_rows; ++r)
        for (long c = c0; c < c0 + pair_cols; ++c) sum += patch(r, c) * patch(r + lag_row, c + lag_col);
    return sum / static_cast<double>(pair_rows * pair_cols);
}

inline bool is_canonical_lag(long i1, long i2) { return i1 > 0 || (i1 == 0 && i2 >= 0); }

struct FeatureVector {
    int half_width = 0;
    bool has_location = false;
    std::vector<double> values;  ///< (2m+1)^2 lags in row-major order, then optional (t1/n, t2/n)

    double at_lag(long i1, long i2) const { return values.at(lag_index(i1, i2, half_width)); }
};

/// Direct per-pixel feature: sample_autocov at every lag of M, optional location.
inline FeatureVector feature_vector(const Field& field, Pixel t, const PatchParams& params, bool with_location,
                                    double location_norm) {
    const Patch patch = extract_patch(field, t, params);
    const int m = params.half_width;
    FeatureVector fv{m, with_location, std::vector<double>(lag_count(m) + (with_location ? 2 : 0), 0.0)};
    for (long i1 = 0; i1 <= m; ++i1) {
        for (long i2 = -m; i2 <= m; ++i2) {
            if (!is_canonical_lag(i1, i2)) continue;
            const double v = sample_autocov(patch, i1, i2);
            fv.values[lag_index(i1, i2, m)] = v;
            fv.values[lag_index(-i1, -i2, m)] = v;
        }
    }
    if (with_location) {
        fv.values[lag_count(m)] = static_cast<double>(t.row) / location_norm;
        fv.values[lag_count(m) + 1] = static_cast<double>(t.col) / location_norm;
    }
    return fv;
}

inline FeatureVector feature_vector(const Field& field, Pixel t, const PatchParams& params, bool with_location) {
    return feature_vector(field, t, params, with_location, static_cast<double>(field.rows()));
}

// ---------------------------------------------------------------------------
// Subsample grid with disjoint patches
// ---------------------------------------------------------------------------

struct SubsampleGrid {
    int half_width = 0;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    std::vector<Pixel> points;  ///< row-major over the grid
};

/// Points u = ((2m+1) t1 - 1, (2m+1) t2 - 1), t in {1..floor(n/(2m+1))}, zero-based.
inline SubsampleGrid subsample_grid(std::size_t rows, std::size_t cols, int m) {
    if (m < 0) throw std::invalid_argument("subsample grid: half_width must be >= 0");
    const auto side = static_cast<std::size_t>(patch_side(m));
    if (rows < side || cols < side)
        throw std::invalid_argument("subsample grid: image smaller than one patch (empty grid)");
    SubsampleGrid g{m, rows / side, cols / side, {}};
    for (std::size_t a = 1; a <= g.grid_rows; ++a)
        for (std::size_t b = 1; b <= g.grid_cols; ++b)
            g.points.push_back({static_cast<long>(side * a - 1), static_cast<long>(side * b - 1)});
    return g;
}

inline SubsampleGrid subsample_grid(std::size_t n, int m) { return subsample_grid(n, n, m); }

// ---------------------------------------------------------------------------
// Whole-image features
// ---------------------------------------------------------------------------

struct FeatureField {
    std::size_t rows = 0;
    std::size_t cols = 0;
    PatchParams params;
    bool has_location = false;
    PointSet points;  ///< one row per pixel, row-major pixel order

    std::size_t dim() const noexcept { return points.dim(); }
    std::span<const double> at(std::size_t r, std::size_t c) const { return points[r * cols + c]; }
};

namespace detail {

// Source image for box sums plus the window rule mapping a pixel to its patch.
struct PatchSource {
    Field image;
    long offset = 0;  // padded coordinates of pixel (r, c) window start = (r, c); Shrink: clipped

    static PatchSource make(const Field& field, const PatchParams& params) {
        const long m = params.half_width;
        if (params.padding == Padding::Shrink) return {field, 0};
        const long rows = static_cast<long>(field.rows()), cols = static_cast<long>(field.cols());
        const auto resolve = params.padding == Padding::Reflect ? reflect_index : wrap_index;
        Field padded(static_cast<std::size_t>(rows + 2 * m), static_cast<std::size_t>(cols + 2 * m));
        for (long r = 0; r < rows + 2 * m; ++r)
            for (long c = 0; c < cols + 2 * m; ++c) padded(r, c) = field(resolve(r - m, rows), resolve(c - m, cols));
        return {std::move(padded), m};
    }
};

}  // namespace detail

/// Features at every pixel via one integral image per lag; agrees with
/// feature_vector up to floating-point summation order.
inline FeatureField all_features(const Field& field, const PatchParams& params, bool with_location,
                                 double location_norm) {
    validate(params, field.rows(), field.cols());
    const int m = params.half_width;
    const long rows = static_cast<long>(field.rows()), cols = static_cast<long>(field.cols());
    const std::size_t dim = lag_count(m) + (with_location ? 2 : 0);
    FeatureField out{field.rows(), field.cols(), params, with_location, PointSet(field.size(), dim)};

    const detail::PatchSource src = detail::PatchSource::make(field, params);
    const long src_rows = static_cast<long>(src.image.rows()), src_cols = static_cast<long>(src.image.cols());
    const bool shrink = params.padding == Padding::Shrink;

    std::vector<std::pair<long, long>> lags;
    for (long i1 = 0; i1 <= m; ++i1)
        for (long i2 = -m; i2 <= m; ++i2)
            if (is_canonical_lag(i1, i2)) lags.emplace_back(i1, i2);

    parallel_for(0, lags.size(), [&](std::size_t li) {
        const auto [i1, i2] = lags[li];
        // integral[(r+1)*(W+1) + (c+1)] = sum of X_s X_{s+i} over s <= (r, c)
        const long width = src_cols + 1;
        std::vector<double> integral(static_cast<std::size_t>((src_rows + 1) * width), 0.0);
        for (long r = 0; r < src_rows; ++r) {
            double row_sum = 0.0;
            for (long c = 0; c < src_cols; ++c) {
                const long r2 = r + i1, c2 = c + i2;
                if (r2 < src_rows && c2 >= 0 && c2 < src_cols) row_sum += src.image(r, c) * src.image(r2, c2);
                integral[(r + 1) * width + c + 1] = integral[r * width + c + 1] + row_sum;
            }
        }
        const auto box = [&](long r0, long r1, long c0, long c1) {
            return integral[(r1 + 1) * width + c1 + 1] - integral[r0 * width + c1 + 1] -
                   integral[(r1 + 1) * width + c0] + integral[r0 * width + c0];
        };
        const std::size_t pos = lag_index(i1, i2, m), neg = lag_index(-i1, -i2, m);
        for (long r = 0; r < rows; ++r) {
            long wr0 = r, wr1 = r + 2 * m;
            if (shrink) wr0 = std::max(0L, r - m), wr1 = std::min(rows - 1, r + m);
            for (long c = 0; c < cols; ++c) {
                long wc0 = c, wc1 = c + 2 * m;
                if (shrink) wc0 = std::max(0L, c - m), wc1 = std::min(cols - 1, c + m);
                const long pr = (wr1 - wr0 + 1) - i1, pc = (wc1 - wc0 + 1) - std::labs(i2);
                double v = 0.0;
                if (pr > 0 && pc > 0) {
                    const long sc0 = wc0 + std::max(0L, -i2);
                    v = box(wr0, wr0 + pr - 1, sc0, sc0 + pc - 1) / static_cast<double>(pr * pc);
                }
                auto row = out.points[static_cast<std::size_t>(r * cols + c)];
                row[pos] = v;
                row[neg] = v;
            }
        }
    });
    if (with_location) {
        const std::size_t base = lag_count(m);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                auto row = out.points[static_cast<std::size_t>(r * cols + c)];
                row[base] = static_cast<double>(r) / location_norm;
                row[base + 1] = static_cast<double>(c) / location_norm;
            }
    }
    return out;
}

inline FeatureField all_features(const Field& field, const PatchParams& params, bool with_location) {
    return all_features(field, params, with_location, static_cast<double>(field.rows()));
}

/// Direct features at selected pixels, one row per pixel in the given order.
inline PointSet features_at(const Field& field, std::span<const Pixel> pixels, const PatchParams& params,
                            bool with_location, double location_norm) {
    const std::size_t dim = lag_count(params.half_width) + (with_location ? 2 : 0);
    PointSet out(pixels.size(), dim);
    parallel_for(0, pixels.size(), [&](std::size_t i) {
        const FeatureVector fv = feature_vector(field, pixels[i], params, with_location, location_norm);
        std::copy(fv.values.begin(), fv.values.end(), out[i].begin());
    });
    return out;
}

inline FeatureDump to_dump(const FeatureField& ff) {
    return {ff.rows, ff.cols, ff.dim(), ff.points.data()};
}

}  // namespace texseg
