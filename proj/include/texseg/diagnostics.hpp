#pragma once

// Separation and boundary diagnostics for two-region problems.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "texseg/features.hpp"
#include "texseg/grid.hpp"
#include "texseg/synth.hpp"

namespace texseg {

enum class PatchClass : std::uint8_t { Interior0 = 0, Interior1 = 1, Boundary = 2 };

struct SeparationReport {
    double delta = 0.0;  ///< max-lag gap of the two regions' true features; NaN when unknown
    std::size_t interior0 = 0;
    std::size_t interior1 = 0;
    std::size_t boundary = 0;
    Grid<PatchClass> classes;
};

namespace detail {

// Prefix sums of label == 1 for O(1) window counts.
class OnesCounter {
public:
    explicit OnesCounter(const LabelMap& mask) : cols_(mask.cols() + 1), sums_((mask.rows() + 1) * cols_, 0) {
        for (std::size_t r = 0; r < mask.rows(); ++r)
            for (std::size_t c = 0; c < mask.cols(); ++c)
                sums_[(r + 1) * cols_ + c + 1] = sums_[r * cols_ + c + 1] + sums_[(r + 1) * cols_ + c] -
                                                 sums_[r * cols_ + c] + (mask(r, c) == 1 ? 1 : 0);
    }
    // Inclusive rectangle.
    std::size_t count(long r0, long r1, long c0, long c1) const {
        const auto at = [&](long r, long c) { return sums_[static_cast<std::size_t>(r) * cols_ + c]; };
        return at(r1 + 1, c1 + 1) - at(r0, c1 + 1) - at(r1 + 1, c0) + at(r0, c0);
    }

private:
    std::size_t cols_;
    std::vector<std::size_t> sums_;
};

inline void require_two_region(const LabelMap& mask) {
    for (auto l : mask.values())
        if (l > 1) throw std::invalid_argument("boundary sets: mask must have labels {0, 1} only");
}

}  // namespace detail

/// Classifies each pixel by whether its patch (clipped to the image) lies in
/// region 0, region 1, or meets both.
inline SeparationReport boundary_sets(const LabelMap& mask, int m) {
    if (m < 0) throw std::invalid_argument("boundary sets: m must be >= 0");
    detail::require_two_region(mask);
    const detail::OnesCounter ones(mask);
    const long rows = static_cast<long>(mask.rows()), cols = static_cast<long>(mask.cols());
    SeparationReport rep;
    rep.delta = std::nan("");
    rep.classes = Grid<PatchClass>(mask.rows(), mask.cols(), PatchClass::Boundary);
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            const long r0 = std::max(0L, r - m), r1 = std::min(rows - 1, r + m);
            const long c0 = std::max(0L, c - m), c1 = std::min(cols - 1, c + m);
            const std::size_t area = static_cast<std::size_t>((r1 - r0 + 1) * (c1 - c0 + 1));
            const std::size_t n1 = ones.count(r0, r1, c0, c1);
            PatchClass cls = PatchClass::Boundary;
            if (n1 == 0) cls = PatchClass::Interior0;
            else if (n1 == area) cls = PatchClass::Interior1;
            rep.classes(r, c) = cls;
            (cls == PatchClass::Interior0 ? rep.interior0 : cls == PatchClass::Interior1 ? rep.interior1 : rep.boundary)++;
        }
    }
    return rep;
}

/// Max over lags in {-m..m}^2 of the gap between two models' analytic autocovariances.
inline double separation_delta(const MAModel& model0, const MAModel& model1, int m) {
    const auto c0 = ma_true_feature(model0, m), c1 = ma_true_feature(model1, m);
    double delta = 0.0;
    for (std::size_t i = 0; i < c0.size(); ++i) delta = std::max(delta, std::abs(c0[i] - c1[i]));
    return delta;
}

/// Same for two stationary kernel-convolution textures with constant kernel sizes.
inline double separation_delta(const Mat2& size0, const Mat2& size1, int m, double scale) {
    double delta = 0.0;
    for (long i1 = -m; i1 <= m; ++i1)
        for (long i2 = -m; i2 <= m; ++i2) {
            const Pixel o{0, 0}, lag{i1, i2};
            delta = std::max(delta, std::abs(kernel_covariance(size0, size0, o, lag, scale) -
                                             kernel_covariance(size1, size1, o, lag, scale)));
        }
    return delta;
}

/// Pixels lying in the patch of some grid point whose patch stays inside one region.
inline std::vector<bool> covered_set(const LabelMap& mask, const SubsampleGrid& grid) {
    detail::require_two_region(mask);
    const detail::OnesCounter ones(mask);
    const long rows = static_cast<long>(mask.rows()), cols = static_cast<long>(mask.cols());
    const long m = grid.half_width;
    std::vector<bool> covered(mask.size(), false);
    for (const Pixel& u : grid.points) {
        const long r0 = std::max(0L, u.row - m), r1 = std::min(rows - 1, u.row + m);
        const long c0 = std::max(0L, u.col - m), c1 = std::min(cols - 1, u.col + m);
        const std::size_t area = static_cast<std::size_t>((r1 - r0 + 1) * (c1 - c0 + 1));
        const std::size_t n1 = ones.count(r0, r1, c0, c1);
        if (n1 != 0 && n1 != area) continue;
        for (long r = r0; r <= r1; ++r)
            for (long c = c0; c <= c1; ++c) covered[static_cast<std::size_t>(r * cols + c)] = true;
    }
    return covered;
}

}  // namespace texseg
