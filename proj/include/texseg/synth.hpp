#pragma once

// Synthetic Gaussian textures: moving-average stationary fields and the
// kernel-convolution non-stationary field, with their analytic covariances.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "texseg/grid.hpp"
#include "texseg/parallel.hpp"
#include "texseg/random.hpp"

namespace texseg {

// ---------------------------------------------------------------------------
// Stationary moving-average models
// ---------------------------------------------------------------------------

/// Stencil direction of the moving average. Offsets are (row, col).
enum class MAVariant {
    Diagonal,      ///< model 1: Z_{t+(i,i)}
    AntiDiagonal,  ///< model 2: Z_{t+(-i,i)}
    AlongRow,      ///< model 3: Z_{t+(0,i)}
    AlongColumn,   ///< model 4: Z_{t+(i,0)}
};

struct MAModel {
    MAVariant variant = MAVariant::Diagonal;
    int half_width = 1;
    bool standardized = true;

    friend bool operator==(const MAModel&, const MAModel&) = default;
};

/// Model number 1..4 as used in the experiment tables.
inline int model_number(MAVariant v) { return static_cast<int>(v) + 1; }

inline MAVariant variant_from_number(int number) {
    if (number < 1 || number > 4)
        throw std::invalid_argument("moving-average model number must be 1..4");
    return static_cast<MAVariant>(number - 1);
}

inline void validate(const MAModel& model) {
    if (model.half_width < 1) throw std::invalid_argument("moving-average half_width must be >= 1");
}

inline std::array<long, 2> stencil_offset(MAVariant v, long i) {
    switch (v) {
        case MAVariant::Diagonal: return {i, i};
        case MAVariant::AntiDiagonal: return {-i, i};
        case MAVariant::AlongRow: return {0, i};
        case MAVariant::AlongColumn: return {i, 0};
    }
    return {0, 0};
}

/// I.i.d. N(0,1) grid, deterministic in the seed.
inline Field sample_white_noise(std::size_t rows, std::size_t cols, Seed seed) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("white noise: empty shape");
    Engine engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Field out(rows, cols);
    for (auto& v : out.values()) v = normal(engine);
    return out;
}

/// Applies the model stencil to a noise grid padded by `half_width` on every side.
/// The output has shape (noise.rows - 2h) x (noise.cols - 2h).
inline Field apply_ma_stencil(const Field& padded_noise, const MAModel& model) {
    validate(model);
    const long h = model.half_width;
    if (padded_noise.rows() <= static_cast<std::size_t>(2 * h) ||
        padded_noise.cols() <= static_cast<std::size_t>(2 * h))
        throw std::invalid_argument("moving-average: noise grid smaller than the stencil padding");
    const std::size_t rows = padded_noise.rows() - 2 * h;
    const std::size_t cols = padded_noise.cols() - 2 * h;
    const double norm = model.standardized ? 1.0 / std::sqrt(2.0 * h + 1.0) : 1.0;
    Field out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (long i = -h; i <= h; ++i) {
                auto [dr, dc] = stencil_offset(model.variant, i);
                sum += padded_noise(r + h + dr, c + h + dc);
            }
            out(r, c) = sum * norm;
        }
    }
    return out;
}

inline Field sample_ma_field(const MAModel& model, std::size_t rows, std::size_t cols, Seed seed) {
    validate(model);
    if (rows == 0 || cols == 0) throw std::invalid_argument("moving-average: empty shape");
    const std::size_t pad = 2 * static_cast<std::size_t>(model.half_width);
    return apply_ma_stencil(sample_white_noise(rows + pad, cols + pad, seed), model);
}

/// Exact lag covariance E[X_t X_{t+lag}] of the moving-average model.
inline double ma_true_autocov(const MAModel& model, long lag_row, long lag_col) {
    validate(model);
    const long width = 2L * model.half_width + 1;
    long shift = 0;
    bool on_stencil_line = false;
    switch (model.variant) {
        case MAVariant::Diagonal:
            on_stencil_line = lag_row == lag_col;
            shift = lag_row;
            break;
        case MAVariant::AntiDiagonal:
            on_stencil_line = lag_row == -lag_col;
            shift = lag_col;
            break;
        case MAVariant::AlongRow:
            on_stencil_line = lag_row == 0;
            shift = lag_col;
            break;
        case MAVariant::AlongColumn:
            on_stencil_line = lag_col == 0;
            shift = lag_row;
            break;
    }
    if (!on_stencil_line || std::labs(shift) >= width) return 0.0;
    const double overlap = static_cast<double>(width - std::labs(shift));
    return model.standardized ? overlap / static_cast<double>(width) : overlap;
}

// ---------------------------------------------------------------------------
// Kernel-convolution non-stationary model
// ---------------------------------------------------------------------------

/// 2x2 matrix [[a, b], [c, d]]; the per-pixel kernel size.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const noexcept { return a * d - b * c; }
    Mat2 operator+(const Mat2& o) const noexcept { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator*(double s) const noexcept { return {a * s, b * s, c * s, d * s}; }
    bool symmetric(double tol = 1e-12) const noexcept { return std::abs(b - c) <= tol; }
    bool positive_definite() const noexcept { return symmetric() && a > 0.0 && det() > 0.0; }

    static Mat2 identity() noexcept { return {}; }
    static Mat2 isotropic(double variance) noexcept { return {variance, 0.0, 0.0, variance}; }
    static Mat2 diagonal(double x, double y) noexcept { return {x, 0.0, 0.0, y}; }

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

using KernelSizeField = Grid<Mat2>;

inline void validate(const KernelSizeField& sizes) {
    if (sizes.empty()) throw std::invalid_argument("kernel sizes: empty field");
    for (const auto& s : sizes.values())
        if (!s.positive_definite())
            throw std::invalid_argument("kernel sizes: every entry must be symmetric positive definite");
}

/// Default coordinate scale: pixel index i maps to i/n.
inline double default_coord_scale(std::size_t n) { return 1.0 / static_cast<double>(n); }

/// Closed-form covariance of the kernel-convolution field between pixels t and s:
/// (2 pi)^-1 |S|^-1/2 exp(-1/2 d' S^-1 d), S = sigma_t + sigma_s, d = scale (t - s).
inline double kernel_covariance(const Mat2& sigma_t, const Mat2& sigma_s, Pixel t, Pixel s,
                                double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("kernel covariance: scale must be > 0");
    const Mat2 sum = sigma_t + sigma_s;
    const double det = sum.det();
    if (!(det > 0.0) || !(sum.a > 0.0))
        throw std::invalid_argument("kernel covariance: sigma_t + sigma_s is not positive definite");
    const double dx = scale * static_cast<double>(t.row - s.row);
    const double dy = scale * static_cast<double>(t.col - s.col);
    // d' S^-1 d with S^-1 = [[d, -b], [-c, a]] / det
    const double quad = (sum.d * dx * dx - (sum.b + sum.c) * dx * dy + sum.a * dy * dy) / det;
    return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
}

/// Dense Gram matrix over all pixel pairs, pixels in row-major order.
inline Eigen::MatrixXd assemble_kernel_gram(const KernelSizeField& sizes, double scale) {
    validate(sizes);
    const std::size_t n = sizes.size();
    const std::size_t cols = sizes.cols();
    Eigen::MatrixXd gram(n, n);
    parallel_for(0, n, [&](std::size_t i) {
        const Pixel pi{static_cast<long>(i / cols), static_cast<long>(i % cols)};
        for (std::size_t j = 0; j <= i; ++j) {
            const Pixel pj{static_cast<long>(j / cols), static_cast<long>(j % cols)};
            gram(i, j) = kernel_covariance(sizes[i], sizes[j], pi, pj, scale);
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) gram(i, j) = gram(j, i);
    return gram;
}

/// Exact sampler for the kernel-convolution field: symmetric square root of the
/// jittered Gram matrix, computed once and reused across draws.
/// Dense O(N^3) in the pixel count N; meant for fields up to 64x64.
class GaussianFieldSampler {
public:
    static constexpr int kMaxJitterRetries = 3;

    GaussianFieldSampler(const KernelSizeField& sizes, double scale, double jitter = 1e-10)
        : rows_(sizes.rows()), cols_(sizes.cols()) {
        if (jitter < 0.0) throw std::invalid_argument("sampler: jitter must be >= 0");
        const Eigen::MatrixXd gram = assemble_kernel_gram(sizes, scale);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("sampler: eigendecomposition did not converge");
        const Eigen::VectorXd& eig = solver.eigenvalues();
        min_eigenvalue_ = eig.minCoeff();

        jitter_ = jitter;
        int retry = 0;
        while (min_eigenvalue_ + jitter_ < 0.0) {
            if (retry == kMaxJitterRetries) {
                std::ostringstream msg;
                msg << "sampler: Gram matrix not positive semidefinite after jitter " << jitter_
                    << " (minimum eigenvalue estimate " << min_eigenvalue_ << ")";
                throw std::runtime_error(msg.str());
            }
            jitter_ *= 10.0;
            ++retry;
        }
        const Eigen::VectorXd root = (eig.array() + jitter_).max(0.0).sqrt();
        transform_ = solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
    }

    Field sample(Seed seed) const {
        const Field z = sample_white_noise(rows_ * cols_, 1, seed);
        const Eigen::Map<const Eigen::VectorXd> zv(z.values().data(), static_cast<Eigen::Index>(z.size()));
        const Eigen::VectorXd x = transform_ * zv;
        return Field(rows_, cols_, std::vector<double>(x.data(), x.data() + x.size()));
    }

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }
    double jitter() const noexcept { return jitter_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    double min_eigenvalue_ = 0.0;
    double jitter_ = 0.0;
    Eigen::MatrixXd transform_;
};

/// One-shot draw; prefer GaussianFieldSampler when drawing repeatedly.
inline Field sample_nonstationary_field(const KernelSizeField& sizes, Seed seed, double jitter,
                                        double scale) {
    return GaussianFieldSampler(sizes, scale, jitter).sample(seed);
}

inline Field sample_nonstationary_field(const KernelSizeField& sizes, Seed seed, double jitter = 1e-10) {
    return sample_nonstationary_field(sizes, seed, jitter, default_coord_scale(sizes.rows()));
}

/// Max absolute difference of the four kernel-size entries.
inline double kernel_size_metric(const KernelSizeField& sizes, Pixel s, Pixel t) {
    const Mat2& x = sizes.at(s);
    const Mat2& y = sizes.at(t);
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c), std::abs(x.d - y.d)});
}

/// Euclidean distance of coordinates normalized by n.
inline double pixel_distance(Pixel s, Pixel t, std::size_t n) {
    const double dn = static_cast<double>(n);
    const double dr = static_cast<double>(s.row - t.row) / dn;
    const double dc = static_cast<double>(s.col - t.col) / dn;
    return std::sqrt(dr * dr + dc * dc);
}

/// True feature C_t(lag) of the kernel model: mean covariance over pixel pairs
/// (s, s+lag) with both ends in the patch of half-width m around t and inside the image.
inline double kernel_true_autocov(const KernelSizeField& sizes, Pixel t, long lag_row, long lag_col,
                                  int m, double scale) {
    const long r0 = std::max(0L, t.row - m), r1 = std::min<long>(sizes.rows() - 1, t.row + m);
    const long c0 = std::max(0L, t.col - m), c1 = std::min<long>(sizes.cols() - 1, t.col + m);
    double sum = 0.0;
    long count = 0;
    for (long r = r0; r <= r1; ++r) {
        for (long c = c0; c <= c1; ++c) {
            const Pixel s{r, c};
            const Pixel u{r + lag_row, c + lag_col};
            if (u.row < r0 || u.row > r1 || u.col < c0 || u.col > c1) continue;
            sum += kernel_covariance(sizes.at(s), sizes.at(u), s, u, scale);
            ++count;
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

/// C_t over the lag set {-m..m}^2 in row-major lag order.
inline std::vector<double> kernel_true_feature(const KernelSizeField& sizes, Pixel t, int m, double scale) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>((2 * m + 1) * (2 * m + 1)));
    for (long i1 = -m; i1 <= m; ++i1)
        for (long i2 = -m; i2 <= m; ++i2) out.push_back(kernel_true_autocov(sizes, t, i1, i2, m, scale));
    return out;
}

/// Analytic C over the lag set for a moving-average model (same at every interior pixel).
inline std::vector<double> ma_true_feature(const MAModel& model, int m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>((2 * m + 1) * (2 * m + 1)));
    for (long i1 = -m; i1 <= m; ++i1)
        for (long i2 = -m; i2 <= m; ++i2) out.push_back(ma_true_autocov(model, i1, i2));
    return out;
}

}  // namespace texseg
