#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "texseg/synth.hpp"

using namespace texseg;

namespace {

// Overlap count of the stencil sets {o(i)} and {lag + o(i)}, by enumeration.
double stencil_overlap(const MAModel& model, long lag_row, long lag_col) {
    std::set<std::pair<long, long>> a;
    for (long i = -model.half_width; i <= model.half_width; ++i) {
        auto [r, c] = stencil_offset(model.variant, i);
        a.insert({r, c});
    }
    double count = 0;
    for (long i = -model.half_width; i <= model.half_width; ++i) {
        auto [r, c] = stencil_offset(model.variant, i);
        if (a.count({r + lag_row, c + lag_col})) ++count;
    }
    return count;
}

MAModel model(int number, int h, bool standardized = true) { return {variant_from_number(number), h, standardized}; }

}  // namespace

TEST(WhiteNoise, MeanOfSingleDrawsOverManySeeds) {
    double sum = 0.0;
    const int n = 100000;
    for (int s = 0; s < n; ++s) sum += sample_white_noise(1, 1, Seed{static_cast<std::uint64_t>(s)})[0];
    EXPECT_LE(std::abs(sum / n), 0.02);
}

TEST(WhiteNoise, DeterministicAndSeedSensitive) {
    EXPECT_EQ(sample_white_noise(2, 3, Seed{5}), sample_white_noise(2, 3, Seed{5}));
    EXPECT_NE(sample_white_noise(3, 2, Seed{5}), sample_white_noise(3, 2, Seed{6}));
    EXPECT_THROW(sample_white_noise(0, 3, Seed{1}), std::invalid_argument);
}

TEST(MovingAverage, ConstantNoiseGivesStencilLength) {
    const MAModel m3 = model(3, 1, false);
    const Field ones(6, 7, 1.0);
    const Field out = apply_ma_stencil(ones, m3);
    ASSERT_EQ(out.rows(), 4u);
    ASSERT_EQ(out.cols(), 5u);
    for (double v : out.values()) EXPECT_DOUBLE_EQ(v, 3.0);
}

TEST(MovingAverage, StencilSumsTheRightNoiseCells) {
    // Noise with a single 1 at (r0, c0); model k puts it on its stencil line.
    for (int number = 1; number <= 4; ++number) {
        const MAModel m = model(number, 2, false);
        Field noise(11, 11, 0.0);
        noise(5, 5) = 1.0;
        const Field out = apply_ma_stencil(noise, m);
        for (long r = 0; r < 7; ++r)
            for (long c = 0; c < 7; ++c) {
                // out(r, c) sums noise(r + 2 + o(i)) for the stencil offsets o(i)
                double expect = 0.0;
                for (long i = -2; i <= 2; ++i) {
                    auto [dr, dc] = stencil_offset(m.variant, i);
                    if (r + 2 + dr == 5 && c + 2 + dc == 5) expect += 1.0;
                }
                EXPECT_EQ(out(r, c), expect) << number << " " << r << " " << c;
            }
    }
}

TEST(MovingAverage, StandardizedVarianceIsOne) {
    const MAModel m3 = model(3, 2);
    const int reps = 10000;
    double ss = 0.0, s = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double v = sample_ma_field(m3, 4, 4, Seed{static_cast<std::uint64_t>(r)})(1, 2);
        s += v;
        ss += v * v;
    }
    const double var = (ss - s * s / reps) / (reps - 1);
    EXPECT_GE(var, 0.95);
    EXPECT_LE(var, 1.05);
}

TEST(MovingAverage, ModelsDifferUnderSameSeed) {
    EXPECT_NE(sample_ma_field(model(1, 1), 16, 16, Seed{3}), sample_ma_field(model(2, 1), 16, 16, Seed{3}));
    EXPECT_EQ(sample_ma_field(model(1, 1), 16, 16, Seed{3}), sample_ma_field(model(1, 1), 16, 16, Seed{3}));
}

TEST(MovingAverage, RejectsZeroHalfWidth) {
    EXPECT_THROW(sample_ma_field(model(1, 0), 4, 4, Seed{1}), std::invalid_argument);
    EXPECT_THROW(variant_from_number(5), std::invalid_argument);
}

TEST(MovingAverageAutocov, MatchesStencilOverlapEnumeration) {
    for (int number = 1; number <= 4; ++number)
        for (int h = 1; h <= 3; ++h) {
            const MAModel m = model(number, h);
            for (long i1 = -2 * h - 1; i1 <= 2 * h + 1; ++i1)
                for (long i2 = -2 * h - 1; i2 <= 2 * h + 1; ++i2)
                    EXPECT_DOUBLE_EQ(ma_true_autocov(m, i1, i2), stencil_overlap(m, i1, i2) / (2.0 * h + 1.0))
                        << number << " h=" << h << " lag " << i1 << "," << i2;
        }
}

TEST(MovingAverageAutocov, WorkedValues) {
    EXPECT_DOUBLE_EQ(ma_true_autocov(model(3, 1), 0, 0), 1.0);
    EXPECT_DOUBLE_EQ(ma_true_autocov(model(3, 2), 0, 1), 0.8);
    EXPECT_DOUBLE_EQ(ma_true_autocov(model(1, 2), 1, 0), 0.0);
    EXPECT_DOUBLE_EQ(ma_true_autocov(model(4, 2), 1, 0), 0.8);
    EXPECT_DOUBLE_EQ(ma_true_autocov(model(2, 1), 1, -1), 2.0 / 3.0);
}

TEST(MovingAverageAutocov, MonteCarloAgreementAtSelectedLags) {
    // 10^5 small fields; lag products taken from the middle of each.
    const int reps = 100000;
    const MAModel m3 = model(3, 2), m1 = model(1, 2);
    double s3 = 0.0, s1 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const Field x3 = sample_ma_field(m3, 3, 3, Seed{static_cast<std::uint64_t>(r)});
        s3 += x3(1, 1) * x3(1, 2);
        const Field x1 = sample_ma_field(m1, 3, 3, Seed{static_cast<std::uint64_t>(r + reps)});
        s1 += x1(1, 1) * x1(2, 1);
    }
    EXPECT_NEAR(s3 / reps, 0.8, 0.02);
    EXPECT_NEAR(s1 / reps, 0.0, 0.02);
}

TEST(MovingAverageAutocov, LargeFieldEmpiricalAutocovariance) {
    for (int number = 1; number <= 4; ++number)
        for (int h = 1; h <= 2; ++h) {
            const MAModel m = model(number, h);
            const Field x = sample_ma_field(m, 256, 256, Seed{static_cast<std::uint64_t>(10 * number + h)});
            for (long i1 = -2 * h; i1 <= 2 * h; ++i1)
                for (long i2 = -2 * h; i2 <= 2 * h; ++i2) {
                    double sum = 0.0;
                    long count = 0;
                    for (long r = std::max(0L, -i1); r < 256 - std::max(0L, i1); ++r)
                        for (long c = std::max(0L, -i2); c < 256 - std::max(0L, i2); ++c) {
                            sum += x(r, c) * x(r + i1, c + i2);
                            ++count;
                        }
                    EXPECT_NEAR(sum / count, ma_true_autocov(m, i1, i2), 0.05)
                        << "model " << number << " h=" << h << " lag " << i1 << "," << i2;
                }
        }
}

TEST(KernelCovariance, IdentityAtZeroLag) {
    EXPECT_NEAR(kernel_covariance(Mat2::identity(), Mat2::identity(), {3, 4}, {3, 4}, 0.1), 1.0 / (4.0 * std::numbers::pi),
                1e-15);
    EXPECT_NEAR(kernel_covariance(Mat2::identity(), Mat2::identity(), {0, 0}, {0, 0}, 1.0), 0.0795775, 1e-7);
}

TEST(KernelCovariance, MatchesQuadratureOfKernelProduct) {
    // integral of phi(r - t; A) phi(r - s; B) dr on a fine grid
    const Mat2 A{1.2, 0.3, 0.3, 0.8}, B{0.6, -0.1, -0.1, 1.5};
    const Pixel t{1, 2}, s{2, 0};
    const double scale = 0.7;
    const auto phi = [](double x, double y, const Mat2& S) {
        const double det = S.det();
        const double q = (S.d * x * x - 2.0 * S.b * x * y + S.a * y * y) / det;
        return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
    };
    const double tx = scale * t.row, ty = scale * t.col, sx = scale * s.row, sy = scale * s.col;
    const double h = 0.02;
    double sum = 0.0;
    for (double x = -10.0; x <= 12.0; x += h)
        for (double y = -10.0; y <= 12.0; y += h) sum += phi(x - tx, y - ty, A) * phi(x - sx, y - sy, B);
    EXPECT_NEAR(sum * h * h, kernel_covariance(A, B, t, s, scale), 1e-6);
}

TEST(KernelCovariance, SymmetricAndDecaying) {
    const Mat2 A{2.0, 0.5, 0.5, 1.0}, B{1.0, 0.0, 0.0, 3.0};
    EXPECT_DOUBLE_EQ(kernel_covariance(A, B, {1, 2}, {4, -3}, 0.3), kernel_covariance(B, A, {4, -3}, {1, 2}, 0.3));
    double prev = kernel_covariance(A, B, {0, 0}, {0, 0}, 0.5);
    for (long k = 1; k < 40; ++k) {
        const double v = kernel_covariance(A, B, {0, 0}, {k, 2 * k}, 0.5);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, 1e-12);
}

TEST(KernelCovariance, RejectsInvalidInput) {
    const Mat2 bad{-1.0, 0.0, 0.0, -1.0};
    EXPECT_THROW(kernel_covariance(bad, bad, {0, 0}, {0, 0}, 1.0), std::invalid_argument);
    EXPECT_THROW(kernel_covariance(Mat2::identity(), Mat2::identity(), {0, 0}, {0, 0}, 0.0), std::invalid_argument);
}

TEST(KernelGram, MinimumEigenvalueNonNegativeOnRandomFields) {
    Engine rng(42);
    std::uniform_real_distribution<double> u(0.3, 3.0), corr(-0.9, 0.9);
    for (std::size_t n : {4u, 8u, 12u, 16u}) {
        KernelSizeField sizes(n, n);
        for (auto& s : sizes.values()) {
            const double a = u(rng), d = u(rng), b = corr(rng) * std::sqrt(a * d);
            s = {a, b, b, d};
        }
        for (double scale : {1.0 / n, 0.5, 2.0}) {
            const Eigen::MatrixXd g = assemble_kernel_gram(sizes, scale);
            const double minev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g, Eigen::EigenvaluesOnly)
                                     .eigenvalues()
                                     .minCoeff();
            EXPECT_GE(minev, -1e-8) << "n=" << n << " scale=" << scale;
        }
    }
}

TEST(KernelSampler, SinglePixelVariance) {
    const GaussianFieldSampler sampler(KernelSizeField(1, 1, Mat2::identity()), 1.0);
    const int reps = 40000;
    double ss = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double v = sampler.sample(Seed{static_cast<std::uint64_t>(r)})[0];
        ss += v * v;
    }
    const double target = 1.0 / (4.0 * std::numbers::pi);
    // standard error of the mean of squares of N(0, target): target * sqrt(2 / reps)
    EXPECT_NEAR(ss / reps, target, 4.0 * target * std::sqrt(2.0 / reps));
}

TEST(KernelSampler, EmpiricalCovarianceMatchesClosedForm) {
    const std::size_t n = 6;
    const Mat2 size = Mat2::isotropic(1.5);
    const KernelSizeField sizes(n, n, size);
    const double scale = 0.8;
    const GaussianFieldSampler sampler(sizes, scale);
    const int reps = 1000;
    const std::vector<std::pair<Pixel, Pixel>> pairs{{{2, 2}, {2, 2}}, {{2, 2}, {2, 3}}, {{1, 1}, {3, 2}}, {{0, 0}, {5, 5}}};
    std::vector<double> sums(pairs.size(), 0.0);
    for (int r = 0; r < reps; ++r) {
        const Field x = sampler.sample(Seed{static_cast<std::uint64_t>(1000 + r)});
        for (std::size_t j = 0; j < pairs.size(); ++j) sums[j] += x.at(pairs[j].first) * x.at(pairs[j].second);
    }
    const double var = kernel_covariance(size, size, {0, 0}, {0, 0}, scale);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const double c = kernel_covariance(size, size, pairs[j].first, pairs[j].second, scale);
        const double se = std::sqrt((var * var + c * c) / reps);
        EXPECT_NEAR(sums[j] / reps, c, 3.0 * se) << "pair " << j;
    }
}

TEST(KernelSampler, DeterministicAndReportsSpectrum) {
    KernelSizeField sizes(5, 5, Mat2::identity());
    sizes(2, 3) = Mat2::diagonal(2.0, 3.0);
    EXPECT_EQ(sample_nonstationary_field(sizes, Seed{9}), sample_nonstationary_field(sizes, Seed{9}));
    EXPECT_NE(sample_nonstationary_field(sizes, Seed{9}), sample_nonstationary_field(sizes, Seed{10}));
    const GaussianFieldSampler sampler(sizes, 0.2);
    EXPECT_GE(sampler.min_eigenvalue(), -1e-8);
    EXPECT_DOUBLE_EQ(sampler.jitter(), 1e-10);
    EXPECT_THROW(GaussianFieldSampler(sizes, 0.2, -1.0), std::invalid_argument);
    KernelSizeField bad(2, 2, Mat2{1.0, 2.0, 2.0, 1.0});
    EXPECT_THROW(GaussianFieldSampler(bad, 1.0), std::invalid_argument);
}

TEST(KernelSizeMetric, Values) {
    KernelSizeField sizes(3, 3, Mat2::identity());
    sizes(2, 1) = Mat2::diagonal(2.0, 3.0);
    EXPECT_EQ(kernel_size_metric(sizes, {0, 0}, {0, 0}), 0.0);
    EXPECT_EQ(kernel_size_metric(sizes, {0, 0}, {2, 1}), 2.0);
    Engine rng(1);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (auto& s : sizes.values()) s = Mat2::diagonal(u(rng), u(rng));
    for (long a = 0; a < 9; ++a)
        for (long b = 0; b < 9; ++b) {
            const Pixel s{a / 3, a % 3}, t{b / 3, b % 3};
            EXPECT_EQ(kernel_size_metric(sizes, s, t), kernel_size_metric(sizes, t, s));
        }
}

TEST(PixelDistance, Values) {
    EXPECT_EQ(pixel_distance({2, 2}, {2, 2}, 10), 0.0);
    EXPECT_NEAR(pixel_distance({0, 0}, {3, 4}, 10), 0.5, 1e-15);
    EXPECT_EQ(pixel_distance({1, 7}, {4, 2}, 9), pixel_distance({4, 2}, {1, 7}, 9));
}

TEST(KernelTrueFeature, StationaryFieldMatchesClosedForm) {
    const Mat2 size = Mat2::isotropic(2.0);
    const KernelSizeField sizes(9, 9, size);
    const auto f = kernel_true_feature(sizes, {4, 4}, 2, 0.5);
    ASSERT_EQ(f.size(), 25u);
    for (long i1 = -2; i1 <= 2; ++i1)
        for (long i2 = -2; i2 <= 2; ++i2)
            EXPECT_NEAR(f[(i1 + 2) * 5 + (i2 + 2)], kernel_covariance(size, size, {0, 0}, {i1, i2}, 0.5), 1e-15);
}
