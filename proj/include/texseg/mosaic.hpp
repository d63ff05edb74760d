#pragma once

// Multi-texture mosaics with ground-truth label masks.

#include <cmath>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "texseg/grid.hpp"
#include "texseg/io.hpp"
#include "texseg/random.hpp"
#include "texseg/synth.hpp"

namespace texseg {

namespace geometry {
/// Left half label 0, right half label 1 (split at cols/2).
struct VSplit {};
/// Top half label 0, bottom half label 1 (split at rows/2).
struct HSplit {};
/// Label 1 strictly inside the circle; defaults: image center, radius min(rows, cols)/4.
struct Disk {
    std::optional<double> center_row;
    std::optional<double> center_col;
    std::optional<double> radius;
};
/// Labels 0..3 row-major by half.
struct Quadrants {};
/// Labels read verbatim from a PGM mask.
struct MaskFile {
    std::filesystem::path path;
};
}  // namespace geometry

using RegionGeometry =
    std::variant<geometry::VSplit, geometry::HSplit, geometry::Disk, geometry::Quadrants, geometry::MaskFile>;

inline std::size_t region_count(const RegionGeometry& geom) {
    if (std::holds_alternative<geometry::Quadrants>(geom)) return 4;
    if (const auto* mask = std::get_if<geometry::MaskFile>(&geom)) return label_count(read_label_pgm(mask->path));
    return 2;
}

inline LabelMap region_mask(const RegionGeometry& geom, std::size_t rows, std::size_t cols) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("region mask: rows and cols must be >= 2");
    LabelMap mask(rows, cols, 0);
    if (std::holds_alternative<geometry::VSplit>(geom)) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = cols / 2; c < cols; ++c) mask(r, c) = 1;
    } else if (std::holds_alternative<geometry::HSplit>(geom)) {
        for (std::size_t r = rows / 2; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) mask(r, c) = 1;
    } else if (const auto* disk = std::get_if<geometry::Disk>(&geom)) {
        const double cr = disk->center_row.value_or((static_cast<double>(rows) - 1.0) / 2.0);
        const double cc = disk->center_col.value_or((static_cast<double>(cols) - 1.0) / 2.0);
        const double radius = disk->radius.value_or(static_cast<double>(std::min(rows, cols)) / 4.0);
        if (!(radius > 0.0)) throw std::invalid_argument("region mask: disk radius must be > 0");
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (std::hypot(static_cast<double>(r) - cr, static_cast<double>(c) - cc) < radius) mask(r, c) = 1;
    } else if (std::holds_alternative<geometry::Quadrants>(geom)) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                mask(r, c) = static_cast<std::uint32_t>((r >= rows / 2 ? 2 : 0) + (c >= cols / 2 ? 1 : 0));
    } else {
        const auto& file = std::get<geometry::MaskFile>(geom);
        LabelMap loaded = read_label_pgm(file.path);
        if (loaded.rows() != rows || loaded.cols() != cols)
            throw std::invalid_argument("region mask: mask file is " + shape_string(loaded.rows(), loaded.cols()) +
                                        ", expected " + shape_string(rows, cols));
        mask = std::move(loaded);
    }
    return mask;
}

/// Sample mean 0, sample variance 1 (denominator N - 1).
inline Field standardize_texture(const Field& field) {
    if (field.size() < 2) throw std::invalid_argument("standardize: need at least two pixels");
    double mean = 0.0;
    for (double v : field.values()) mean += v;
    mean /= static_cast<double>(field.size());
    double ss = 0.0;
    for (double v : field.values()) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(field.size() - 1);
    if (!(var > 0.0)) throw std::invalid_argument("standardize: zero variance (constant texture)");
    const double inv_sd = 1.0 / std::sqrt(var);
    Field out(field.rows(), field.cols());
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = (field[i] - mean) * inv_sd;
    return out;
}

/// Reads an 8-bit PGM (P2/P5, scaled by 1/255) or a TEXF field.
inline Field load_grayscale_image(const std::filesystem::path& path) {
    const std::string bytes = detail::read_file(path);
    if (bytes.compare(0, 4, "TEXF") == 0) return decode_texf(bytes);
    return pgm_to_field(decode_pgm(bytes));
}

// ---------------------------------------------------------------------------
// Texture sources
// ---------------------------------------------------------------------------

namespace source {
struct MovingAverage {
    MAModel model;
};
/// Stationary kernel-convolution texture with constant kernel size (dense sampler, <= 64x64).
struct Kernel {
    Mat2 size = Mat2::identity();
    double coord_scale = 1.0;
};
struct ImageFile {
    std::filesystem::path path;
};
/// Pre-built field, used as-is.
struct Preloaded {
    Field field;
};
}  // namespace source

using TextureSource = std::variant<source::MovingAverage, source::Kernel, source::ImageFile, source::Preloaded>;

/// Full-size texture for one source; images are cropped at the top-left.
inline Field realize_texture(const TextureSource& src, std::size_t rows, std::size_t cols, Seed seed) {
    if (const auto* ma = std::get_if<source::MovingAverage>(&src)) return sample_ma_field(ma->model, rows, cols, seed);
    if (const auto* k = std::get_if<source::Kernel>(&src)) {
        KernelSizeField sizes(rows, cols, k->size);
        return GaussianFieldSampler(sizes, k->coord_scale).sample(seed);
    }
    const Field full = std::holds_alternative<source::ImageFile>(src)
                           ? load_grayscale_image(std::get<source::ImageFile>(src).path)
                           : std::get<source::Preloaded>(src).field;
    if (full.rows() < rows || full.cols() < cols)
        throw std::invalid_argument("mosaic: texture source is " + shape_string(full.rows(), full.cols()) +
                                    ", smaller than the " + shape_string(rows, cols) + " mosaic");
    if (full.rows() == rows && full.cols() == cols) return full;
    Field crop(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) crop(r, c) = full(r, c);
    return crop;
}

struct Mosaic {
    Field image;
    LabelMap truth;
};

/// Region j's pixels come from sources[j] at the same coordinates. Each texture is
/// realized at full mosaic size (seed stream j) and standardized before masking.
inline Mosaic compose_mosaic(const std::vector<TextureSource>& sources, const RegionGeometry& geom,
                             std::size_t rows, std::size_t cols, Seed seed, bool standardize = true) {
    LabelMap truth = region_mask(geom, rows, cols);
    const std::uint32_t regions = label_count(truth);
    if (sources.size() != regions)
        throw std::invalid_argument("mosaic: geometry has " + std::to_string(regions) + " regions but " +
                                    std::to_string(sources.size()) + " sources were given");
    Field image(rows, cols);
    for (std::size_t j = 0; j < sources.size(); ++j) {
        Field tex = realize_texture(sources[j], rows, cols, derive_seed(seed, j));
        if (standardize) tex = standardize_texture(tex);
        for (std::size_t i = 0; i < image.size(); ++i)
            if (truth[i] == j) image[i] = tex[i];
    }
    return {std::move(image), std::move(truth)};
}

}  // namespace texseg
