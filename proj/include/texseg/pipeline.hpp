#pragma once

// End-to-end segmentation of a field and the accuracy tables built on it.

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "texseg/clustering.hpp"
#include "texseg/features.hpp"
#include "texseg/io.hpp"
#include "texseg/matching.hpp"
#include "texseg/mosaic.hpp"

namespace texseg {

struct SegmentOptions {
    PatchParams patch{11, Padding::Reflect};
    bool with_location = true;
    std::size_t k = 2;
    std::size_t min_cluster_size = 0;
    std::size_t restarts = 5;
    std::size_t max_iters = 300;
    Seed seed{0};
    Metric metric = Metric::Linf;
    std::size_t stride = 8;  ///< pixel sampling step for the agglomerative paths
};

struct Segmentation {
    LabelMap labels;
    std::optional<ClusterResult> kmeans;  ///< set by the k-means path
    std::size_t clustered_points = 0;
};

inline double location_norm(const Field& field) { return static_cast<double>(field.rows()); }

/// Features at every pixel, then size-constrained k-means.
inline Segmentation segment_kmeans(const Field& field, const SegmentOptions& opt) {
    FeatureField ff = all_features(field, opt.patch, opt.with_location, location_norm(field));
    KMeansParams kp{opt.k, opt.restarts, opt.max_iters, opt.min_cluster_size, opt.seed, 1e-10};
    ClusterResult res = kmeans(ff.points, kp);
    Segmentation out{LabelMap(field.rows(), field.cols(), res.labels), std::move(res), ff.points.size()};
    return out;
}

/// Threshold single-linkage on the disjoint-patch grid.
inline Segmentation segment_threshold(const Field& field, const SegmentOptions& opt, double b) {
    const SubsampleGrid grid = subsample_grid(field.rows(), field.cols(), opt.patch.half_width);
    const PointSet feats = features_at(field, grid.points, opt.patch, opt.with_location, location_norm(field));
    LinkageParams lp{Threshold{b}, opt.metric, 0};
    return {single_linkage_threshold(grid, feats, lp, field.rows(), field.cols()), std::nullopt, grid.points.size()};
}

/// Pixels at offset stride/2 and step `stride` in both directions.
inline std::vector<Pixel> strided_sample(std::size_t rows, std::size_t cols, std::size_t stride) {
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    std::vector<Pixel> out;
    for (std::size_t r = stride / 2; r < rows; r += stride)
        for (std::size_t c = stride / 2; c < cols; c += stride)
            out.push_back({static_cast<long>(r), static_cast<long>(c)});
    return out;
}

/// Size-constrained single / ward linkage on a strided pixel sample; the other
/// pixels take the label of the nearest sampled pixel.
inline Segmentation segment_agglomerative(const Field& field, const SegmentOptions& opt, Linkage linkage) {
    const std::vector<Pixel> sample = strided_sample(field.rows(), field.cols(), opt.stride);
    const PointSet feats = features_at(field, sample, opt.patch, opt.with_location, location_norm(field));
    LinkageParams lp{CutToK{opt.k}, opt.metric, opt.min_cluster_size};
    const std::vector<std::uint32_t> sample_labels = agglomerative(feats, lp, linkage);
    LabelMap labels(field.rows(), field.cols(), 0);
    std::vector<bool> assigned(field.size(), false);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        labels(sample[i].row, sample[i].col) = sample_labels[i];
        assigned[sample[i].row * field.cols() + sample[i].col] = true;
    }
    fill_from_nearest(labels, assigned, sample, sample_labels);
    return {std::move(labels), std::nullopt, sample.size()};
}

// ---------------------------------------------------------------------------
// Accuracy tables
// ---------------------------------------------------------------------------

struct TableRow {
    std::string mosaic;
    double single_linkage = 0.0;
    double ward_linkage = 0.0;
    double kmeans = 0.0;
};

struct AccuracyTable {
    std::vector<TableRow> rows;
    TableRow mean;
    std::uint64_t seed = 0;
};

struct ReproduceOptions {
    int table = 1;
    std::size_t size = 0;  ///< 0: 128 for table 1, 160 otherwise
    int half_width = 11;
    int ma_half_width = 11;
    std::vector<std::uint64_t> seeds{1};
    double min_cluster_fraction = 0.1;
    std::size_t restarts = 5;
    std::size_t stride = 8;
    bool with_location = true;
    Metric single_metric = Metric::Linf;
    std::filesystem::path brodatz_dir;
};

struct MosaicSpec {
    std::string name;
    std::vector<TextureSource> sources;
    RegionGeometry geometry;
};

inline const std::array<const char*, 8>& brodatz_names() {
    static const std::array<const char*, 8> names{"D4", "D6", "D20", "D21", "D34", "D52", "D55", "D77"};
    return names;
}

namespace detail {

inline std::filesystem::path brodatz_file(const std::filesystem::path& dir, const std::string& name) {
    return dir / (name + ".pgm");
}

inline std::string missing_brodatz_message(const std::filesystem::path& dir) {
    std::string msg = "tables 2-4 need user-supplied Brodatz textures as 8-bit PGM files";
    if (!dir.empty()) msg += " in " + dir.string();
    msg += ": ";
    for (std::size_t i = 0; i < brodatz_names().size(); ++i) msg += (i ? ", " : "") + std::string(brodatz_names()[i]) + ".pgm";
    msg += " (pass --brodatz-dir)";
    return msg;
}

}  // namespace detail

/// Mosaic list for one table; image files are checked for existence.
inline std::vector<MosaicSpec> table_mosaics(const ReproduceOptions& opt) {
    std::vector<MosaicSpec> out;
    if (opt.table == 1) {
        const int pairs[6][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
        for (const auto& p : pairs) {
            const auto src = [&](int model) {
                return TextureSource{source::MovingAverage{MAModel{variant_from_number(model), opt.ma_half_width, true}}};
            };
            out.push_back({"Model " + std::to_string(p[0]) + " vs Model " + std::to_string(p[1]),
                           {src(p[0]), src(p[1])},
                           geometry::VSplit{}});
        }
        return out;
    }
    if (opt.table < 1 || opt.table > 4) throw std::invalid_argument("table must be 1, 2, 3 or 4");
    if (opt.brodatz_dir.empty() || !std::filesystem::is_directory(opt.brodatz_dir))
        throw std::invalid_argument(detail::missing_brodatz_message(opt.brodatz_dir));
    std::vector<std::string> missing;
    for (const char* name : brodatz_names())
        if (!std::filesystem::exists(detail::brodatz_file(opt.brodatz_dir, name))) missing.push_back(name);
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i] + ".pgm";
        throw std::invalid_argument("missing Brodatz files in " + opt.brodatz_dir.string() + ": " + list);
    }
    const auto img = [&](const std::string& name) {
        return TextureSource{source::ImageFile{detail::brodatz_file(opt.brodatz_dir, name)}};
    };
    if (opt.table == 2 || opt.table == 3) {
        const RegionGeometry geom = opt.table == 2 ? RegionGeometry{geometry::VSplit{}} : RegionGeometry{geometry::Disk{}};
        const char* pairs[3][2] = {{"D21", "D55"}, {"D21", "D77"}, {"D55", "D77"}};
        for (const auto& p : pairs)
            out.push_back({std::string(p[0]) + " vs " + p[1], {img(p[0]), img(p[1])}, geom});
        return out;
    }
    const char* sets[3][4] = {{"D4", "D6", "D20", "D52"}, {"D21", "D34", "D55", "D77"}, {"D6", "D21", "D34", "D77"}};
    for (const auto& s : sets) {
        std::vector<TextureSource> srcs;
        std::string name;
        for (int j = 0; j < 4; ++j) {
            srcs.push_back(img(s[j]));
            name += (j ? (j == 3 ? " & " : ", ") : "") + std::string(s[j]);
        }
        out.push_back({name, std::move(srcs), geometry::Quadrants{}});
    }
    return out;
}

struct MosaicScores {
    double single_linkage = 0.0;
    double ward_linkage = 0.0;
    double kmeans = 0.0;
};

/// Runs the three size-constrained algorithms on one mosaic and matches each against truth.
inline MosaicScores score_mosaic(const Mosaic& mosaic, const ReproduceOptions& opt, Seed seed) {
    const std::size_t k = label_count(mosaic.truth);
    SegmentOptions so;
    so.patch = {opt.half_width, Padding::Reflect};
    so.with_location = opt.with_location;
    so.k = k;
    so.restarts = opt.restarts;
    so.seed = seed;
    so.stride = opt.stride;
    so.metric = opt.single_metric;

    MosaicScores s;
    so.min_cluster_size = static_cast<std::size_t>(std::floor(opt.min_cluster_fraction * mosaic.image.size()));
    s.kmeans = best_permutation_match(segment_kmeans(mosaic.image, so).labels, mosaic.truth, k).accuracy;

    const std::size_t samples = strided_sample(mosaic.image.rows(), mosaic.image.cols(), opt.stride).size();
    so.min_cluster_size = static_cast<std::size_t>(std::floor(opt.min_cluster_fraction * samples));
    s.single_linkage =
        best_permutation_match(segment_agglomerative(mosaic.image, so, Linkage::Single).labels, mosaic.truth, k)
            .accuracy;
    s.ward_linkage =
        best_permutation_match(segment_agglomerative(mosaic.image, so, Linkage::Ward).labels, mosaic.truth, k)
            .accuracy;
    return s;
}

/// One row per mosaic (averaged over seeds) plus the mean row. Mosaic j under
/// seed s is composed with derive_seed(s, j).
inline AccuracyTable reproduce_table(const ReproduceOptions& opt) {
    if (opt.seeds.empty()) throw std::invalid_argument("reproduce: at least one seed is required");
    const std::size_t size = opt.size ? opt.size : (opt.table == 1 ? 128 : 160);
    const std::vector<MosaicSpec> mosaics = table_mosaics(opt);
    AccuracyTable table;
    table.seed = opt.seeds.front();
    for (std::size_t j = 0; j < mosaics.size(); ++j) {
        TableRow row{mosaics[j].name, 0.0, 0.0, 0.0};
        for (std::uint64_t s : opt.seeds) {
            const Seed ms = derive_seed(Seed{s}, j);
            const Mosaic mosaic = compose_mosaic(mosaics[j].sources, mosaics[j].geometry, size, size, ms, true);
            const MosaicScores sc = score_mosaic(mosaic, opt, ms);
            row.single_linkage += sc.single_linkage;
            row.ward_linkage += sc.ward_linkage;
            row.kmeans += sc.kmeans;
        }
        const double ns = static_cast<double>(opt.seeds.size());
        row.single_linkage /= ns;
        row.ward_linkage /= ns;
        row.kmeans /= ns;
        table.rows.push_back(row);
    }
    table.mean.mosaic = "Mean Value";
    for (const auto& r : table.rows) {
        table.mean.single_linkage += r.single_linkage / static_cast<double>(table.rows.size());
        table.mean.ward_linkage += r.ward_linkage / static_cast<double>(table.rows.size());
        table.mean.kmeans += r.kmeans / static_cast<double>(table.rows.size());
    }
    return table;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string table_csv(const AccuracyTable& t, const std::string& seed_text) {
    std::ostringstream os;
    os << "mosaic,single_linkage,ward_linkage,kmeans\n";
    const auto line = [&](const TableRow& r) {
        os << csv_quote(r.mosaic) << ',' << format_fixed(r.single_linkage, 4) << ','
           << format_fixed(r.ward_linkage, 4) << ',' << format_fixed(r.kmeans, 4) << '\n';
    };
    for (const auto& r : t.rows) line(r);
    line(t.mean);
    os << "# seed=" << seed_text << '\n';
    return os.str();
}

}  // namespace texseg
