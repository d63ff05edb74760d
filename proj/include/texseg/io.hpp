#pragma once

// File formats: TEXF (field), TEXC (feature dump), PGM P2/P5, label CSV.
// Binary integers and doubles are little-endian regardless of host order.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "texseg/grid.hpp"

namespace texseg {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return v;
}

inline double get_f64(const std::string& in, std::size_t pos) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return std::bit_cast<double>(bits);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for " + path.string());
}

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > 0xffffffffu) throw FormatError(std::string(what) + " exceeds u32 range");
    return static_cast<std::uint32_t>(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// TEXF: "TEXF" u32 rows u32 cols, rows*cols f64 row-major
// ---------------------------------------------------------------------------

inline std::string encode_texf(const Field& field) {
    std::string out = "TEXF";
    detail::put_u32(out, detail::checked_u32(field.rows(), "rows"));
    detail::put_u32(out, detail::checked_u32(field.cols(), "cols"));
    out.reserve(12 + 8 * field.size());
    for (double v : field.values()) detail::put_f64(out, v);
    return out;
}

inline Field decode_texf(const std::string& bytes) {
    if (bytes.size() < 12 || bytes.compare(0, 4, "TEXF") != 0) throw FormatError("not a TEXF file");
    const std::size_t rows = detail::get_u32(bytes, 4);
    const std::size_t cols = detail::get_u32(bytes, 8);
    if (rows == 0 || cols == 0) throw FormatError("TEXF: empty shape");
    if (bytes.size() != 12 + 8 * rows * cols) throw FormatError("TEXF: truncated or oversized payload");
    std::vector<double> values(rows * cols);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = detail::get_f64(bytes, 12 + 8 * i);
    Field f(rows, cols, std::move(values));
    require_finite(f);
    return f;
}

inline void write_texf(const std::filesystem::path& path, const Field& field) {
    detail::write_file(path, encode_texf(field));
}

inline Field read_texf(const std::filesystem::path& path) { return decode_texf(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// TEXC: "TEXC" u32 rows u32 cols u32 feature_len, then row-major f64 vectors
// ---------------------------------------------------------------------------

struct FeatureDump {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t feature_len = 0;
    std::vector<double> values;  // rows * cols * feature_len
};

inline std::string encode_texc(const FeatureDump& dump) {
    if (dump.values.size() != dump.rows * dump.cols * dump.feature_len)
        throw FormatError("TEXC: value count does not match header");
    std::string out = "TEXC";
    detail::put_u32(out, detail::checked_u32(dump.rows, "rows"));
    detail::put_u32(out, detail::checked_u32(dump.cols, "cols"));
    detail::put_u32(out, detail::checked_u32(dump.feature_len, "feature_len"));
    out.reserve(16 + 8 * dump.values.size());
    for (double v : dump.values) detail::put_f64(out, v);
    return out;
}

inline FeatureDump decode_texc(const std::string& bytes) {
    if (bytes.size() < 16 || bytes.compare(0, 4, "TEXC") != 0) throw FormatError("not a TEXC file");
    FeatureDump d;
    d.rows = detail::get_u32(bytes, 4);
    d.cols = detail::get_u32(bytes, 8);
    d.feature_len = detail::get_u32(bytes, 12);
    const std::size_t count = d.rows * d.cols * d.feature_len;
    if (bytes.size() != 16 + 8 * count) throw FormatError("TEXC: truncated or oversized payload");
    d.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) d.values[i] = detail::get_f64(bytes, 16 + 8 * i);
    return d;
}

inline void write_texc(const std::filesystem::path& path, const FeatureDump& dump) {
    detail::write_file(path, encode_texc(dump));
}

inline FeatureDump read_texc(const std::filesystem::path& path) { return decode_texc(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

/// Raw PGM raster: gray levels as stored, before any scaling.
struct PgmImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    unsigned maxval = 255;
    std::vector<unsigned> levels;
};

namespace detail {

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(const std::string& bytes) : bytes_(bytes) {}

    unsigned long next_number() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
            throw FormatError("PGM: truncated or malformed header");
        unsigned long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            v = v * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
            if (v > 0xffffffffUL) throw FormatError("PGM: header value out of range");
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from the binary raster.
    void skip_single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
            throw FormatError("PGM: missing whitespace before raster");
        ++pos_;
    }

    std::size_t pos() const noexcept { return pos_; }
    void set_pos(std::size_t p) noexcept { pos_ = p; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& bytes_;
    std::size_t pos_ = 2;
};

}  // namespace detail

inline PgmImage decode_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw FormatError("unsupported image format (expected PGM P2 or P5)");
    const bool binary = bytes[1] == '5';
    detail::PgmHeaderReader reader(bytes);
    PgmImage img;
    img.cols = reader.next_number();
    img.rows = reader.next_number();
    const unsigned long maxval = reader.next_number();
    if (img.rows == 0 || img.cols == 0) throw FormatError("PGM: empty image");
    if (maxval == 0 || maxval > 65535) throw FormatError("PGM: maxval out of range");
    img.maxval = static_cast<unsigned>(maxval);
    const std::size_t count = img.rows * img.cols;
    img.levels.resize(count);
    if (binary) {
        reader.skip_single_whitespace();
        const std::size_t width = img.maxval < 256 ? 1 : 2;
        const std::size_t start = reader.pos();
        if (bytes.size() < start + width * count) throw FormatError("PGM: truncated raster");
        for (std::size_t i = 0; i < count; ++i) {
            const auto hi = static_cast<unsigned char>(bytes[start + width * i]);
            img.levels[i] = width == 1 ? hi : (static_cast<unsigned>(hi) << 8) |
                                                  static_cast<unsigned char>(bytes[start + width * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) img.levels[i] = static_cast<unsigned>(reader.next_number());
    }
    for (unsigned v : img.levels)
        if (v > img.maxval) throw FormatError("PGM: gray level exceeds maxval");
    return img;
}

inline PgmImage read_pgm(const std::filesystem::path& path) { return decode_pgm(detail::read_file(path)); }

inline std::string encode_pgm_p5(const PgmImage& img) {
    std::ostringstream header;
    header << "P5\n" << img.cols << ' ' << img.rows << '\n' << img.maxval << '\n';
    std::string out = header.str();
    const bool wide = img.maxval > 255;
    for (unsigned v : img.levels) {
        if (wide) out.push_back(static_cast<char>((v >> 8) & 0xffu));
        out.push_back(static_cast<char>(v & 0xffu));
    }
    return out;
}

inline std::string encode_pgm_p2(const PgmImage& img) {
    std::ostringstream out;
    out << "P2\n" << img.cols << ' ' << img.rows << '\n' << img.maxval << '\n';
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) out << (c ? " " : "") << img.levels[r * img.cols + c];
        out << '\n';
    }
    return out.str();
}

/// 8-bit grayscale PGM to [0,1] by level/255.
inline Field pgm_to_field(const PgmImage& img) {
    if (img.maxval != 255) throw FormatError("PGM: maxval must be 255 for image input");
    std::vector<double> values(img.levels.size());
    std::transform(img.levels.begin(), img.levels.end(), values.begin(),
                   [](unsigned v) { return static_cast<double>(v) / 255.0; });
    return Field(img.rows, img.cols, std::move(values));
}

/// Visualization: linear rescale of [min, max] to 0..255.
inline PgmImage field_to_preview(const Field& field) {
    PgmImage img{field.rows(), field.cols(), 255, std::vector<unsigned>(field.size(), 0)};
    if (field.empty()) return img;
    const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double t = span > 0.0 ? (field[i] - *lo) / span : 0.0;
        img.levels[i] = static_cast<unsigned>(std::lround(255.0 * t));
    }
    return img;
}

inline void write_preview_pgm(const std::filesystem::path& path, const Field& field) {
    detail::write_file(path, encode_pgm_p5(field_to_preview(field)));
}

/// Labels as gray levels 0..k-1 (16-bit raster when k > 256).
inline void write_label_pgm(const std::filesystem::path& path, const LabelMap& labels) {
    const std::uint32_t k = label_count(labels);
    if (k > 65536) throw FormatError("label PGM: more than 65536 labels");
    PgmImage img{labels.rows(), labels.cols(), k > 256 ? 65535u : 255u,
                 std::vector<unsigned>(labels.values().begin(), labels.values().end())};
    detail::write_file(path, encode_pgm_p5(img));
}

inline LabelMap read_label_pgm(const std::filesystem::path& path) {
    const PgmImage img = read_pgm(path);
    return LabelMap(img.rows, img.cols, std::vector<std::uint32_t>(img.levels.begin(), img.levels.end()));
}

/// `row,col,label` with a header row.
inline std::string encode_label_csv(const LabelMap& labels) {
    std::ostringstream out;
    out << "row,col,label\n";
    for (std::size_t r = 0; r < labels.rows(); ++r)
        for (std::size_t c = 0; c < labels.cols(); ++c) out << r << ',' << c << ',' << labels(r, c) << '\n';
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    detail::write_file(path, text);
}

/// Fixed-point formatting for CSV cells.
inline std::string format_fixed(double v, int digits) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

/// Round-trippable formatting for CSV cells.
inline std::string format_exact(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace texseg
