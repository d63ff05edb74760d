#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "texseg/io.hpp"

using namespace texseg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "texseg_test_io";
    fs::create_directories(dir);
    return dir / name;
}

// Little-endian bytes written by hand, independent of the encoder helpers.
std::string le_u32(std::uint32_t v) {
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return s;
}
std::string le_f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    std::string s(8, '\0');
    for (int i = 0; i < 8; ++i) s[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    return s;
}

}  // namespace

TEST(Texf, ByteLayout) {
    const Field f(2, 3, std::vector<double>{1.5, -2.0, 0.0, 3.25, 1e-300, -7.0});
    std::string expect = "TEXF" + le_u32(2) + le_u32(3);
    for (double v : f.values()) expect += le_f64(v);
    EXPECT_EQ(encode_texf(f), expect);
}

TEST(Texf, FileRoundTripIsBitIdentical) {
    Field f(5, 4);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(1.0 + i) * 1e3 / 7.0;
    write_texf(scratch("a.texf"), f);
    const Field g = read_texf(scratch("a.texf"));
    ASSERT_TRUE(f.same_shape(g));
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(std::memcmp(&f[i], &g[i], sizeof(double)), 0);
}

TEST(Texf, RejectsMalformedInput) {
    const std::string good = encode_texf(Field(2, 2, 1.0));
    EXPECT_THROW(decode_texf("TEXG" + good.substr(4)), FormatError);
    EXPECT_THROW(decode_texf(good.substr(0, good.size() - 1)), FormatError);
    EXPECT_THROW(decode_texf(good + "x"), FormatError);
    EXPECT_THROW(decode_texf("TEXF" + le_u32(1) + le_u32(1) + le_f64(std::numeric_limits<double>::quiet_NaN())),
                 std::invalid_argument);
}

TEST(Texc, ByteLayoutAndRoundTrip) {
    FeatureDump d{2, 1, 3, {1, 2, 3, 4, 5, 6}};
    std::string expect = "TEXC" + le_u32(2) + le_u32(1) + le_u32(3);
    for (double v : d.values) expect += le_f64(v);
    EXPECT_EQ(encode_texc(d), expect);
    write_texc(scratch("a.texc"), d);
    const FeatureDump e = read_texc(scratch("a.texc"));
    EXPECT_EQ(e.rows, 2u);
    EXPECT_EQ(e.cols, 1u);
    EXPECT_EQ(e.feature_len, 3u);
    EXPECT_EQ(e.values, d.values);
    EXPECT_THROW(decode_texc(expect.substr(0, 20)), FormatError);
    FeatureDump bad{2, 2, 2, {1.0}};
    EXPECT_THROW(encode_texc(bad), FormatError);
}

TEST(Pgm, P5BytesScaleByMaxval) {
    const std::string bytes = std::string("P5\n2 2\n255\n") + std::string{'\0', '\xff', '\x80', '\x40'};
    const Field f = pgm_to_field(decode_pgm(bytes));
    EXPECT_EQ(f(0, 0), 0.0);
    EXPECT_EQ(f(0, 1), 1.0);
    EXPECT_NEAR(f(1, 0), 0.50196, 1e-5);
    EXPECT_NEAR(f(1, 1), 0.25098, 1e-5);
    EXPECT_EQ(f(1, 0), 128.0 / 255.0);
}

TEST(Pgm, P2AndP5DecodeToTheSameField) {
    PgmImage img{3, 4, 255, {0, 1, 2, 3, 250, 251, 252, 253, 17, 99, 128, 255}};
    const Field a = pgm_to_field(decode_pgm(encode_pgm_p2(img)));
    const Field b = pgm_to_field(decode_pgm(encode_pgm_p5(img)));
    EXPECT_EQ(a, b);
    const std::string commented = "P2\n# a comment\n4 3 # trailing\n255\n0 1 2 3\n250 251 252 253\n17 99 128 255\n";
    EXPECT_EQ(pgm_to_field(decode_pgm(commented)), a);
}

TEST(Pgm, SixteenBitRaster) {
    PgmImage img{1, 3, 65535, {0, 300, 65535}};
    const PgmImage back = decode_pgm(encode_pgm_p5(img));
    EXPECT_EQ(back.levels, img.levels);
    EXPECT_THROW(pgm_to_field(back), FormatError);
}

TEST(Pgm, RejectsBadFiles) {
    EXPECT_THROW(decode_pgm("P6\n1 1\n255\nx"), FormatError);
    EXPECT_THROW(decode_pgm("P5\n2 2\n255\n\x01\x02"), FormatError);
    EXPECT_THROW(decode_pgm("P2\n2 2\n255\n1 2 3"), FormatError);
    EXPECT_THROW(decode_pgm("P2\n1 1\n10\n11"), FormatError);
    EXPECT_THROW(pgm_to_field(decode_pgm("P2\n1 1\n15\n3")), FormatError);
    EXPECT_THROW(read_pgm(scratch("does_not_exist.pgm")), FormatError);
}

TEST(Preview, RescalesMinMaxToFullRange) {
    const Field f(1, 3, std::vector<double>{-2.0, 0.0, 2.0});
    const PgmImage p = field_to_preview(f);
    EXPECT_EQ(p.levels, (std::vector<unsigned>{0, 128, 255}));
    const PgmImage flat = field_to_preview(Field(2, 2, 3.0));
    EXPECT_EQ(flat.levels, (std::vector<unsigned>(4, 0)));
}

TEST(LabelPgm, RoundTripIncludingWideLabels) {
    LabelMap small(2, 3, std::vector<std::uint32_t>{0, 1, 2, 2, 1, 0});
    write_label_pgm(scratch("l.pgm"), small);
    EXPECT_EQ(read_label_pgm(scratch("l.pgm")), small);
    LabelMap wide(1, 2, std::vector<std::uint32_t>{0, 400});
    write_label_pgm(scratch("w.pgm"), wide);
    EXPECT_EQ(read_label_pgm(scratch("w.pgm")), wide);
}

TEST(LabelCsv, RowColLabel) {
    LabelMap l(2, 2, std::vector<std::uint32_t>{0, 1, 1, 0});
    EXPECT_EQ(encode_label_csv(l), "row,col,label\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n");
}

TEST(Formatting, FixedAndExact) {
    EXPECT_EQ(format_fixed(0.98676, 4), "0.9868");
    EXPECT_EQ(format_fixed(1.0, 4), "1.0000");
    EXPECT_EQ(std::stod(format_exact(0.1 + 0.2)), 0.1 + 0.2);
}
