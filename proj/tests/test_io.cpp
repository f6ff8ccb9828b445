#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "thz/config.hpp"
#include "thz/io.hpp"

namespace thz {
namespace {

VolumeScan float_volume(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed,
                        Provenance p = Provenance::Raw) {
  VolumeScan v(nx, ny, nz, 1e-3, 0.25e-3, p);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  for (double &x : v.data())
    x = g(rng);
  return v;
}

TEST(Tvol, HeaderLayout) {
  VolumeScan v(2, 3, 4, 1e-3, 0.25e-3, Provenance::MexicanHat);
  v.at(0, 0, 0) = 1.5;
  v.at(0, 0, 1) = -2.0;
  const std::string b = encode_tvol(v);
  ASSERT_EQ(b.size(), 35u + 4u * 24u);
  EXPECT_EQ(b.substr(0, 4), "TVOL");
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(b[i]); };
  EXPECT_EQ(u8(4), 1);
  EXPECT_EQ(u8(5), 0);
  EXPECT_EQ(u8(6), 2);
  EXPECT_EQ(u8(10), 3);
  EXPECT_EQ(u8(14), 4);
  double step = 0.0, bin = 0.0;
  std::memcpy(&step, b.data() + 18, 8); // the test host is little-endian
  std::memcpy(&bin, b.data() + 26, 8);
  EXPECT_EQ(step, 1e-3);
  EXPECT_EQ(bin, 0.25e-3);
  EXPECT_EQ(u8(34), 3);
  float first = 0.0f, second = 0.0f;
  std::memcpy(&first, b.data() + 35, 4);
  std::memcpy(&second, b.data() + 39, 4);
  EXPECT_EQ(first, 1.5f);
  EXPECT_EQ(second, -2.0f);
}

TEST(Tvol, RoundTripProperty) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const auto v = float_volume(1 + rng() % 6, 1 + rng() % 6, 1 + rng() % 40, rng(),
                                static_cast<Provenance>(rng() % 4));
    const auto back = decode_tvol(encode_tvol(v));
    EXPECT_TRUE(back == v);
  }
}

TEST(Tvol, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "thz_io_test.tvol";
  const auto v = float_volume(3, 2, 9, 4);
  write_tvol(path, v);
  EXPECT_TRUE(read_tvol(path) == v);
  std::filesystem::remove(path);
  EXPECT_THROW(read_tvol(path), FormatError);
}

TEST(Tvol, CorruptInputRejected) {
  const std::string good = encode_tvol(float_volume(2, 2, 3, 1));
  EXPECT_THROW(decode_tvol(good.substr(0, 20)), FormatError);
  EXPECT_THROW(decode_tvol(good.substr(0, good.size() - 1)), FormatError);
  std::string b = good;
  b[0] = 'X';
  EXPECT_THROW(decode_tvol(b), FormatError);
  b = good;
  b[4] = 2;
  EXPECT_THROW(decode_tvol(b), FormatError);
  b = good;
  b[34] = 7;
  EXPECT_THROW(decode_tvol(b), FormatError);
  b = good;
  b[6] = 0;
  EXPECT_THROW(decode_tvol(b), FormatError);
}

TEST(Pgm, HeaderAndLinearMapping) {
  SliceImage s;
  s.nx = 3;
  s.ny = 2;
  s.pixels = {-1.0, 0.0, 1.0, 3.0, 2.0, 0.5}; // [x * ny + y]
  const std::string p = encode_pgm(s);
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(p.size(), header.size() + 6);
  EXPECT_EQ(p.substr(0, header.size()), header);
  const auto px = [&](std::size_t x, std::size_t y) {
    return static_cast<unsigned char>(p[header.size() + y * 3 + x]);
  };
  EXPECT_EQ(px(0, 0), 0);
  EXPECT_EQ(px(2, 0), 191); // (2 + 1) / 4 * 255 = 191.25
  EXPECT_EQ(px(1, 1), 255);
  EXPECT_EQ(px(0, 1), 64);
}

TEST(SliceCsv, RowsAreY) {
  SliceImage s;
  s.nx = 2;
  s.ny = 2;
  s.pixels = {1.0, 2.0, 3.0, 0.125};
  EXPECT_EQ(encode_slice_csv(s), "1,3\n2,0.125\n");
}

TEST(GroundTruthFile, RoundTrip) {
  const auto spec = PhantomSpec::six_hole_default();
  const Phantom ph = build_phantom(spec);
  const auto t = decode_ground_truth(encode_ground_truth(spec, ph.truth()));
  ASSERT_EQ(t.areas_mm2.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(t.areas_mm2[i], ph.truth().per_defect_area_m2[i] * 1e6, 1e-7);
    EXPECT_NEAR(t.areas_mm2_rounded_pi[i], ph.truth().per_defect_area_m2_rounded_pi[i] * 1e6, 1e-7);
  }
  EXPECT_NEAR(t.interface_b_path_m, ph.truth().interface_b_path_m, 1e-12);
  EXPECT_THROW(decode_ground_truth("defect,a\n1,2\n"), FormatError);
}

TEST(GroundTruthFile, NoHoles) {
  auto spec = PhantomSpec::six_hole_default();
  spec.holes.clear();
  const Phantom ph = build_phantom(spec);
  const auto t = decode_ground_truth(encode_ground_truth(spec, ph.truth()));
  EXPECT_TRUE(t.areas_mm2.empty());
  const std::string mask = encode_mask_pgm(ph.truth());
  EXPECT_EQ(mask, "P5\n60 40\n255\n" + std::string(2400, '\0'));
}

TEST(Report, Layout) {
  ReportRow actual{"Actual size", {7.065, 19.625}, 0.0, 0.0, "ok"};
  ReportRow bad{"Morlet", {3.0}, std::nullopt, std::nullopt, "count mismatch"};
  const std::string csv = encode_report_csv({actual, bad});
  EXPECT_EQ(csv, "slice,defect 1 (mm^2),defect 2 (mm^2),total difference (mm^2),"
                 "percent difference (%),status\n"
                 "Actual size,7.065,19.625,0.00,0.00,ok\n"
                 "Morlet,3.000,,,,count mismatch\n");
}

TEST(NumericRows, LabelsAndHeaders) {
  const auto rows = decode_numeric_rows("slice,a,b\n# note\n\nRaw data, 6, 8\n1,2\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "Raw data");
  EXPECT_EQ(rows[0].values, (std::vector<double>{6, 8}));
  EXPECT_EQ(rows[1].label, "");
  EXPECT_EQ(rows[1].values, (std::vector<double>{1, 2}));
  EXPECT_THROW(decode_numeric_rows("Raw,6,x,7\n"), FormatError);
  EXPECT_EQ(decode_numeric_rows("Raw,6,7,ok\n")[0].values, (std::vector<double>{6, 7}));
}

TEST(Config, ParsesSpec) {
  const auto kv = KeyValueFile::parse(R"(# phantom
grid_nx = 30
grid_ny = 20   # trailing comment
step_mm = 0.5
layer = top 2 0.4
layer = glue 0.1 0.25
layer = base 1 0
hole = 4 5 5
hole = 2 10 5
clutter_count = 0
visibility = 0.8
band_start_ghz = 240
)");
  const auto cfg = simulation_from(kv);
  EXPECT_EQ(cfg.phantom.grid_nx, 30u);
  EXPECT_EQ(cfg.phantom.grid_ny, 20u);
  EXPECT_DOUBLE_EQ(cfg.phantom.scan_step_m, 0.5e-3);
  ASSERT_EQ(cfg.phantom.layers.size(), 3u);
  EXPECT_EQ(cfg.phantom.layers[1].name, "glue");
  EXPECT_DOUBLE_EQ(cfg.phantom.layers[1].thickness_m, 0.1e-3);
  ASSERT_EQ(cfg.phantom.holes.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.phantom.holes[1].center_x_m, 10e-3);
  EXPECT_EQ(cfg.phantom.clutter_count, 0u);
  EXPECT_DOUBLE_EQ(cfg.acquisition.visibility, 0.8);
  EXPECT_DOUBLE_EQ(cfg.acquisition.sweep.band_start_hz, 240e9);
  EXPECT_DOUBLE_EQ(cfg.acquisition.sweep.freq_span_hz, 80e9);
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Config, Errors) {
  EXPECT_THROW(KeyValueFile::parse("grid_nx 30\n"), FormatError);
  EXPECT_THROW(KeyValueFile::parse(" = 3\n"), FormatError);
  EXPECT_THROW(simulation_from(KeyValueFile::parse("colour = red\n")), FormatError);
  EXPECT_THROW(simulation_from(KeyValueFile::parse("grid_nx = -3\n")), FormatError);
  EXPECT_THROW(simulation_from(KeyValueFile::parse("grid_nx = 2.5\n")), FormatError);
  EXPECT_THROW(simulation_from(KeyValueFile::parse("hole = 1 2\n")), FormatError);
  EXPECT_THROW(simulation_from(KeyValueFile::parse("holes = some\n")), FormatError);
  EXPECT_THROW(KeyValueFile::load("/nonexistent/spec.cfg"), FormatError);
  const auto cfg = simulation_from(KeyValueFile::parse("hole = 30 10 10\n"));
  EXPECT_THROW(validate(cfg), InvariantError);
  EXPECT_TRUE(simulation_from(KeyValueFile::parse("holes = none\n")).phantom.holes.empty());
}

} // namespace
} // namespace thz
