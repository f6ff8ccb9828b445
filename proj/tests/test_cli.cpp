#include <gtest/gtest.h>

#include "cli_runner.hpp"
#include "thz/io.hpp"

namespace thz {
namespace {

using testing_cli::fresh_dir;
using testing_cli::run_thzscan;
using testing_cli::slurp;
namespace fs = std::filesystem;

const std::string kSamples = THZ_SAMPLES_DIR;

std::size_t count_lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Cli, SimulateIsDeterministic) {
  const auto d = fresh_dir("sim_det");
  const auto a = run_thzscan("simulate --spec " + kSamples + "/six_hole_phantom.cfg --seed 5 "
                             "--noise-sigma 0.1 --out " + (d / "a").string(), d);
  ASSERT_EQ(a.exit_code, 0) << a.err;
  const auto b = run_thzscan("simulate --spec " + kSamples + "/six_hole_phantom.cfg --seed 5 "
                             "--noise-sigma 0.1 --out " + (d / "b").string(), d);
  ASSERT_EQ(b.exit_code, 0) << b.err;
  for (const char *f : {"volume.tvol", "truth.csv", "truth_mask.pgm"})
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
  const auto v = read_tvol(d / "a" / "volume.tvol");
  EXPECT_EQ(v.nx(), 60u);
  EXPECT_EQ(v.ny(), 40u);
  EXPECT_EQ(v.nz(), 512u);
  const auto t = decode_ground_truth(slurp(d / "a" / "truth.csv"));
  EXPECT_EQ(t.areas_mm2.size(), 6u);
}

TEST(Cli, SimulateWithoutHoles) {
  const auto d = fresh_dir("sim_none");
  const auto r = run_thzscan("simulate --spec " + kSamples + "/homogeneous.cfg --out " +
                                 (d / "o").string(), d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(decode_ground_truth(slurp(d / "o" / "truth.csv")).areas_mm2.empty());
  // nothing to segment on a defect-free slice
  const auto p = run_thzscan("process --input " + (d / "o" / "volume.tvol").string() +
                                 " --wavelet raw --out " + (d / "p").string(), d);
  EXPECT_EQ(p.exit_code, 4) << p.err;
}

TEST(Cli, MissingSpecWritesNothing) {
  const auto d = fresh_dir("sim_missing");
  const auto r = run_thzscan("simulate --spec " + (d / "nope.cfg").string() + " --out " +
                                 (d / "o").string(), d);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_FALSE(fs::exists(d / "o"));
  EXPECT_NE(r.err.find("nope.cfg"), std::string::npos);
}

TEST(Cli, InvalidSpecWritesNothing) {
  const auto d = fresh_dir("sim_invalid");
  {
    std::ofstream f(d / "bad.cfg");
    f << "hole = 50 10 10\n";
  }
  const auto r = run_thzscan("simulate --spec " + (d / "bad.cfg").string() + " --out " +
                                 (d / "o").string(), d);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_FALSE(fs::exists(d / "o"));
}

TEST(Cli, ProcessAllMethods) {
  const auto d = fresh_dir("proc_all");
  ASSERT_EQ(run_thzscan("simulate --out " + (d / "sim").string() + " --noise-sigma 0.05 --seed 2",
                        d).exit_code, 0);
  const auto r = run_thzscan("process --config " + kSamples + "/process.cfg --input " +
                                 (d / "sim" / "volume.tvol").string() + " --out " +
                                 (d / "p1").string(), d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string report = slurp(d / "p1" / "report.csv");
  EXPECT_EQ(report, r.out);
  EXPECT_EQ(count_lines(report), 6u); // header + actual + four methods
  const auto rows = decode_numeric_rows(report);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].label, "Actual size");
  EXPECT_EQ(rows[4].label, "Mexican hat");
  for (const auto &row : rows)
    EXPECT_EQ(row.values.size(), 8u); // six areas, total, percent
  for (const char *stem : {"raw", "morlet", "gaussian", "mexican-hat"}) {
    EXPECT_TRUE(fs::exists(d / "p1" / ("slice_" + std::string(stem) + ".pgm")));
    EXPECT_TRUE(fs::exists(d / "p1" / ("slice_" + std::string(stem) + ".csv")));
  }

  // byte-identical re-run
  const auto again = run_thzscan("process --config " + kSamples + "/process.cfg --input " +
                                     (d / "sim" / "volume.tvol").string() + " --out " +
                                     (d / "p2").string(), d);
  ASSERT_EQ(again.exit_code, 0);
  for (const auto &e : fs::directory_iterator(d / "p1"))
    EXPECT_EQ(slurp(e.path()), slurp(d / "p2" / e.path().filename())) << e.path();
}

TEST(Cli, RawOnlyLogsNoTransform) {
  const auto d = fresh_dir("proc_raw");
  const auto r = run_thzscan("process --spec " + kSamples + "/six_hole_phantom.cfg --wavelet raw "
                             "--format pgm --out " + (d / "p").string(), d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.err.find("no wavelet transform"), std::string::npos);
  EXPECT_EQ(r.err.find("wavelet transform applied"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "p" / "slice_raw.pgm"));
  EXPECT_FALSE(fs::exists(d / "p" / "slice_raw.csv"));
  EXPECT_EQ(decode_numeric_rows(r.out).size(), 2u);
}

TEST(Cli, FixedSliceMismatchIsReported) {
  const auto d = fresh_dir("proc_mismatch");
  // a threshold above every pixel of the slice finds nothing
  const auto r = run_thzscan("process --spec " + kSamples + "/six_hole_phantom.cfg --wavelet raw "
                             "--z-index 144 --threshold 0.99 --out " + (d / "p").string(), d);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(slurp(d / "p" / "report.csv").find("count mismatch"), std::string::npos);
}

TEST(Cli, MetricsReproducesReferenceRows) {
  const auto d = fresh_dir("metrics");
  const auto r = run_thzscan("metrics --measured " + kSamples + "/reference_measured.csv --actual " +
                                 kSamples + "/reference_actual.csv --out " + (d / "m").string(), d);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(slurp(d / "m" / "report.csv"), r.out);
  EXPECT_NE(r.out.find("Raw data,6.000,8.000,34.000,53.000,85.000,112.000,58.39,16.38,ok"),
            std::string::npos);
  EXPECT_NE(r.out.find("Morlet,"), std::string::npos);
  EXPECT_NE(r.out.find(",17.16,4.81,ok"), std::string::npos);
  EXPECT_NE(r.out.find(",27.01,7.58,ok"), std::string::npos);
  EXPECT_NE(r.out.find("Mexican hat,7.000,17.000,36.000,63.000,96.000,133.000,7.09,1.99,ok"),
            std::string::npos);
}

TEST(Cli, MetricsCountMismatch) {
  const auto d = fresh_dir("metrics_bad");
  {
    std::ofstream f(d / "m.csv");
    f << "Raw,1,2,3\n";
  }
  const auto r = run_thzscan("metrics --measured " + (d / "m.csv").string() + " --actual " +
                                 kSamples + "/reference_actual.csv", d);
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, UsageErrors) {
  const auto d = fresh_dir("usage");
  EXPECT_EQ(run_thzscan("", d).exit_code, 2);
  EXPECT_EQ(run_thzscan("frobnicate", d).exit_code, 2);
  EXPECT_EQ(run_thzscan("metrics --measured x.csv", d).exit_code, 2);
  EXPECT_EQ(run_thzscan("simulate", d).exit_code, 2);
  EXPECT_EQ(run_thzscan("process --out " + (d / "o").string(), d).exit_code, 2);
  EXPECT_EQ(run_thzscan("process --spec " + kSamples + "/six_hole_phantom.cfg --wavelet haar --out " +
                            (d / "o").string(), d).exit_code, 2);
  EXPECT_EQ(run_thzscan("process --spec " + kSamples + "/six_hole_phantom.cfg --scales 1,2 --out " +
                            (d / "o").string(), d).exit_code, 2);
  EXPECT_EQ(run_thzscan("--help", d).exit_code, 0);
}

TEST(Cli, CorruptVolumeIsDataError) {
  const auto d = fresh_dir("corrupt");
  {
    std::ofstream f(d / "v.tvol", std::ios::binary);
    f << "TVOL garbage";
  }
  const auto r = run_thzscan("process --input " + (d / "v.tvol").string() +
                                 " --z-index 3 --out " + (d / "o").string(), d);
  EXPECT_EQ(r.exit_code, 3);
}

} // namespace
} // namespace thz
