#pragma once

// File formats: TVOL volumes, PGM/CSV slice images, ground-truth sidecars and
// tabular defect reports.
//
// TVOL (all integers and floats little-endian):
//   offset  size  field
//        0     4  magic "TVOL"
//        4     2  u16 format version (1)
//        6     4  u32 nx
//       10     4  u32 ny
//       14     4  u32 nz
//       18     8  f64 step_xy (m)
//       26     8  f64 depth_bin (m of path difference per z bin)
//       34     1  u8 provenance (0 raw, 1 morlet, 2 gaussian, 3 mexican-hat)
//       35  4*N   f32 samples, z fastest, then y, then x

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thz/error.hpp"
#include "thz/phantom.hpp"
#include "thz/segmentation.hpp"
#include "thz/volume.hpp"

namespace thz {

inline constexpr std::array<char, 4> kTvolMagic{'T', 'V', 'O', 'L'};
inline constexpr std::uint16_t kTvolVersion = 1;
inline constexpr std::size_t kTvolHeaderBytes = 35;

namespace detail {

template <class U> void put_le(std::string &out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

template <class U> U get_le(const std::string &in, std::size_t offset) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    v |= static_cast<U>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return v;
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw FormatError("failed writing " + path.string());
}

inline std::string fmt(const char *spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string &s, double &out) {
  const std::string t = trim(s);
  if (t.empty())
    return false;
  char *end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

} // namespace detail

inline std::string encode_tvol(const VolumeScan &v) {
  std::string out;
  out.reserve(kTvolHeaderBytes + 4 * v.data().size());
  out.append(kTvolMagic.begin(), kTvolMagic.end());
  detail::put_le<std::uint16_t>(out, kTvolVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.nx()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.ny()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.nz()));
  detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v.step_xy_m()));
  detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v.depth_bin_m()));
  out.push_back(static_cast<char>(v.provenance()));
  for (double x : v.data())
    detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  return out;
}

inline VolumeScan decode_tvol(const std::string &bytes) {
  if (bytes.size() < kTvolHeaderBytes)
    throw FormatError("TVOL: truncated header");
  if (!std::equal(kTvolMagic.begin(), kTvolMagic.end(), bytes.begin()))
    throw FormatError("TVOL: bad magic");
  if (detail::get_le<std::uint16_t>(bytes, 4) != kTvolVersion)
    throw FormatError("TVOL: unsupported format version");
  const std::size_t nx = detail::get_le<std::uint32_t>(bytes, 6);
  const std::size_t ny = detail::get_le<std::uint32_t>(bytes, 10);
  const std::size_t nz = detail::get_le<std::uint32_t>(bytes, 14);
  const double step = std::bit_cast<double>(detail::get_le<std::uint64_t>(bytes, 18));
  const double bin = std::bit_cast<double>(detail::get_le<std::uint64_t>(bytes, 26));
  const auto prov = static_cast<std::uint8_t>(bytes[34]);
  if (prov > 3)
    throw FormatError("TVOL: unknown provenance byte");
  if (nx == 0 || ny == 0 || nz == 0)
    throw FormatError("TVOL: zero dimension");
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(bin))
    throw FormatError("TVOL: invalid grid spacing");
  const std::size_t n = nx * ny * nz;
  if (n / nx / ny != nz || bytes.size() != kTvolHeaderBytes + 4 * n)
    throw FormatError("TVOL: payload size does not match the header");
  VolumeScan v(nx, ny, nz, step, bin, static_cast<Provenance>(prov));
  auto &d = v.data();
  for (std::size_t i = 0; i < n; ++i)
    d[i] = std::bit_cast<float>(detail::get_le<std::uint32_t>(bytes, kTvolHeaderBytes + 4 * i));
  return v;
}

inline void write_tvol(const std::filesystem::path &path, const VolumeScan &v) {
  detail::write_file(path, encode_tvol(v));
}

inline VolumeScan read_tvol(const std::filesystem::path &path) {
  return decode_tvol(detail::read_file(path));
}

/// 8-bit binary PGM, width nx and height ny, values mapped linearly from the
/// slice's [min, max] to [0, 255]. A constant slice maps to 0.
inline std::string encode_pgm(const SliceImage &s) {
  std::string out = "P5\n" + std::to_string(s.nx) + " " + std::to_string(s.ny) + "\n255\n";
  const auto [lo_it, hi_it] = std::minmax_element(s.pixels.begin(), s.pixels.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  for (std::size_t y = 0; y < s.ny; ++y)
    for (std::size_t x = 0; x < s.nx; ++x) {
      const double f = span > 0.0 ? (s.at(x, y) - lo) / span : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(f * 255.0))));
    }
  return out;
}

inline std::string encode_mask_pgm(const GroundTruth &gt) {
  SliceImage s;
  s.nx = gt.nx;
  s.ny = gt.ny;
  s.pixels.assign(gt.defect_mask.begin(), gt.defect_mask.end());
  if (std::all_of(s.pixels.begin(), s.pixels.end(), [](double v) { return v == 0.0; }))
    return "P5\n" + std::to_string(s.nx) + " " + std::to_string(s.ny) + "\n255\n" +
           std::string(s.nx * s.ny, '\0');
  return encode_pgm(s);
}

/// One row per y, one column per x.
inline std::string encode_slice_csv(const SliceImage &s) {
  std::string out;
  for (std::size_t y = 0; y < s.ny; ++y) {
    for (std::size_t x = 0; x < s.nx; ++x) {
      if (x)
        out.push_back(',');
      out += detail::fmt("%.9g", s.at(x, y));
    }
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground truth sidecar

inline std::string encode_ground_truth(const PhantomSpec &spec, const GroundTruth &gt) {
  std::string out = "# ground truth\n";
  out += "# grid_nx=" + std::to_string(gt.nx) + "\n";
  out += "# grid_ny=" + std::to_string(gt.ny) + "\n";
  out += "# step_m=" + detail::fmt("%.10g", spec.scan_step_m) + "\n";
  out += "# interface_a_path_m=" + detail::fmt("%.10g", gt.interface_a_path_m) + "\n";
  out += "# interface_b_path_m=" + detail::fmt("%.10g", gt.interface_b_path_m) + "\n";
  out += "# interface_c_path_m=" + detail::fmt("%.10g", gt.interface_c_path_m) + "\n";
  out += "defect,diameter_mm,center_x_mm,center_y_mm,area_mm2,area_mm2_pi_3.14,mask_pixels\n";
  for (std::size_t i = 0; i < spec.holes.size(); ++i) {
    const Hole &h = spec.holes[i];
    out += std::to_string(i + 1) + "," + detail::fmt("%.10g", h.diameter_m * 1e3) + "," +
           detail::fmt("%.10g", h.center_x_m * 1e3) + "," +
           detail::fmt("%.10g", h.center_y_m * 1e3) + "," +
           detail::fmt("%.10g", gt.per_defect_area_m2[i] * 1e6) + "," +
           detail::fmt("%.10g", gt.per_defect_area_m2_rounded_pi[i] * 1e6) + "," +
           std::to_string(gt.per_defect_mask_pixels[i]) + "\n";
  }
  return out;
}

/// The parts of a ground-truth sidecar the processing pipeline consumes.
struct TruthSummary {
  std::vector<double> areas_mm2;
  std::vector<double> areas_mm2_rounded_pi;
  double interface_a_path_m = 0.0;
  double interface_b_path_m = 0.0;
  double interface_c_path_m = 0.0;
};

inline TruthSummary decode_ground_truth(const std::string &text) {
  TruthSummary t;
  bool seen_a = false, seen_b = false, seen_c = false, header = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty())
      continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        continue;
      const std::string key = detail::trim(line.substr(1, eq - 1));
      double v = 0.0;
      if (!detail::parse_double(line.substr(eq + 1), v))
        continue;
      if (key == "interface_a_path_m")
        t.interface_a_path_m = v, seen_a = true;
      else if (key == "interface_b_path_m")
        t.interface_b_path_m = v, seen_b = true;
      else if (key == "interface_c_path_m")
        t.interface_c_path_m = v, seen_c = true;
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto cells = detail::split_csv(line);
    double area = 0.0, rounded = 0.0;
    if (cells.size() < 6 || !detail::parse_double(cells[4], area) ||
        !detail::parse_double(cells[5], rounded))
      throw FormatError("ground truth: malformed defect row '" + line + "'");
    t.areas_mm2.push_back(area);
    t.areas_mm2_rounded_pi.push_back(rounded);
  }
  if (!seen_a || !seen_b || !seen_c || !header)
    throw FormatError("ground truth: missing interface depths or header");
  return t;
}

// ---------------------------------------------------------------------------
// Reports

/// Row of a tabular report. A row whose defect count did not match the
/// ground truth carries its areas but no metrics.
struct ReportRow {
  std::string label;
  std::vector<double> areas_mm2;
  std::optional<double> total_difference_mm2;
  std::optional<double> percent_difference;
  std::string status = "ok";

  static ReportRow from(const DefectReport &r) {
    return {std::string(to_string(r.method_tag)), r.measured_areas_mm2, r.total_difference_mm2,
            r.percent_difference, "ok"};
  }
};

inline std::string encode_report_csv(const std::vector<ReportRow> &rows) {
  std::size_t ncols = 0;
  for (const auto &r : rows)
    ncols = std::max(ncols, r.areas_mm2.size());
  std::string out = "slice";
  for (std::size_t i = 0; i < ncols; ++i)
    out += ",defect " + std::to_string(i + 1) + " (mm^2)";
  out += ",total difference (mm^2),percent difference (%),status\n";
  for (const auto &r : rows) {
    out += r.label;
    for (std::size_t i = 0; i < ncols; ++i) {
      out.push_back(',');
      if (i < r.areas_mm2.size())
        out += detail::fmt("%.3f", r.areas_mm2[i]);
    }
    out += "," + (r.total_difference_mm2 ? detail::fmt("%.2f", *r.total_difference_mm2) : "");
    out += "," + (r.percent_difference ? detail::fmt("%.2f", *r.percent_difference) : "");
    out += "," + r.status + "\n";
  }
  return out;
}

/// Numeric rows of a CSV file. A leading non-numeric cell is taken as the row
/// label; blank and '#' lines are skipped.
struct LabeledRow {
  std::string label;
  std::vector<double> values;
};

inline std::vector<LabeledRow> decode_numeric_rows(const std::string &text) {
  std::vector<LabeledRow> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#')
      continue;
    auto cells = detail::split_csv(line);
    LabeledRow row;
    std::size_t first = 0;
    double v = 0.0;
    if (!detail::parse_double(cells[0], v)) {
      row.label = detail::trim(cells[0]);
      first = 1;
    }
    // Rows without numbers are headers. Empty cells are skipped; text after
    // the last number (a status column) is ignored, text between numbers is
    // an error.
    bool text_seen = false, bad = false;
    for (std::size_t i = first; i < cells.size(); ++i) {
      if (detail::parse_double(cells[i], v)) {
        bad = bad || text_seen;
        row.values.push_back(v);
      } else if (!detail::trim(cells[i]).empty()) {
        text_seen = true;
      }
    }
    if (row.values.empty())
      continue;
    if (bad)
      throw FormatError("CSV: non-numeric cell in data row '" + line + "'");
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace thz
