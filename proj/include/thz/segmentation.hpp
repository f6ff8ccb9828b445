#pragma once

// Defect segmentation of slice images and the area accuracy metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thz/error.hpp"
#include "thz/volume.hpp"

namespace thz {

struct ThresholdPolicy {
  std::optional<double> fixed; // unset: Otsu
  bool defect_is_high = true;  // air-backed interface reflects more strongly
  std::size_t min_component_pixels = 2;

  static ThresholdPolicy otsu() { return {}; }
  static ThresholdPolicy at(double t) { return {t}; }
};

/// Two-class Otsu threshold over a 256-bin histogram spanning [min, max].
/// Values strictly above the returned threshold form the upper class.
inline double otsu_threshold(std::span<const double> values) {
  if (values.empty())
    throw DegenerateInputError("otsu_threshold: no values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo))
    throw DegenerateInputError("otsu_threshold: image is constant");
  constexpr std::size_t kBins = 256;
  std::vector<double> hist(kBins, 0.0);
  const double width = (hi - lo) / static_cast<double>(kBins);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    hist[std::min(b, kBins - 1)] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (std::size_t b = 0; b < kBins; ++b)
    sum_all += static_cast<double>(b) * hist[b];

  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  std::size_t best_bin = 0;
  for (std::size_t b = 0; b + 1 < kBins; ++b) {
    w0 += hist[b];
    sum0 += static_cast<double>(b) * hist[b];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0)
      continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  return lo + static_cast<double>(best_bin + 1) * width;
}

struct DefectLabelMap {
  std::size_t nx = 0, ny = 0;
  std::vector<std::int32_t> labels; // [x * ny + y], 0 = background
  std::size_t k = 0;

  std::int32_t at(std::size_t x, std::size_t y) const { return labels[x * ny + y]; }
};

/// Thresholds the slice and labels 4-connected foreground components.
/// Components below the minimum size are returned to background; survivors
/// are numbered 1..k in raster order of their first pixel.
inline DefectLabelMap segment_defects(const SliceImage &slice, const ThresholdPolicy &policy) {
  const std::size_t nx = slice.nx, ny = slice.ny;
  if (slice.pixels.size() != nx * ny || nx == 0 || ny == 0)
    throw DomainError("segment_defects: slice dimensions are inconsistent");
  const double t = policy.fixed ? *policy.fixed : otsu_threshold(slice.pixels);

  std::vector<std::uint8_t> fg(nx * ny);
  for (std::size_t i = 0; i < fg.size(); ++i)
    fg[i] = policy.defect_is_high ? slice.pixels[i] > t : slice.pixels[i] < t;

  DefectLabelMap out;
  out.nx = nx;
  out.ny = ny;
  out.labels.assign(nx * ny, 0);
  std::vector<std::size_t> stack, members;
  std::int32_t next = 0;
  for (std::size_t start = 0; start < fg.size(); ++start) {
    if (!fg[start] || out.labels[start] != 0)
      continue;
    members.clear();
    stack.assign(1, start);
    out.labels[start] = -1;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      members.push_back(p);
      const std::size_t x = p / ny, y = p % ny;
      auto visit = [&](std::size_t q) {
        if (fg[q] && out.labels[q] == 0) {
          out.labels[q] = -1;
          stack.push_back(q);
        }
      };
      if (x > 0)
        visit(p - ny);
      if (x + 1 < nx)
        visit(p + ny);
      if (y > 0)
        visit(p - 1);
      if (y + 1 < ny)
        visit(p + 1);
    }
    const bool keep = members.size() >= policy.min_component_pixels;
    const std::int32_t label = keep ? ++next : 0;
    for (std::size_t p : members)
      out.labels[p] = label;
  }
  out.k = static_cast<std::size_t>(next);
  return out;
}

/// Component areas, ascending.
inline std::vector<double> measure_areas(const DefectLabelMap &labels, double pixel_area_mm2) {
  std::vector<std::size_t> counts(labels.k, 0);
  for (std::int32_t l : labels.labels)
    if (l > 0)
      ++counts[static_cast<std::size_t>(l - 1)];
  std::vector<double> areas;
  areas.reserve(counts.size());
  for (std::size_t c : counts)
    areas.push_back(static_cast<double>(c) * pixel_area_mm2);
  std::sort(areas.begin(), areas.end());
  return areas;
}

enum class MethodTag { Raw, Morlet, Gaussian, MexicanHat };

inline std::string_view to_string(MethodTag t) {
  switch (t) {
  case MethodTag::Raw:
    return "Raw data";
  case MethodTag::Morlet:
    return "Morlet";
  case MethodTag::Gaussian:
    return "Gaussian";
  case MethodTag::MexicanHat:
    return "Mexican hat";
  }
  return "?";
}

struct DefectReport {
  std::vector<double> measured_areas_mm2;
  std::vector<double> actual_areas_mm2;
  std::vector<double> per_defect_abs_diff_mm2;
  double total_difference_mm2 = 0.0;
  double percent_difference = 0.0;
  MethodTag method_tag = MethodTag::Raw;
};

/// Pairs measured and actual areas by rank (both sorted ascending) and sums
/// the absolute differences. A count mismatch means a missed or spurious
/// defect and is an error.
inline DefectReport compute_metrics(std::vector<double> measured, std::vector<double> actual,
                                    MethodTag tag) {
  if (measured.size() != actual.size())
    throw DomainError("compute_metrics: " + std::to_string(measured.size()) +
                      " measured defects vs " + std::to_string(actual.size()) + " actual");
  std::sort(measured.begin(), measured.end());
  std::sort(actual.begin(), actual.end());
  DefectReport r;
  r.method_tag = tag;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double d = std::abs(measured[i] - actual[i]);
    r.per_defect_abs_diff_mm2.push_back(d);
    r.total_difference_mm2 += d;
  }
  const double actual_total = std::accumulate(actual.begin(), actual.end(), 0.0);
  r.percent_difference = actual_total > 0.0 ? 100.0 * r.total_difference_mm2 / actual_total : 0.0;
  r.measured_areas_mm2 = std::move(measured);
  r.actual_areas_mm2 = std::move(actual);
  return r;
}

} // namespace thz
