#pragma once

// Per-method processing chain shared by the CLI and the acceptance suite:
//   [enhance] -> normalize -> locate interface 'b' -> slice -> segment -> measure -> metrics

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "thz/cwt.hpp"
#include "thz/io.hpp"
#include "thz/segmentation.hpp"
#include "thz/volume.hpp"

namespace thz {

struct ProcessOptions {
  CwtParams cwt = CwtParams::log_grid();
  ScalePolicy scale_policy = ScalePolicy::matched();
  std::optional<std::size_t> z_index;
  std::optional<std::pair<std::size_t, std::size_t>> z_window; // [lo, hi)
  ThresholdPolicy threshold = ThresholdPolicy::otsu();
  unsigned threads = default_thread_count();
};

struct MethodResult {
  MethodTag method = MethodTag::Raw;
  std::size_t z_index = 0;
  SliceImage slice;
  DefectLabelMap labels;
  std::vector<double> areas_mm2;
  std::optional<DefectReport> report; // set when the defect count matches the truth
};

inline std::optional<WaveletKind> wavelet_of(MethodTag m) {
  switch (m) {
  case MethodTag::Morlet:
    return WaveletKind::Morlet;
  case MethodTag::Gaussian:
    return WaveletKind::GaussianBell;
  case MethodTag::MexicanHat:
    return WaveletKind::MexicanHat;
  case MethodTag::Raw:
    break;
  }
  return std::nullopt;
}

/// Window between the midpoints of a-b and b-c, in depth bins.
inline std::pair<std::size_t, std::size_t> interface_window(const TruthSummary &truth,
                                                            double depth_bin_m, std::size_t nz) {
  const double lo = 0.5 * (truth.interface_a_path_m + truth.interface_b_path_m) / depth_bin_m;
  const double hi = 0.5 * (truth.interface_b_path_m + truth.interface_c_path_m) / depth_bin_m;
  const auto zlo = static_cast<std::size_t>(std::max(0.0, std::ceil(lo)));
  const auto zhi = std::min(nz, static_cast<std::size_t>(std::max(0.0, std::floor(hi))) + 1);
  return {std::min(zlo, nz), zhi};
}

inline MethodResult run_method(const VolumeScan &raw, MethodTag method,
                               const ProcessOptions &opt,
                               const std::vector<double> *actual_areas_mm2 = nullptr) {
  MethodResult r;
  r.method = method;
  VolumeScan normalized = [&] {
    if (const auto kind = wavelet_of(method))
      return normalize_volume(enhance_volume(raw, *kind, opt.cwt, opt.scale_policy, opt.threads));
    return normalize_volume(raw);
  }();

  if (opt.z_index) {
    r.z_index = *opt.z_index;
  } else if (opt.z_window) {
    r.z_index = locate_interface_b(normalized, opt.z_window->first, opt.z_window->second);
  } else {
    throw DomainError("run_method: neither a depth index nor a search window was given");
  }
  r.slice = extract_slice(normalized, r.z_index);
  r.labels = segment_defects(r.slice, opt.threshold);
  const double pixel_mm = raw.step_xy_m() * 1e3;
  r.areas_mm2 = measure_areas(r.labels, pixel_mm * pixel_mm);
  if (actual_areas_mm2 && actual_areas_mm2->size() == r.areas_mm2.size())
    r.report = compute_metrics(r.areas_mm2, *actual_areas_mm2, method);
  return r;
}

} // namespace thz
