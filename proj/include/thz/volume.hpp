#pragma once

// 3-D scan volumes (x, y, depth) and the per-volume processing steps:
// wavelet enhancement of every A-scan, global normalization, locating the
// defect interface, and slicing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thz/cwt.hpp"
#include "thz/error.hpp"
#include "thz/parallel.hpp"

namespace thz {

enum class Provenance : std::uint8_t { Raw = 0, Morlet = 1, Gaussian = 2, MexicanHat = 3 };

inline Provenance provenance_of(WaveletKind k) {
  switch (k) {
  case WaveletKind::Morlet:
    return Provenance::Morlet;
  case WaveletKind::GaussianBell:
    return Provenance::Gaussian;
  case WaveletKind::MexicanHat:
    return Provenance::MexicanHat;
  }
  return Provenance::Raw;
}

inline std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::Raw:
    return "raw";
  case Provenance::Morlet:
    return "morlet";
  case Provenance::Gaussian:
    return "gaussian";
  case Provenance::MexicanHat:
    return "mexican-hat";
  }
  return "?";
}

/// Storage is z-fastest: each (x, y) A-scan is contiguous, columns ordered
/// with y varying fastest.
class VolumeScan {
public:
  VolumeScan() = default;
  VolumeScan(std::size_t nx, std::size_t ny, std::size_t nz, double step_xy_m, double depth_bin_m,
             Provenance provenance = Provenance::Raw)
      : nx_(nx), ny_(ny), nz_(nz), step_xy_m_(step_xy_m), depth_bin_m_(depth_bin_m),
        provenance_(provenance), data_(nx * ny * nz, 0.0) {
    if (nx == 0 || ny == 0 || nz == 0)
      throw InvariantError("VolumeScan: every dimension must be >= 1");
    if (!(step_xy_m > 0.0))
      throw InvariantError("VolumeScan: step_xy_m must be > 0");
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  std::size_t columns() const { return nx_ * ny_; }
  double step_xy_m() const { return step_xy_m_; }
  double depth_bin_m() const { return depth_bin_m_; }
  Provenance provenance() const { return provenance_; }
  bool normalized() const { return normalized_; }

  void set_provenance(Provenance p) { provenance_ = p; }
  void set_normalized(bool v) { normalized_ = v; }

  double &at(std::size_t x, std::size_t y, std::size_t z) { return data_[(x * ny_ + y) * nz_ + z]; }
  double at(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[(x * ny_ + y) * nz_ + z];
  }

  std::span<double> column(std::size_t x, std::size_t y) {
    return {data_.data() + (x * ny_ + y) * nz_, nz_};
  }
  std::span<const double> column(std::size_t x, std::size_t y) const {
    return {data_.data() + (x * ny_ + y) * nz_, nz_};
  }
  std::span<double> column(std::size_t index) { return {data_.data() + index * nz_, nz_}; }
  std::span<const double> column(std::size_t index) const {
    return {data_.data() + index * nz_, nz_};
  }

  std::vector<double> &data() { return data_; }
  const std::vector<double> &data() const { return data_; }

  bool operator==(const VolumeScan &) const = default;

private:
  std::size_t nx_ = 0, ny_ = 0, nz_ = 0;
  double step_xy_m_ = 1.0;
  double depth_bin_m_ = 1.0;
  Provenance provenance_ = Provenance::Raw;
  bool normalized_ = false;
  std::vector<double> data_;
};

struct SliceImage {
  std::size_t nx = 0, ny = 0;
  std::size_t z_index = 0;
  double step_xy_m = 1.0;
  std::vector<double> pixels; // pixels[x * ny + y]

  double at(std::size_t x, std::size_t y) const { return pixels[x * ny + y]; }
  double &at(std::size_t x, std::size_t y) { return pixels[x * ny + y]; }
};

/// Swaps the x and y axes.
inline VolumeScan transpose_xy(const VolumeScan &v) {
  VolumeScan out(v.ny(), v.nx(), v.nz(), v.step_xy_m(), v.depth_bin_m(), v.provenance());
  out.set_normalized(v.normalized());
  for (std::size_t x = 0; x < v.nx(); ++x)
    for (std::size_t y = 0; y < v.ny(); ++y)
      std::copy_n(v.column(x, y).begin(), v.nz(), out.column(y, x).begin());
  return out;
}

/// Mean A-scan over all columns.
inline std::vector<double> mean_ascan(const VolumeScan &v) {
  std::vector<double> mean(v.nz(), 0.0);
  for (std::size_t c = 0; c < v.columns(); ++c) {
    const auto col = v.column(c);
    for (std::size_t z = 0; z < v.nz(); ++z)
      mean[z] += col[z];
  }
  for (double &m : mean)
    m /= static_cast<double>(v.columns());
  return mean;
}

/// Applies enhance_ascan to every column. A FixedScale policy without a
/// scale is matched once, on the mean A-scan, so every column uses the same
/// scale.
inline VolumeScan enhance_volume(const VolumeScan &raw, WaveletKind kind, const CwtParams &params,
                                 ScalePolicy policy, unsigned threads = default_thread_count()) {
  if (raw.provenance() != Provenance::Raw)
    throw DomainError("enhance_volume: input volume is already enhanced");
  if (raw.nz() < 2)
    throw DomainError("enhance_volume: depth axis needs at least two samples");
  params.validate();
  if (policy.mode == ScalePolicy::Mode::FixedScale && !policy.scale) {
    const auto mean = mean_ascan(raw);
    if (std::any_of(mean.begin(), mean.end(), [](double v) { return v != 0.0; }))
      policy.scale = match_scale(mean);
  }
  VolumeScan out(raw.nx(), raw.ny(), raw.nz(), raw.step_xy_m(), raw.depth_bin_m(),
                 provenance_of(kind));
  parallel_for(raw.columns(), threads, [&](std::size_t c) {
    const auto e = enhance_samples(raw.column(c), kind, params, policy);
    std::copy(e.begin(), e.end(), out.column(c).begin());
  });
  return out;
}

inline double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values)
    m = std::max(m, std::abs(v));
  return m;
}

/// Global rescale so the largest magnitude becomes one.
inline VolumeScan normalize_volume(const VolumeScan &v) {
  const double m = max_abs(v.data());
  if (!(m > 0.0))
    throw DegenerateInputError("normalize_volume: volume is all zeros");
  VolumeScan out = v;
  if (m != 1.0)
    for (double &x : out.data())
      x /= m;
  out.set_normalized(true);
  return out;
}

inline double slice_variance(const VolumeScan &v, std::size_t z) {
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t c = 0; c < v.columns(); ++c) {
    const double x = v.column(c)[z];
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(v.columns());
  const double mean = sum / n;
  return std::max(0.0, sum2 / n - mean * mean);
}

/// Depth bin in [z_lo, z_hi) whose XY slice has the largest spatial variance.
/// Ties resolve to the shallowest bin.
inline std::size_t locate_interface_b(const VolumeScan &v, std::size_t z_lo, std::size_t z_hi) {
  if (!(z_lo < z_hi))
    throw DomainError("locate_interface_b: search window is empty");
  if (z_hi > v.nz())
    throw DomainError("locate_interface_b: search window exceeds the depth axis");
  std::size_t best = z_lo;
  double best_var = -1.0;
  for (std::size_t z = z_lo; z < z_hi; ++z) {
    const double var = slice_variance(v, z);
    if (var > best_var) {
      best_var = var;
      best = z;
    }
  }
  return best;
}

inline SliceImage extract_slice(const VolumeScan &v, std::size_t z) {
  if (z >= v.nz())
    throw DomainError("extract_slice: depth index out of range");
  SliceImage s;
  s.nx = v.nx();
  s.ny = v.ny();
  s.z_index = z;
  s.step_xy_m = v.step_xy_m();
  s.pixels.resize(v.columns());
  for (std::size_t c = 0; c < v.columns(); ++c)
    s.pixels[c] = v.column(c)[z];
  return s;
}

} // namespace thz
