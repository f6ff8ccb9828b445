#pragma once

// Continuous wavelet transform of sampled depth profiles.
//
//   W(a, b) = a^{-1/2} * sum_t f(t) * psi((t - b) / a)      (unit sample spacing)
//
// with the three real, even mother functions
//   Morlet       psi(x) = exp(-x^2 / 2) * cos(5x)
//   GaussianBell psi(x) = exp(-x^2)
//   MexicanHat   psi(x) = (1 - x^2) * exp(-x^2 / 2)
//
// The kernels are used exactly as written, without admissibility corrections
// or normalization constants. Each kernel is truncated to |x| <= kKernelRadius.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thz/error.hpp"
#include "thz/fmcw.hpp"

namespace thz {

enum class WaveletKind { Morlet, GaussianBell, MexicanHat };

inline constexpr WaveletKind kAllWavelets[] = {WaveletKind::Morlet, WaveletKind::GaussianBell,
                                               WaveletKind::MexicanHat};

/// Beyond this radius every kernel is below 3e-16 in magnitude.
inline constexpr double kKernelRadius = 9.0;

inline std::string_view to_string(WaveletKind k) {
  switch (k) {
  case WaveletKind::Morlet:
    return "morlet";
  case WaveletKind::GaussianBell:
    return "gaussian";
  case WaveletKind::MexicanHat:
    return "mexican-hat";
  }
  return "?";
}

inline std::optional<WaveletKind> parse_wavelet(std::string_view s) {
  for (WaveletKind k : kAllWavelets)
    if (s == to_string(k))
      return k;
  return std::nullopt;
}

inline double wavelet_eval(WaveletKind kind, double x) {
  if (!std::isfinite(x))
    throw DomainError("wavelet_eval: argument must be finite");
  const double x2 = x * x;
  switch (kind) {
  case WaveletKind::Morlet:
    return std::exp(-0.5 * x2) * std::cos(5.0 * x);
  case WaveletKind::GaussianBell:
    return std::exp(-x2);
  case WaveletKind::MexicanHat:
    return (1.0 - x2) * std::exp(-0.5 * x2);
  }
  throw DomainError("wavelet_eval: unknown wavelet kind");
}

enum class Boundary { ZeroPad, Reflect };

struct CwtParams {
  std::vector<double> scales;
  std::size_t translation_stride = 1;
  Boundary boundary = Boundary::ZeroPad;

  void validate() const {
    if (scales.empty())
      throw InvariantError("CwtParams: scale list is empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
      if (!(scales[i] > 0.0) || !std::isfinite(scales[i]))
        throw InvariantError("CwtParams: scales must be finite and > 0");
      if (i > 0 && !(scales[i] > scales[i - 1]))
        throw InvariantError("CwtParams: scales must be strictly increasing");
    }
    if (translation_stride < 1)
      throw InvariantError("CwtParams: translation stride must be >= 1");
  }

  /// n log-spaced scales whose kernel width (2a, the Mexican-hat zero-crossing
  /// span) runs from min_width to max_width samples.
  static CwtParams log_grid(std::size_t n = 16, double min_width = 2.0, double max_width = 64.0) {
    CwtParams p;
    const double lo = std::log(min_width / 2.0);
    const double hi = std::log(max_width / 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      p.scales.push_back(std::exp(lo + f * (hi - lo)));
    }
    return p;
  }
};

struct CwtCoefficients {
  std::vector<double> values; // row-major (scale_index, translation_index)
  std::vector<double> scales;
  std::size_t source_length = 0;
  std::size_t translation_stride = 1;
  std::size_t n_translations = 0;

  double at(std::size_t scale_index, std::size_t translation_index) const {
    return values[scale_index * n_translations + translation_index];
  }
  std::span<const double> row(std::size_t scale_index) const {
    return {values.data() + scale_index * n_translations, n_translations};
  }
};

namespace detail {

/// Mirror index without repeating the edge sample (d c b | a b c d | c b a).
inline std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0)
    i += period;
  return i < n ? i : period - i;
}

inline std::vector<double> sampled_kernel(WaveletKind kind, double scale, std::ptrdiff_t radius) {
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  const double norm = 1.0 / std::sqrt(scale);
  for (std::ptrdiff_t m = -radius; m <= radius; ++m)
    k[static_cast<std::size_t>(m + radius)] =
        norm * wavelet_eval(kind, static_cast<double>(m) / scale);
  return k;
}

} // namespace detail

inline CwtCoefficients cwt_transform(std::span<const double> signal, WaveletKind kind,
                                     const CwtParams &params) {
  if (signal.size() < 2)
    throw DomainError("cwt_transform: signal needs at least two samples");
  params.validate();

  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const std::size_t stride = params.translation_stride;
  CwtCoefficients out;
  out.scales = params.scales;
  out.source_length = signal.size();
  out.translation_stride = stride;
  out.n_translations = (signal.size() + stride - 1) / stride;
  out.values.assign(params.scales.size() * out.n_translations, 0.0);

  for (std::size_t si = 0; si < params.scales.size(); ++si) {
    const double a = params.scales[si];
    const auto radius = static_cast<std::ptrdiff_t>(std::floor(kKernelRadius * a));
    const auto kernel = detail::sampled_kernel(kind, a, radius);
    double *row = out.values.data() + si * out.n_translations;
    for (std::size_t j = 0; j < out.n_translations; ++j) {
      const auto b = static_cast<std::ptrdiff_t>(j * stride);
      double acc = 0.0;
      if (params.boundary == Boundary::ZeroPad) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-radius, -b);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(radius, n - 1 - b);
        for (std::ptrdiff_t m = lo; m <= hi; ++m)
          acc += signal[static_cast<std::size_t>(b + m)] *
                 kernel[static_cast<std::size_t>(m + radius)];
      } else {
        for (std::ptrdiff_t m = -radius; m <= radius; ++m)
          acc += signal[static_cast<std::size_t>(detail::reflect_index(b + m, n))] *
                 kernel[static_cast<std::size_t>(m + radius)];
      }
      row[j] = acc;
    }
  }
  return out;
}

inline CwtCoefficients cwt_transform(const AScan &signal, WaveletKind kind,
                                     const CwtParams &params) {
  return cwt_transform(std::span<const double>(signal.samples), kind, params);
}

/// FixedScale evaluates |W(a*, .)| at one matched scale; an unset scale is
/// matched to the input itself. MaxOverScales takes max_a |W(a, .)| over
/// the CwtParams grid.
struct ScalePolicy {
  enum class Mode { FixedScale, MaxOverScales };
  Mode mode = Mode::FixedScale;
  std::optional<double> scale;

  static ScalePolicy fixed(double a) { return {Mode::FixedScale, a}; }
  static ScalePolicy matched() { return {Mode::FixedScale, std::nullopt}; }
  static ScalePolicy max_over_scales() { return {Mode::MaxOverScales, std::nullopt}; }
};

/// Full width at half maximum of every local peak reaching at least
/// min_rel_height of the global maximum. Each half-height crossing is linearly
/// interpolated; a flank that turns upward before reaching half height ends at
/// its local minimum.
inline std::vector<double> peak_widths(std::span<const double> s, double min_rel_height = 0.1) {
  std::vector<double> widths;
  if (s.size() < 3)
    return widths;
  const double gmax = *std::max_element(s.begin(), s.end());
  if (!(gmax > 0.0))
    return widths;
  const std::size_t n = s.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] >= min_rel_height * gmax))
      continue;
    const double half = 0.5 * s[i];
    double left = 0.0;
    std::size_t l = i;
    while (l > 0 && s[l - 1] > half && s[l - 1] <= s[l])
      --l;
    if (l > 0 && s[l - 1] <= half)
      left = static_cast<double>(l - 1) + (half - s[l - 1]) / (s[l] - s[l - 1]);
    else
      left = static_cast<double>(l);
    double right = 0.0;
    std::size_t r = i;
    while (r + 1 < n && s[r + 1] > half && s[r + 1] <= s[r])
      ++r;
    if (r + 1 < n && s[r + 1] <= half)
      right = static_cast<double>(r) + (s[r] - half) / (s[r] - s[r + 1]);
    else
      right = static_cast<double>(r);
    widths.push_back(right - left);
  }
  return widths;
}

/// Scale whose kernel envelope matches the median peak of the reference:
/// a* = FWHM / (2 sqrt(2 ln 2)), the standard deviation of a Gaussian peak of
/// that width, which is also the Mexican-hat zero-crossing half-width.
inline double match_scale(std::span<const double> reference) {
  auto widths = peak_widths(reference);
  if (widths.empty())
    throw DegenerateInputError("match_scale: reference signal has no peaks");
  std::sort(widths.begin(), widths.end());
  const std::size_t m = widths.size() / 2;
  const double median = widths.size() % 2 ? widths[m] : 0.5 * (widths[m - 1] + widths[m]);
  return std::max(0.5, median / (2.0 * std::sqrt(2.0 * std::log(2.0))));
}

inline std::vector<double> enhance_samples(std::span<const double> signal, WaveletKind kind,
                                           const CwtParams &params, const ScalePolicy &policy) {
  if (params.translation_stride != 1)
    throw DomainError("enhance_ascan: enhancement requires translation stride 1");
  std::vector<double> out(signal.size(), 0.0);
  if (policy.mode == ScalePolicy::Mode::FixedScale) {
    const bool all_zero =
        std::all_of(signal.begin(), signal.end(), [](double v) { return v == 0.0; });
    if (all_zero && signal.size() >= 2)
      return out;
    CwtParams single = params;
    single.scales = {policy.scale ? *policy.scale : match_scale(signal)};
    const auto w = cwt_transform(signal, kind, single);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::abs(w.values[i]);
  } else {
    const auto w = cwt_transform(signal, kind, params);
    for (std::size_t si = 0; si < w.scales.size(); ++si) {
      const auto row = w.row(si);
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::max(out[i], std::abs(row[i]));
    }
  }
  return out;
}

inline AScan enhance_ascan(const AScan &signal, WaveletKind kind, const CwtParams &params,
                           const ScalePolicy &policy) {
  return {enhance_samples(signal.samples, kind, params, policy), signal.bin_m};
}

} // namespace thz
