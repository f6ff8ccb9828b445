#pragma once

// FMCW interferometry model: beat frequency <-> path difference mapping,
// interference fringe intensity, and synthesis of depth profiles (A-scans)
// from a list of point reflectors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "thz/error.hpp"

namespace thz {

inline constexpr double kSpeedOfLight = 299792458.0;

struct SweepConfig {
  double sweep_period_s = 240e-6;
  double freq_span_hz = 90e9;
  double band_start_hz = 0.23e12;
  double band_end_hz = 0.32e12;
  std::size_t n_time_samples = 512;
  double propagation_speed_mps = kSpeedOfLight;

  void validate() const {
    auto fail = [](const std::string &m) { throw InvariantError("SweepConfig: " + m); };
    if (!(sweep_period_s > 0.0))
      fail("sweep_period_s must be > 0");
    if (!(freq_span_hz > 0.0))
      fail("freq_span_hz must be > 0");
    if (!(propagation_speed_mps > 0.0))
      fail("propagation_speed_mps must be > 0");
    const double span = band_end_hz - band_start_hz;
    if (!(std::abs(span - freq_span_hz) <= 1e-6 * freq_span_hz))
      fail("band_end_hz - band_start_hz must equal freq_span_hz");
    if (n_time_samples < 2)
      fail("n_time_samples must be >= 2");
  }

  double sample_interval_s() const {
    return sweep_period_s / static_cast<double>(n_time_samples);
  }
  double nyquist_hz() const { return 0.5 / sample_interval_s(); }
};

/// Depth grid of a synthesized A-scan. Bin k sits at path difference k * bin_m.
struct DepthAxis {
  std::size_t n_bins = 512;
  double bin_m = 0.25e-3;

  double path_at(std::size_t k) const { return static_cast<double>(k) * bin_m; }
  std::size_t nearest_bin(double path_m) const {
    return static_cast<std::size_t>(std::llround(path_m / bin_m));
  }
  void validate() const {
    if (n_bins < 1)
      throw InvariantError("DepthAxis: n_bins must be >= 1");
    if (!(bin_m > 0.0))
      throw InvariantError("DepthAxis: bin_m must be > 0");
  }
};

struct Reflector {
  double path_difference_m = 0.0; // two-way optical path difference
  double reflectivity = 0.0;
};

/// Fringe parameters. The chirp rate is the angular sweep rate
/// 2*pi*freq_span / sweep_period; the carrier is the band-start angular
/// frequency, which sets the fringe phase offset carrier * dL / c.
struct InterferenceParams {
  double i1 = 0.5;
  double i2 = 0.5;
  double visibility = 1.0;
  double initial_phase_rad = 0.0;
  double chirp_rate_rad_per_s2 = 0.0;
  double carrier_rad_per_s = 0.0;
  double propagation_speed_mps = kSpeedOfLight;

  static InterferenceParams from_sweep(const SweepConfig &sweep, double i1 = 0.5,
                                       double i2 = 0.5, double visibility = 1.0) {
    InterferenceParams p;
    p.i1 = i1;
    p.i2 = i2;
    p.visibility = visibility;
    p.chirp_rate_rad_per_s2 =
        2.0 * std::numbers::pi * sweep.freq_span_hz / sweep.sweep_period_s;
    p.carrier_rad_per_s = 2.0 * std::numbers::pi * sweep.band_start_hz;
    p.propagation_speed_mps = sweep.propagation_speed_mps;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(i1 >= 0.0) || !(i2 >= 0.0))
      throw InvariantError("InterferenceParams: intensities must be >= 0");
    if (!(visibility >= 0.0 && visibility <= 1.0))
      throw InvariantError("InterferenceParams: visibility must lie in [0, 1]");
    if (!(propagation_speed_mps > 0.0))
      throw InvariantError("InterferenceParams: propagation speed must be > 0");
  }

  double total_intensity() const { return i1 + i2; }
};

/// Depth-resolved magnitude profile at one raster position.
struct AScan {
  std::vector<double> samples;
  double bin_m = 0.0;

  std::size_t size() const { return samples.size(); }
};

/// f_b = freq_span * dL / (c * T_m).
inline double beat_frequency(const SweepConfig &sweep, double path_difference_m) {
  if (!(path_difference_m >= 0.0))
    throw DomainError("beat_frequency: path difference must be >= 0");
  return sweep.freq_span_hz * path_difference_m /
         (sweep.propagation_speed_mps * sweep.sweep_period_s);
}

inline double range_from_beat(const SweepConfig &sweep, double beat_hz) {
  if (!(beat_hz >= 0.0))
    throw DomainError("range_from_beat: beat frequency must be >= 0");
  return beat_hz * sweep.propagation_speed_mps * sweep.sweep_period_s / sweep.freq_span_hz;
}

inline double beat_frequency(const InterferenceParams &p, double path_difference_m) {
  if (!(path_difference_m >= 0.0))
    throw DomainError("beat_frequency: path difference must be >= 0");
  return p.chirp_rate_rad_per_s2 * path_difference_m /
         (2.0 * std::numbers::pi * p.propagation_speed_mps);
}

/// (I1 + I2) * [1 + V cos(2 pi f_b t + phi0)], phi0 = carrier * dL / c + initial phase.
inline double interference_intensity(const InterferenceParams &p, double path_difference_m,
                                     double t_s) {
  const double fb = beat_frequency(p, path_difference_m);
  const double phi0 =
      p.carrier_rad_per_s * path_difference_m / p.propagation_speed_mps + p.initial_phase_rad;
  return p.total_intensity() *
         (1.0 + p.visibility * std::cos(2.0 * std::numbers::pi * fb * t_s + phi0));
}

/// Independent RNG stream for a raster position.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t x = 0, std::uint64_t y = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
  return std::mt19937_64(seq);
}

/// Time-domain beat signal over one sweep: the DC level plus one fringe per
/// reflector, weighted by its reflectivity, with optional white Gaussian noise
/// of standard deviation noise_sigma * (I1 + I2).
template <class Rng>
std::vector<double> synthesize_beat_signal(const SweepConfig &sweep, const InterferenceParams &p,
                                           std::span<const Reflector> reflectors,
                                           double noise_sigma, Rng &rng) {
  const std::size_t n = sweep.n_time_samples;
  const double dt = sweep.sample_interval_s();
  const double scale = p.total_intensity();
  std::vector<double> s(n, scale);
  for (const Reflector &r : reflectors) {
    if (r.reflectivity == 0.0)
      continue;
    const double w = 2.0 * std::numbers::pi * beat_frequency(p, r.path_difference_m);
    const double phi0 =
        p.carrier_rad_per_s * r.path_difference_m / p.propagation_speed_mps + p.initial_phase_rad;
    const double amp = scale * p.visibility * r.reflectivity;
    for (std::size_t i = 0; i < n; ++i)
      s[i] += amp * std::cos(w * static_cast<double>(i) * dt + phi0);
  }
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise_sigma * scale);
    for (double &v : s)
      v += gauss(rng);
  }
  return s;
}

/// Converts beat signals into depth profiles: mean removal, Hann window, then
/// a direct Fourier sum evaluated at the beat frequency of every depth bin.
/// The magnitude is scaled so a reflector of unit reflectivity with V = 1
/// peaks at I1 + I2.
class DepthProfiler {
public:
  DepthProfiler(const SweepConfig &sweep, const DepthAxis &axis) : axis_(axis) {
    sweep.validate();
    axis.validate();
    const std::size_t n = sweep.n_time_samples;
    const double max_beat = beat_frequency(sweep, axis.path_at(axis.n_bins - 1));
    if (max_beat > sweep.nyquist_hz())
      throw DomainError("DepthProfiler: depth axis exceeds the sampling Nyquist range");

    window_.resize(n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(n));
      wsum += window_[i];
    }
    gain_ = 2.0 / wsum;

    const double dt = sweep.sample_interval_s();
    cos_.resize(axis.n_bins * n);
    sin_.resize(axis.n_bins * n);
    for (std::size_t k = 0; k < axis.n_bins; ++k) {
      const double w = 2.0 * std::numbers::pi * beat_frequency(sweep, axis.path_at(k)) * dt;
      for (std::size_t i = 0; i < n; ++i) {
        // reduce the phase before the trig call so large k*i stay accurate
        const double ph = std::fmod(w * static_cast<double>(i), 2.0 * std::numbers::pi);
        cos_[k * n + i] = std::cos(ph) * window_[i];
        sin_[k * n + i] = std::sin(ph) * window_[i];
      }
    }
  }

  const DepthAxis &axis() const { return axis_; }
  std::size_t n_time_samples() const { return window_.size(); }

  AScan profile(std::span<const double> beat) const {
    const std::size_t n = window_.size();
    if (beat.size() != n)
      throw DomainError("DepthProfiler: beat signal length does not match the sweep");
    double mean = 0.0;
    for (double v : beat)
      mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(beat.begin(), beat.end());
    for (double &v : centered)
      v -= mean;

    AScan out;
    out.bin_m = axis_.bin_m;
    out.samples.resize(axis_.n_bins);
    for (std::size_t k = 0; k < axis_.n_bins; ++k) {
      const double *c = &cos_[k * n];
      const double *s = &sin_[k * n];
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        re += c[i] * centered[i];
        im += s[i] * centered[i];
      }
      out.samples[k] = gain_ * std::hypot(re, im);
    }
    return out;
  }

private:
  DepthAxis axis_;
  std::vector<double> window_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double gain_ = 1.0;
};

inline void check_reflectors(std::span<const Reflector> reflectors, const DepthAxis &axis) {
  if (reflectors.empty())
    throw DomainError("synthesize_ascan: reflector list is empty");
  const double extent = axis.path_at(axis.n_bins - 1);
  for (const Reflector &r : reflectors) {
    if (!(r.path_difference_m >= 0.0))
      throw DomainError("synthesize_ascan: reflector path difference must be >= 0");
    if (!(r.reflectivity >= 0.0))
      throw DomainError("synthesize_ascan: reflectivity must be >= 0");
    if (r.path_difference_m > extent)
      throw DomainError("synthesize_ascan: reflector lies beyond the depth axis");
  }
}

template <class Rng>
AScan synthesize_ascan(const DepthProfiler &profiler, const SweepConfig &sweep,
                       const InterferenceParams &params, std::span<const Reflector> reflectors,
                       double noise_sigma, Rng &rng) {
  check_reflectors(reflectors, profiler.axis());
  if (!(noise_sigma >= 0.0))
    throw DomainError("synthesize_ascan: noise_sigma must be >= 0");
  const auto beat = synthesize_beat_signal(sweep, params, reflectors, noise_sigma, rng);
  return profiler.profile(beat);
}

inline AScan synthesize_ascan(const SweepConfig &sweep, const InterferenceParams &params,
                              const DepthAxis &axis, std::span<const Reflector> reflectors,
                              double noise_sigma, std::uint64_t rng_seed) {
  check_reflectors(reflectors, axis);
  const DepthProfiler profiler(sweep, axis);
  auto rng = make_stream(rng_seed);
  return synthesize_ascan(profiler, sweep, params, reflectors, noise_sigma, rng);
}

} // namespace thz
