#pragma once

// Parametric layered heat-shield sample with circular air holes in one layer,
// and its point-by-point raster scan through the FMCW model.
//
// Geometry along the beam (one-way depths, measured from the probe reference):
//
//   standoff            -> interface 'a' (top surface, top of layer 0)
//   + layer thicknesses -> top of each following layer; the top of the
//                          defect layer is interface 'b'
//   bottom of the stack -> interface 'c' (reflecting platform)
//
// A reflector at one-way depth d has path difference 2 d.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "thz/error.hpp"
#include "thz/fmcw.hpp"
#include "thz/parallel.hpp"
#include "thz/volume.hpp"

namespace thz {

struct Layer {
  std::string name;
  double thickness_m = 0.0;
  double top_reflectivity = 0.0;
};

struct Hole {
  double diameter_m = 0.0;
  double center_x_m = 0.0;
  double center_y_m = 0.0;

  double radius_m() const { return 0.5 * diameter_m; }
};

struct PhantomSpec {
  std::vector<Layer> layers;
  std::size_t defect_layer_index = 1;
  std::vector<Hole> holes;
  double hole_reflectivity = 0.6; // interface 'b' backed by air
  double platform_reflectivity = 1.0;
  double standoff_m = 15e-3;
  double scan_step_m = 1e-3;
  std::size_t grid_nx = 60;
  std::size_t grid_ny = 40;
  double beam_waist_m = 0.0; // 0: ideal point sampling
  std::size_t clutter_count = 3;
  double clutter_max_reflectivity = 0.05;
  std::uint64_t clutter_seed = 0;

  /// Six holes (3..13 mm) in a 0.2 mm resin layer between a 3 mm composite
  /// and a 2 mm pad, scanned at 1 mm over a 60 x 40 grid. Holes sit in two
  /// rows of three with at least 4 mm between edges, centers on grid points.
  static PhantomSpec six_hole_default() {
    PhantomSpec s;
    s.layers = {{"composite", 3e-3, 0.5}, {"resin", 0.2e-3, 0.2}, {"pad", 2e-3, 0.0}};
    s.defect_layer_index = 1;
    s.holes = {{3e-3, 7e-3, 9e-3},   {5e-3, 15e-3, 9e-3},  {7e-3, 25e-3, 9e-3},
               {9e-3, 10e-3, 23e-3}, {11e-3, 24e-3, 23e-3}, {13e-3, 40e-3, 23e-3}};
    return s;
  }

  double grid_extent_x_m() const { return static_cast<double>(grid_nx - 1) * scan_step_m; }
  double grid_extent_y_m() const { return static_cast<double>(grid_ny - 1) * scan_step_m; }

  void validate() const {
    auto fail = [](const std::string &m) { throw InvariantError("PhantomSpec: " + m); };
    if (layers.empty())
      fail("layer stack is empty");
    for (const Layer &l : layers) {
      if (!(l.thickness_m > 0.0))
        fail("layer '" + l.name + "' must have thickness > 0");
      if (!(l.top_reflectivity >= 0.0))
        fail("layer '" + l.name + "' must have reflectivity >= 0");
    }
    if (defect_layer_index >= layers.size())
      fail("defect_layer_index is outside the layer stack");
    if (!(hole_reflectivity >= 0.0) || !(platform_reflectivity >= 0.0))
      fail("reflectivities must be >= 0");
    if (!(standoff_m >= 0.0))
      fail("standoff must be >= 0");
    if (!(scan_step_m > 0.0))
      fail("scan_step_m must be > 0");
    if (grid_nx < 1 || grid_ny < 1)
      fail("grid dimensions must be >= 1");
    if (!(beam_waist_m >= 0.0))
      fail("beam waist must be >= 0");
    if (!(clutter_max_reflectivity >= 0.0))
      fail("clutter reflectivity bound must be >= 0");
    for (std::size_t i = 0; i < holes.size(); ++i) {
      const Hole &h = holes[i];
      const std::string tag = "hole " + std::to_string(i + 1);
      if (!(h.diameter_m > 0.0))
        fail(tag + " diameter must be > 0");
      const double r = h.radius_m();
      if (h.center_x_m - r < 0.0 || h.center_x_m + r > grid_extent_x_m() ||
          h.center_y_m - r < 0.0 || h.center_y_m + r > grid_extent_y_m())
        fail(tag + " does not lie fully inside the scanned grid");
      for (std::size_t j = 0; j < i; ++j) {
        const Hole &o = holes[j];
        const double d = std::hypot(h.center_x_m - o.center_x_m, h.center_y_m - o.center_y_m);
        if (!(d > r + o.radius_m()))
          fail(tag + " overlaps hole " + std::to_string(j + 1));
      }
    }
  }
};

/// Everything the scan needs besides the sample.
struct Acquisition {
  SweepConfig sweep;
  DepthAxis axis;
  double i1 = 0.5;
  double i2 = 0.5;
  double visibility = 1.0;

  InterferenceParams interference() const {
    return InterferenceParams::from_sweep(sweep, i1, i2, visibility);
  }
};

struct GroundTruth {
  std::vector<double> per_defect_area_m2;          // pi r^2
  std::vector<double> per_defect_area_m2_rounded_pi; // 3.14 r^2, as tabulated by hand
  std::vector<std::size_t> per_defect_mask_pixels;
  std::vector<std::uint8_t> defect_mask; // [x * ny + y]
  std::size_t nx = 0, ny = 0;
  double interface_a_path_m = 0.0;
  double interface_b_path_m = 0.0;
  double interface_c_path_m = 0.0;

  bool in_defect(std::size_t x, std::size_t y) const { return defect_mask[x * ny + y] != 0; }
};

class Phantom {
public:
  const PhantomSpec &spec() const { return spec_; }
  const GroundTruth &truth() const { return truth_; }
  std::size_t nx() const { return spec_.grid_nx; }
  std::size_t ny() const { return spec_.grid_ny; }

  const std::vector<Reflector> &reflectors(std::size_t x, std::size_t y) const {
    return pixels_[x * spec_.grid_ny + y];
  }
  /// Position of the interface-'b' entry in every reflector list.
  std::size_t interface_b_entry() const { return b_entry_; }

private:
  friend Phantom build_phantom(const PhantomSpec &spec);
  PhantomSpec spec_;
  GroundTruth truth_;
  std::vector<std::vector<Reflector>> pixels_;
  std::size_t b_entry_ = 0;
};

namespace detail {

// Separable Gaussian blur of an (nx, ny) map with edge renormalization.
inline std::vector<double> gaussian_blur(const std::vector<double> &map, std::size_t nx,
                                         std::size_t ny, double sigma_px) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_px));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t i = -radius; i <= radius; ++i)
    k[static_cast<std::size_t>(i + radius)] =
        std::exp(-0.5 * static_cast<double>(i * i) / (sigma_px * sigma_px));
  auto pass = [&](const std::vector<double> &in, bool along_x) {
    std::vector<double> out(in.size());
    const auto nxs = static_cast<std::ptrdiff_t>(nx), nys = static_cast<std::ptrdiff_t>(ny);
    for (std::ptrdiff_t x = 0; x < nxs; ++x)
      for (std::ptrdiff_t y = 0; y < nys; ++y) {
        double acc = 0.0, wsum = 0.0;
        for (std::ptrdiff_t m = -radius; m <= radius; ++m) {
          const std::ptrdiff_t xx = along_x ? x + m : x;
          const std::ptrdiff_t yy = along_x ? y : y + m;
          if (xx < 0 || xx >= nxs || yy < 0 || yy >= nys)
            continue;
          const double w = k[static_cast<std::size_t>(m + radius)];
          acc += w * in[static_cast<std::size_t>(xx * nys + yy)];
          wsum += w;
        }
        out[static_cast<std::size_t>(x * nys + y)] = acc / wsum;
      }
    return out;
  };
  return pass(pass(map, true), false);
}

inline constexpr std::uint64_t kClutterStreamTag = 0x636c7574746572ull; // "clutter"

} // namespace detail

inline Phantom build_phantom(const PhantomSpec &spec) {
  spec.validate();
  Phantom ph;
  ph.spec_ = spec;
  const std::size_t nx = spec.grid_nx, ny = spec.grid_ny;

  // interface depths
  std::vector<double> tops;
  double depth = spec.standoff_m;
  for (const Layer &l : spec.layers) {
    tops.push_back(depth);
    depth += l.thickness_m;
  }
  const double bottom = depth;

  GroundTruth &gt = ph.truth_;
  gt.nx = nx;
  gt.ny = ny;
  gt.interface_a_path_m = 2.0 * tops.front();
  gt.interface_b_path_m = 2.0 * tops[spec.defect_layer_index];
  gt.interface_c_path_m = 2.0 * bottom;
  gt.defect_mask.assign(nx * ny, 0);
  for (const Hole &h : spec.holes) {
    const double r = h.radius_m();
    gt.per_defect_area_m2.push_back(std::numbers::pi * r * r);
    gt.per_defect_area_m2_rounded_pi.push_back(3.14 * r * r);
    std::size_t count = 0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        const double dx = static_cast<double>(x) * spec.scan_step_m - h.center_x_m;
        const double dy = static_cast<double>(y) * spec.scan_step_m - h.center_y_m;
        if (dx * dx + dy * dy <= r * r) {
          gt.defect_mask[x * ny + y] = 1;
          ++count;
        }
      }
    gt.per_defect_mask_pixels.push_back(count);
  }

  const double b_resin = spec.layers[spec.defect_layer_index].top_reflectivity;
  std::vector<double> b_map(nx * ny);
  for (std::size_t i = 0; i < b_map.size(); ++i)
    b_map[i] = gt.defect_mask[i] ? spec.hole_reflectivity : b_resin;
  if (spec.beam_waist_m > 0.0)
    b_map = detail::gaussian_blur(b_map, nx, ny, 0.5 * spec.beam_waist_m / spec.scan_step_m);

  const bool clutter = spec.clutter_count > 0 && spec.clutter_max_reflectivity > 0.0 &&
                       spec.defect_layer_index > 0;
  ph.pixels_.resize(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      auto &list = ph.pixels_[x * ny + y];
      for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        if (li == spec.defect_layer_index) {
          if (clutter) {
            auto rng = make_stream(spec.clutter_seed ^ detail::kClutterStreamTag, x, y);
            std::uniform_real_distribution<double> where(gt.interface_a_path_m,
                                                         gt.interface_b_path_m);
            std::uniform_real_distribution<double> strength(0.0, spec.clutter_max_reflectivity);
            for (std::size_t c = 0; c < spec.clutter_count; ++c) {
              const double p = where(rng);
              list.push_back({p, strength(rng)});
            }
          }
          ph.b_entry_ = list.size();
          list.push_back({2.0 * tops[li], b_map[x * ny + y]});
        } else {
          list.push_back({2.0 * tops[li], spec.layers[li].top_reflectivity});
        }
      }
      list.push_back({gt.interface_c_path_m, spec.platform_reflectivity});
    }
  return ph;
}

/// Raster scan: one synthesized A-scan per pixel, noise drawn from an
/// independent stream per (seed, x, y) so the result is scheduling-independent.
inline VolumeScan scan_phantom(const Phantom &phantom, const Acquisition &acq, double noise_sigma,
                               std::uint64_t rng_seed, unsigned threads = default_thread_count()) {
  acq.sweep.validate();
  const InterferenceParams params = acq.interference();
  const DepthProfiler profiler(acq.sweep, acq.axis);
  const std::size_t nx = phantom.nx(), ny = phantom.ny();
  VolumeScan vol(nx, ny, acq.axis.n_bins, phantom.spec().scan_step_m, acq.axis.bin_m,
                 Provenance::Raw);
  parallel_for(nx * ny, threads, [&](std::size_t c) {
    const std::size_t x = c / ny, y = c % ny;
    auto rng = make_stream(rng_seed, x, y);
    const auto a = synthesize_ascan(profiler, acq.sweep, params, phantom.reflectors(x, y),
                                    noise_sigma, rng);
    std::copy(a.samples.begin(), a.samples.end(), vol.column(c).begin());
  });
  return vol;
}

} // namespace thz
