#pragma once

// Plain-text key/value configuration files.
//
//   # comment
//   key = value          (one entry per line; list keys may repeat)
//
// Simulation spec keys (lengths in millimetres unless noted):
//   grid_nx, grid_ny, step_mm, standoff_mm
//   layer = <name> <thickness_mm> <top_reflectivity>      (repeat, top first)
//   defect_layer = <index into the layer list>
//   hole = <diameter_mm> <center_x_mm> <center_y_mm>       (repeat)
//   holes = none                                           (explicitly no holes)
//   hole_reflectivity, platform_reflectivity, beam_waist_mm
//   clutter_count, clutter_max_reflectivity, clutter_seed
//   sweep_period_us, band_start_ghz, band_end_ghz, n_time_samples,
//   propagation_speed_mps, depth_bins, depth_bin_mm, i1, i2, visibility
//
// Keys not present keep the six-hole defaults; giving any layer or hole entry
// replaces the whole default list.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "thz/error.hpp"
#include "thz/io.hpp"
#include "thz/phantom.hpp"

namespace thz {

class KeyValueFile {
public:
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };

  static KeyValueFile parse(const std::string &text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      line = detail::trim(line);
      if (line.empty())
        continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw FormatError("config line " + std::to_string(no) + ": expected key = value");
      Entry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), no};
      if (e.key.empty())
        throw FormatError("config line " + std::to_string(no) + ": empty key");
      kv.entries_.push_back(std::move(e));
    }
    return kv;
  }

  static KeyValueFile load(const std::filesystem::path &path) {
    return parse(detail::read_file(path));
  }

  const std::vector<Entry> &entries() const { return entries_; }

private:
  std::vector<Entry> entries_;
};

namespace detail {

inline double to_double(const KeyValueFile::Entry &e) {
  double v = 0.0;
  if (!parse_double(e.value, v))
    throw FormatError("config line " + std::to_string(e.line) + ": '" + e.key +
                      "' expects a number");
  return v;
}

inline std::uint64_t to_uint(const KeyValueFile::Entry &e) {
  const double v = to_double(e);
  if (v < 0.0 || v != std::floor(v))
    throw FormatError("config line " + std::to_string(e.line) + ": '" + e.key +
                      "' expects a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

inline std::vector<double> to_numbers(const KeyValueFile::Entry &e, std::size_t expect,
                                      std::size_t skip = 0) {
  std::istringstream ss(e.value);
  std::vector<std::string> tokens;
  for (std::string t; ss >> t;)
    tokens.push_back(t);
  if (tokens.size() != expect + skip)
    throw FormatError("config line " + std::to_string(e.line) + ": '" + e.key + "' expects " +
                      std::to_string(expect + skip) + " fields");
  std::vector<double> out;
  for (std::size_t i = skip; i < tokens.size(); ++i) {
    double v = 0.0;
    if (!parse_double(tokens[i], v))
      throw FormatError("config line " + std::to_string(e.line) + ": bad number '" + tokens[i] +
                        "'");
    out.push_back(v);
  }
  return out;
}

} // namespace detail

struct SimulationConfig {
  PhantomSpec phantom = PhantomSpec::six_hole_default();
  Acquisition acquisition;
};

inline SimulationConfig simulation_from(const KeyValueFile &kv) {
  SimulationConfig cfg;
  PhantomSpec &p = cfg.phantom;
  Acquisition &a = cfg.acquisition;
  bool layers_given = false, holes_given = false;
  double band_start = a.sweep.band_start_hz, band_end = a.sweep.band_end_hz;
  for (const auto &e : kv.entries()) {
    const std::string &k = e.key;
    if (k == "layer") {
      if (!layers_given)
        p.layers.clear();
      layers_given = true;
      std::istringstream ss(e.value);
      std::string name;
      ss >> name;
      const auto v = detail::to_numbers(e, 2, 1);
      p.layers.push_back({name, v[0] * 1e-3, v[1]});
    } else if (k == "hole" || k == "holes") {
      if (!holes_given)
        p.holes.clear();
      holes_given = true;
      if (k == "holes" && e.value == "none")
        continue;
      if (k == "holes")
        throw FormatError("config line " + std::to_string(e.line) + ": 'holes' only accepts none");
      const auto v = detail::to_numbers(e, 3);
      p.holes.push_back({v[0] * 1e-3, v[1] * 1e-3, v[2] * 1e-3});
    } else if (k == "grid_nx") {
      p.grid_nx = detail::to_uint(e);
    } else if (k == "grid_ny") {
      p.grid_ny = detail::to_uint(e);
    } else if (k == "step_mm") {
      p.scan_step_m = detail::to_double(e) * 1e-3;
    } else if (k == "standoff_mm") {
      p.standoff_m = detail::to_double(e) * 1e-3;
    } else if (k == "defect_layer") {
      p.defect_layer_index = detail::to_uint(e);
    } else if (k == "hole_reflectivity") {
      p.hole_reflectivity = detail::to_double(e);
    } else if (k == "platform_reflectivity") {
      p.platform_reflectivity = detail::to_double(e);
    } else if (k == "beam_waist_mm") {
      p.beam_waist_m = detail::to_double(e) * 1e-3;
    } else if (k == "clutter_count") {
      p.clutter_count = detail::to_uint(e);
    } else if (k == "clutter_max_reflectivity") {
      p.clutter_max_reflectivity = detail::to_double(e);
    } else if (k == "clutter_seed") {
      p.clutter_seed = detail::to_uint(e);
    } else if (k == "sweep_period_us") {
      a.sweep.sweep_period_s = detail::to_double(e) * 1e-6;
    } else if (k == "band_start_ghz") {
      band_start = detail::to_double(e) * 1e9;
    } else if (k == "band_end_ghz") {
      band_end = detail::to_double(e) * 1e9;
    } else if (k == "n_time_samples") {
      a.sweep.n_time_samples = detail::to_uint(e);
    } else if (k == "propagation_speed_mps") {
      a.sweep.propagation_speed_mps = detail::to_double(e);
    } else if (k == "depth_bins") {
      a.axis.n_bins = detail::to_uint(e);
    } else if (k == "depth_bin_mm") {
      a.axis.bin_m = detail::to_double(e) * 1e-3;
    } else if (k == "i1") {
      a.i1 = detail::to_double(e);
    } else if (k == "i2") {
      a.i2 = detail::to_double(e);
    } else if (k == "visibility") {
      a.visibility = detail::to_double(e);
    } else {
      throw FormatError("config line " + std::to_string(e.line) + ": unknown key '" + k + "'");
    }
  }
  a.sweep.band_start_hz = band_start;
  a.sweep.band_end_hz = band_end;
  a.sweep.freq_span_hz = band_end - band_start;
  return cfg;
}

inline void validate(const SimulationConfig &cfg) {
  cfg.phantom.validate();
  cfg.acquisition.sweep.validate();
  cfg.acquisition.axis.validate();
  cfg.acquisition.interference().validate();
}

} // namespace thz
