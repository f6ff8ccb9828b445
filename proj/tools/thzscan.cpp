// thzscan: simulate FMCW scans of the layered phantom, process volumes into
// defect reports, and compute area metrics for external measurements.
//
// Exit codes: 0 success, 2 usage error, 3 data/format error, 4 degenerate input.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thz/config.hpp"
#include "thz/io.hpp"
#include "thz/phantom.hpp"
#include "thz/pipeline.hpp"

namespace fs = std::filesystem;
using namespace thz;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Option values merged from --config and the command line; flags win.
class Settings {
public:
  void load(const fs::path &path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    for (const auto &e : kv.entries())
      values_[e.key] = e.value;
  }
  void set(const std::string &key, const std::string &value) { values_[key] = value; }
  std::optional<std::string> get(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      return std::nullopt;
    return it->second;
  }
  void check_known(const std::set<std::string> &known) const {
    for (const auto &[k, v] : values_)
      if (!known.count(k))
        throw UsageError("unknown config key '" + k + "'");
  }

private:
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (const auto t = detail::trim(item); !t.empty())
      out.push_back(t);
  return out;
}

double parse_number(const std::string &what, const std::string &s) {
  double v = 0.0;
  if (!detail::parse_double(s, v))
    throw UsageError(what + ": expected a number, got '" + s + "'");
  return v;
}

std::size_t parse_index(const std::string &what, const std::string &s) {
  const double v = parse_number(what, s);
  if (v < 0.0 || v != std::floor(v))
    throw UsageError(what + ": expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::vector<MethodTag> parse_methods(const std::string &s) {
  std::vector<MethodTag> out;
  for (const auto &item : split_list(s)) {
    if (item == "all")
      return {MethodTag::Raw, MethodTag::Morlet, MethodTag::Gaussian, MethodTag::MexicanHat};
    if (item == "raw")
      out.push_back(MethodTag::Raw);
    else if (item == "morlet")
      out.push_back(MethodTag::Morlet);
    else if (item == "gaussian")
      out.push_back(MethodTag::Gaussian);
    else if (item == "mexican-hat")
      out.push_back(MethodTag::MexicanHat);
    else
      throw UsageError("--wavelet: unknown method '" + item + "'");
  }
  if (out.empty())
    throw UsageError("--wavelet: no method given");
  return out;
}

std::string file_stem(MethodTag m) {
  switch (m) {
  case MethodTag::Raw:
    return "raw";
  case MethodTag::Morlet:
    return "morlet";
  case MethodTag::Gaussian:
    return "gaussian";
  case MethodTag::MexicanHat:
    return "mexican-hat";
  }
  return "method";
}

// --------------------------------------------------------------------------

int cmd_simulate(const Settings &s) {
  s.check_known({"spec", "out", "seed", "noise_sigma"});
  const auto out = s.get("out");
  if (!out)
    throw UsageError("simulate: --out is required");
  SimulationConfig cfg;
  if (const auto spec = s.get("spec")) {
    if (!fs::exists(*spec))
      throw FormatError("spec file not found: " + *spec);
    cfg = simulation_from(KeyValueFile::load(*spec));
  }
  validate(cfg);
  const auto seed = s.get("seed") ? parse_index("--seed", *s.get("seed")) : 0;
  const double sigma = s.get("noise_sigma") ? parse_number("--noise-sigma", *s.get("noise_sigma")) : 0.0;
  if (!(sigma >= 0.0))
    throw UsageError("--noise-sigma must be >= 0");

  const Phantom phantom = build_phantom(cfg.phantom);
  const VolumeScan vol = scan_phantom(phantom, cfg.acquisition, sigma, seed);

  fs::create_directories(*out);
  write_tvol(fs::path(*out) / "volume.tvol", vol);
  detail::write_file(fs::path(*out) / "truth.csv",
                     encode_ground_truth(cfg.phantom, phantom.truth()));
  detail::write_file(fs::path(*out) / "truth_mask.pgm", encode_mask_pgm(phantom.truth()));
  std::cout << "wrote " << vol.nx() << "x" << vol.ny() << "x" << vol.nz() << " volume and "
            << phantom.truth().per_defect_area_m2.size() << "-defect ground truth to " << *out
            << "\n";
  return 0;
}

int cmd_process(const Settings &s) {
  s.check_known({"input", "spec", "out", "truth", "wavelet", "scales", "scale_policy", "z_index",
                 "z_window", "threshold", "format", "seed", "noise_sigma"});
  const auto input = s.get("input");
  const auto spec = s.get("spec");
  if (input.has_value() == spec.has_value())
    throw UsageError("process: give exactly one of --input or --spec");
  const auto out = s.get("out");
  if (!out)
    throw UsageError("process: --out is required");

  // Input volume and optional ground truth.
  VolumeScan raw;
  std::optional<TruthSummary> truth;
  if (input) {
    raw = read_tvol(*input);
    fs::path truth_path = s.get("truth") ? fs::path(*s.get("truth"))
                                         : fs::path(*input).parent_path() / "truth.csv";
    if (s.get("truth") || fs::exists(truth_path))
      truth = decode_ground_truth(detail::read_file(truth_path));
  } else {
    if (!fs::exists(*spec))
      throw FormatError("spec file not found: " + *spec);
    const SimulationConfig cfg = simulation_from(KeyValueFile::load(*spec));
    validate(cfg);
    const auto seed = s.get("seed") ? parse_index("--seed", *s.get("seed")) : 0;
    const double sigma =
        s.get("noise_sigma") ? parse_number("--noise-sigma", *s.get("noise_sigma")) : 0.0;
    const Phantom phantom = build_phantom(cfg.phantom);
    raw = scan_phantom(phantom, cfg.acquisition, sigma, seed);
    truth = decode_ground_truth(encode_ground_truth(cfg.phantom, phantom.truth()));
  }
  if (raw.provenance() != Provenance::Raw)
    throw FormatError("process: input volume is not a raw scan");

  ProcessOptions opt;
  const auto methods = parse_methods(s.get("wavelet").value_or("all"));
  const std::string policy = s.get("scale_policy").value_or("fixed");
  std::vector<double> scales;
  if (const auto sc = s.get("scales"))
    for (const auto &item : split_list(*sc))
      scales.push_back(parse_number("--scales", item));
  if (policy == "fixed") {
    if (scales.size() > 1)
      throw UsageError("--scale-policy fixed takes at most one --scales value");
    opt.scale_policy = scales.empty() ? ScalePolicy::matched() : ScalePolicy::fixed(scales[0]);
    if (!scales.empty())
      opt.cwt.scales = scales;
  } else if (policy == "max") {
    opt.scale_policy = ScalePolicy::max_over_scales();
    if (!scales.empty())
      opt.cwt.scales = scales;
  } else {
    throw UsageError("--scale-policy must be fixed or max");
  }
  try {
    opt.cwt.validate();
  } catch (const InvariantError &e) {
    throw UsageError(std::string("--scales: ") + e.what());
  }

  if (const auto z = s.get("z_index")) {
    opt.z_index = parse_index("--z-index", *z);
    if (*opt.z_index >= raw.nz())
      throw UsageError("--z-index is outside the depth axis");
  } else if (const auto w = s.get("z_window")) {
    const auto colon = w->find(':');
    if (colon == std::string::npos)
      throw UsageError("--z-window expects lo:hi");
    opt.z_window = std::pair{parse_index("--z-window", w->substr(0, colon)),
                             parse_index("--z-window", w->substr(colon + 1))};
  } else if (truth) {
    opt.z_window = interface_window(*truth, raw.depth_bin_m(), raw.nz());
  } else {
    throw UsageError("process: no ground truth found; give --z-index or --z-window");
  }

  const std::string th = s.get("threshold").value_or("otsu");
  if (th != "otsu")
    opt.threshold = ThresholdPolicy::at(parse_number("--threshold", th));

  bool want_pgm = false, want_csv = false;
  for (const auto &f : split_list(s.get("format").value_or("pgm,csv"))) {
    if (f == "pgm")
      want_pgm = true;
    else if (f == "csv")
      want_csv = true;
    else
      throw UsageError("--format accepts pgm and csv");
  }

  std::vector<ReportRow> rows;
  if (truth)
    rows.push_back({"Actual size", truth->areas_mm2, 0.0, 0.0, "ok"});
  struct Output {
    std::string name;
    std::string bytes;
  };
  std::vector<Output> outputs;
  bool mismatch = false;
  for (MethodTag m : methods) {
    const std::string stem = file_stem(m);
    const auto t0 = std::chrono::steady_clock::now();
    MethodResult r;
    try {
      r = run_method(raw, m, opt, truth ? &truth->areas_mm2 : nullptr);
    } catch (const DegenerateInputError &e) {
      throw DegenerateInputError(stem + ": " + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << stem << ": " << (wavelet_of(m) ? "wavelet transform applied" : "no wavelet transform")
              << ", slice z=" << r.z_index << ", " << r.labels.k << " defects ("
              << detail::fmt("%.2f", secs) << " s)\n";
    if (r.report) {
      rows.push_back(ReportRow::from(*r.report));
    } else {
      ReportRow row{std::string(to_string(m)), r.areas_mm2, std::nullopt, std::nullopt, "ok"};
      if (truth) {
        row.status = "count mismatch: " + std::to_string(r.areas_mm2.size()) + " found, " +
                     std::to_string(truth->areas_mm2.size()) + " expected";
        mismatch = true;
        std::cerr << stem << ": " << row.status << "\n";
      }
      rows.push_back(std::move(row));
    }
    if (want_pgm)
      outputs.push_back({"slice_" + stem + ".pgm", encode_pgm(r.slice)});
    if (want_csv)
      outputs.push_back({"slice_" + stem + ".csv", encode_slice_csv(r.slice)});
  }

  fs::create_directories(*out);
  for (const auto &o : outputs)
    detail::write_file(fs::path(*out) / o.name, o.bytes);
  const std::string report = encode_report_csv(rows);
  detail::write_file(fs::path(*out) / "report.csv", report);
  std::cout << report;
  return mismatch ? kExitData : 0;
}

int cmd_metrics(const std::string &measured_path, const std::string &actual_path,
                const std::optional<std::string> &out) {
  const auto measured = decode_numeric_rows(detail::read_file(measured_path));
  const auto actual_rows = decode_numeric_rows(detail::read_file(actual_path));
  if (actual_rows.empty())
    throw FormatError("metrics: no numeric row in " + actual_path);
  if (measured.empty())
    throw FormatError("metrics: no numeric row in " + measured_path);
  const auto &actual = actual_rows.front().values;

  std::vector<ReportRow> rows;
  rows.push_back({actual_rows.front().label.empty() ? "Actual size" : actual_rows.front().label,
                  actual, 0.0, 0.0, "ok"});
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const auto r = compute_metrics(measured[i].values, actual, MethodTag::Raw);
    ReportRow row = ReportRow::from(r);
    row.label = measured[i].label.empty() ? "row " + std::to_string(i + 1) : measured[i].label;
    rows.push_back(std::move(row));
  }
  const std::string report = encode_report_csv(rows);
  if (out) {
    fs::create_directories(*out);
    detail::write_file(fs::path(*out) / "report.csv", report);
  }
  std::cout << report;
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Terahertz FMCW scan simulation and wavelet-enhanced defect quantification"};
  app.require_subcommand(1);

  std::string config, spec, input, out, truth, wavelet, scales, scale_policy, z_window, threshold,
      format, measured, actual;
  std::size_t z_index = 0, seed = 0;
  double noise_sigma = 0.0;

  auto *sim = app.add_subcommand("simulate", "scan the phantom and write volume + ground truth");
  sim->add_option("--config", config, "key/value file with default option values");
  sim->add_option("--spec", spec, "phantom spec file (built-in six-hole sample if omitted)");
  sim->add_option("--out", out, "output directory");
  sim->add_option("--seed", seed, "noise seed");
  sim->add_option("--noise-sigma", noise_sigma, "noise sigma relative to I1+I2");

  auto *proc = app.add_subcommand("process", "enhance, slice, segment and report");
  proc->add_option("--config", config, "key/value file with default option values");
  proc->add_option("--input", input, "TVOL volume");
  proc->add_option("--spec", spec, "phantom spec to simulate instead of reading a volume");
  proc->add_option("--truth", truth, "ground-truth sidecar (default: truth.csv beside input)");
  proc->add_option("--out", out, "output directory");
  proc->add_option("--wavelet", wavelet, "raw|morlet|gaussian|mexican-hat|all (comma list)");
  proc->add_option("--scales", scales, "comma-separated scales");
  proc->add_option("--scale-policy", scale_policy, "fixed|max");
  proc->add_option("--z-index", z_index, "fixed slice depth bin");
  proc->add_option("--z-window", z_window, "interface search window lo:hi (bins)");
  proc->add_option("--threshold", threshold, "otsu or a fixed value");
  proc->add_option("--format", format, "slice formats: pgm,csv");
  proc->add_option("--seed", seed, "noise seed (with --spec)");
  proc->add_option("--noise-sigma", noise_sigma, "noise sigma (with --spec)");

  auto *met = app.add_subcommand("metrics", "area metrics for measured vs actual rows");
  met->add_option("--measured", measured, "CSV with one row of measured areas per method")
      ->required();
  met->add_option("--actual", actual, "CSV whose first numeric row holds the actual areas")
      ->required();
  met->add_option("--out", out, "output directory (report.csv); stdout only if omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*met)
      return cmd_metrics(measured, actual, out.empty() ? std::nullopt : std::optional(out));

    CLI::App *sub = *sim ? sim : proc;
    Settings s;
    if (!config.empty())
      s.load(config);
    auto flag = [&](const char *name, const char *key, const std::string &value) {
      if (const auto *o = sub->get_option_no_throw(name); o && o->count() > 0)
        s.set(key, value);
    };
    flag("--spec", "spec", spec);
    flag("--out", "out", out);
    flag("--seed", "seed", std::to_string(seed));
    flag("--noise-sigma", "noise_sigma", detail::fmt("%.17g", noise_sigma));
    if (*sim)
      return cmd_simulate(s);
    flag("--input", "input", input);
    flag("--truth", "truth", truth);
    flag("--wavelet", "wavelet", wavelet);
    flag("--scales", "scales", scales);
    flag("--scale-policy", "scale_policy", scale_policy);
    flag("--z-index", "z_index", std::to_string(z_index));
    flag("--z-window", "z_window", z_window);
    flag("--threshold", "threshold", threshold);
    flag("--format", "format", format);
    return cmd_process(s);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegenerateInputError &e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
