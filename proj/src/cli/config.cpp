#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "depthfuse/cli.hpp"

namespace depthfuse::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) +
                    "' as " + std::string(expected));
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size() || std::isnan(out)) bad_value(key, v, "a number");
  return out;
}

double parse_finite(std::string_view key, std::string_view v) {
  const double d = parse_double(key, v);
  if (!std::isfinite(d)) bad_value(key, v, "a finite number");
  return d;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> parse_list(std::string_view v) {
  std::vector<std::string> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

template <typename Int, typename F>
Setter int_field(F field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) { field(c) = parse_int<Int>(k, v); };
}

template <typename F>
Setter real_field(F field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) { field(c) = parse_finite(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"dataset", [](RunConfig& c, auto, std::string_view v) { c.dataset = std::string(v); }},
      {"output", [](RunConfig& c, auto, std::string_view v) { c.output = std::string(v); }},
      {"seed", int_field<std::uint64_t>([](RunConfig& c) -> auto& { return c.seed; })},
      {"frames", [](RunConfig& c, auto, std::string_view v) { c.frames = parse_list(v); }},
      {"train_frames", [](RunConfig& c, auto, std::string_view v) { c.train_frames = parse_list(v); }},

      {"calib.focal_length", real_field([](RunConfig& c) -> auto& { return c.calibration.focal_length; })},
      {"calib.baseline", real_field([](RunConfig& c) -> auto& { return c.calibration.baseline; })},
      {"calib.max_disparity", int_field<int>([](RunConfig& c) -> auto& { return c.calibration.max_disparity; })},
      {"calib.subpixel_denominator",
       int_field<int>([](RunConfig& c) -> auto& { return c.calibration.subpixel_denominator; })},

      {"stereo.block_radius", int_field<int>([](RunConfig& c) -> auto& { return c.stereo.block_radius; })},
      {"stereo.lr_tol",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.stereo.lr_consistency_tol = parse_double(k, v); }},
      {"stereo.uniqueness_ratio", real_field([](RunConfig& c) -> auto& { return c.stereo.uniqueness_ratio; })},

      {"confidence.sobel_threshold",
       real_field([](RunConfig& c) -> auto& { return c.confidence.sobel_threshold; })},
      {"confidence.blur_radius", int_field<int>([](RunConfig& c) -> auto& { return c.confidence.blur_radius; })},
      {"confidence.blur_sigma", real_field([](RunConfig& c) -> auto& { return c.confidence.blur_sigma; })},

      {"fusion.scaling",
       [](RunConfig& c, auto, std::string_view v) { c.fusion.scaling_mode = parse_scaling_mode(v); }},
      {"fusion.weighting",
       [](RunConfig& c, auto, std::string_view v) { c.fusion.weighting_mode = parse_weighting_mode(v); }},
      {"fusion.median_kernel", int_field<int>([](RunConfig& c) -> auto& { return c.fusion.median_kernel; })},

      {"train.epochs", int_field<int>([](RunConfig& c) -> auto& { return c.train.epochs; })},
      {"train.batch_size", int_field<int>([](RunConfig& c) -> auto& { return c.train.batch_size; })},
      {"train.learning_rate", real_field([](RunConfig& c) -> auto& { return c.train.learning_rate; })},
      {"train.lr_decay_every", int_field<int>([](RunConfig& c) -> auto& { return c.train.lr_decay_every; })},
      {"train.lr_decay_factor", real_field([](RunConfig& c) -> auto& { return c.train.lr_decay_factor; })},
      {"train.output_floor", real_field([](RunConfig& c) -> auto& { return c.train.output_floor; })},

      {"ssl.min_confidence", real_field([](RunConfig& c) -> auto& { return c.min_confidence; })},
      {"ssl.max_samples", int_field<std::size_t>([](RunConfig& c) -> auto& { return c.max_samples; })},

      {"mono.source",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         if (v == "auto") {
           c.mono_source = MonoSource::kAuto;
         } else if (v == "model") {
           c.mono_source = MonoSource::kModel;
         } else if (v == "import") {
           c.mono_source = MonoSource::kImport;
         } else {
           bad_value(k, v, "auto|model|import");
         }
       }},
      {"mono.model", [](RunConfig& c, auto, std::string_view v) { c.model_path = std::string(v); }},

      {"eval.bin_edges",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.bin_edges.clear();
         for (const auto& item : parse_list(v)) c.bin_edges.push_back(parse_finite(k, item));
       }},

      {"synth.frames", int_field<int>([](RunConfig& c) -> auto& { return c.synth.frames; })},
      {"synth.width", int_field<int>([](RunConfig& c) -> auto& { return c.synth.scene.width; })},
      {"synth.height", int_field<int>([](RunConfig& c) -> auto& { return c.synth.scene.height; })},
      {"synth.min_occluders", int_field<int>([](RunConfig& c) -> auto& { return c.synth.scene.min_occluders; })},
      {"synth.max_occluders", int_field<int>([](RunConfig& c) -> auto& { return c.synth.scene.max_occluders; })},
      {"synth.min_background_depth",
       real_field([](RunConfig& c) -> auto& { return c.synth.scene.min_background_depth; })},
      {"synth.max_background_depth",
       real_field([](RunConfig& c) -> auto& { return c.synth.scene.max_background_depth; })},
      {"synth.min_occluder_depth",
       real_field([](RunConfig& c) -> auto& { return c.synth.scene.min_occluder_depth; })},
      {"synth.max_occluder_depth",
       real_field([](RunConfig& c) -> auto& { return c.synth.scene.max_occluder_depth; })},
      {"synth.min_occlusion_fraction",
       real_field([](RunConfig& c) -> auto& { return c.synth.scene.min_occlusion_fraction; })},
      {"synth.max_occlusion_fraction",
       real_field([](RunConfig& c) -> auto& { return c.synth.scene.max_occlusion_fraction; })},
      {"synth.contrast", real_field([](RunConfig& c) -> auto& { return c.synth.scene.contrast; })},
      {"synth.noise_sigma", real_field([](RunConfig& c) -> auto& { return c.synth.scene.noise_sigma; })},
      {"synth.write_mono",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.synth.write_mono = parse_bool(k, v); }},
      {"synth.mono_sigma", real_field([](RunConfig& c) -> auto& { return c.synth.mono_sigma; })},
      {"synth.mono_bias", real_field([](RunConfig& c) -> auto& { return c.synth.mono_bias; })},
  };
  return table;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second(*this, key, value);
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set(s.substr(0, eq), s.substr(eq + 1));
  }
}

StereoParams RunConfig::stereo_params() const {
  StereoParams p = stereo;
  p.max_disparity = calibration.max_disparity;
  p.subpixel_denominator = calibration.subpixel_denominator;
  return p;
}

std::filesystem::path RunConfig::resolved_model_path() const {
  return model_path.empty() ? output / "model.txt" : model_path;
}

void RunConfig::validate() const {
  calibration.validate();
  stereo_params().validate();
  confidence.validate();
  fusion.validate();
  train.validate();
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw ConfigError("ssl.min_confidence must lie in [0, 1]");
  }
  if (max_samples == 0) throw ConfigError("ssl.max_samples must be positive");
  if (bin_edges.empty() || !std::is_sorted(bin_edges.begin(), bin_edges.end()) ||
      std::adjacent_find(bin_edges.begin(), bin_edges.end()) != bin_edges.end()) {
    throw ConfigError("eval.bin_edges must be a non-empty strictly increasing list");
  }
  if (synth.frames < 1) throw ConfigError("synth.frames must be >= 1");
  if (!(synth.mono_sigma >= 0.0)) throw ConfigError("synth.mono_sigma must be >= 0");
  if (!(synth.mono_bias > -1.0)) throw ConfigError("synth.mono_bias must be > -1");
}

const std::vector<std::string_view>& RunConfig::keys() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return names;
}

}  // namespace depthfuse::cli
