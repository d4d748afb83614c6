#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "depthfuse/confidence.hpp"
#include "depthfuse/core.hpp"
#include "depthfuse/fusion.hpp"
#include "depthfuse/mono.hpp"
#include "depthfuse/stereo.hpp"
#include "depthfuse/synth.hpp"

namespace depthfuse::cli {

enum class MonoSource {
  kAuto,    // trained model if present, else imported maps
  kModel,   // regressor file (mono.model, default <output>/model.txt)
  kImport,  // <dataset>/mono/<id>.pfm or .png
};

struct SynthSettings {
  int frames = 4;
  RandomSceneOptions scene;
  bool write_mono = true;  // oracle mono maps under mono/
  double mono_sigma = 0.10;
  double mono_bias = 0.0;
};

/// Flat key=value configuration shared by all subcommands. Unknown keys and
/// malformed values throw ConfigError. See RunConfig::keys() for the list.
struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path output;
  std::uint64_t seed = 0;
  std::vector<std::string> frames;        // empty: every frame in the dataset
  std::vector<std::string> train_frames;  // empty: same as frames

  StereoCalibration calibration{400.0, 0.1, 64, 16};
  StereoParams stereo;
  ConfidenceParams confidence;
  FusionParams fusion;
  TrainConfig train;
  double min_confidence = 0.5;
  std::size_t max_samples = 200000;  // pooled over training frames
  MonoSource mono_source = MonoSource::kAuto;
  std::filesystem::path model_path;  // empty: <output>/model.txt
  std::vector<double> bin_edges{0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 20.0, 40.0, 80.0};
  SynthSettings synth;

  void set(std::string_view key, std::string_view value);
  /// Applies every "key = value" line of a file. '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  /// Cross-field checks plus each module's own validation.
  void validate() const;
  /// Stereo parameters with the calibration's disparity range applied.
  StereoParams stereo_params() const;
  std::filesystem::path resolved_model_path() const;

  static const std::vector<std::string_view>& keys();
};

/// Frame ids (file stems) under <root>/left that have a right counterpart,
/// sorted. Throws DataError("no frames found") when there are none and when
/// a requested id is absent.
std::vector<std::string> discover_frames(const std::filesystem::path& root,
                                         const std::vector<std::string>& requested = {});

void cmd_synth(const RunConfig& cfg, std::ostream& log);
void cmd_stereo(const RunConfig& cfg, std::ostream& log);
void cmd_ssl_train(const RunConfig& cfg, std::ostream& log);
void cmd_fuse(const RunConfig& cfg, std::ostream& log);
void cmd_eval(const RunConfig& cfg, std::ostream& log);

/// Full command line: `depthfuse <subcommand> [--config f] [--output d]
/// [--seed n] [--set key=value]...`. Returns the process exit code:
/// 0 success, 1 usage or configuration error, 2 data error, 3 numerical
/// failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depthfuse::cli
