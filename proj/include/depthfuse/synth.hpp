#pragma once

#include <cstdint>
#include <vector>

#include "depthfuse/core.hpp"

namespace depthfuse {

/// Seeded multi-octave value noise. Octave k has lattice period
/// 2^(octaves-1-k) px, so the finest octave varies per pixel.
struct TextureSpec {
  int octaves = 4;
  double contrast = 0.6;  // 0 gives a uniform gray surface
  double persistence = 0.7;
};

/// Fronto-parallel rectangle. The rectangle is given in the cyclopean view
/// (midway between the cameras); it appears shifted by +d/2 in the left
/// image and -d/2 in the right image.
struct Occluder {
  double depth = 1.0;  // meters
  double x = 0.0, y = 0.0, width = 0.0, height = 0.0;
  TextureSpec texture;
};

struct SceneSpec {
  int width = 512;
  int height = 256;
  StereoCalibration calibration{400.0, 0.1, 64, 16};
  double background_depth = 6.0;
  TextureSpec background_texture;
  std::vector<Occluder> occluders;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RenderedScene {
  GrayImage left;
  GrayImage right;
  DepthMap gt_depth;          // left view, dense
  DisparityMap gt_disparity;  // left view, dense
  /// Left pixels that are hidden in the right view or fall outside it.
  Mask occlusion;
};

RenderedScene render(const SceneSpec& spec);

/// Occlusion mask only, without texturing.
Mask occlusion_mask(const SceneSpec& spec);

/// Simulated mono estimator: z * (1 + bias + relative_sigma * g) with g a
/// seeded standard normal draw per valid pixel, clamped to >= 0.1 m.
DepthMap perturb_oracle_mono(const DepthMap& gt_depth, double relative_sigma, double bias,
                             std::uint64_t seed);

struct RandomSceneOptions {
  int width = 512;
  int height = 256;
  StereoCalibration calibration{400.0, 0.1, 64, 16};
  int min_occluders = 1;
  int max_occluders = 3;
  double min_background_depth = 4.0;
  double max_background_depth = 8.0;
  double min_occluder_depth = 1.0;
  double max_occluder_depth = 2.5;
  double min_occlusion_fraction = 0.05;
  double max_occlusion_fraction = 0.20;
  double contrast = 0.6;
  double noise_sigma = 0.01;

  void validate() const;
};

/// Draws a scene whose occlusion fraction lies within the configured range.
/// Deterministic in the seed. Throws DataError if no admissible scene is
/// found after a bounded number of draws.
SceneSpec random_scene(std::uint64_t seed, const RandomSceneOptions& opt = {});

}  // namespace depthfuse
