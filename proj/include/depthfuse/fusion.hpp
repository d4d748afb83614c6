#pragma once

#include <string_view>
#include <utility>

#include "depthfuse/core.hpp"

namespace depthfuse {

enum class ScalingMode {
  kMinMax,   // affine map of the mono range onto the stereo range
  kAverage,  // multiplicative mean matching
  kNone,
};

enum class WeightingMode {
  kFull,  // confidence weight plus the stereo/mono ratio weight
  kNone,  // confidence weight only
};

ScalingMode parse_scaling_mode(std::string_view s);
WeightingMode parse_weighting_mode(std::string_view s);
std::string_view to_string(ScalingMode m);
std::string_view to_string(WeightingMode m);

struct FusionParams {
  ScalingMode scaling_mode = ScalingMode::kMinMax;
  WeightingMode weighting_mode = WeightingMode::kFull;
  int median_kernel = 5;

  void validate() const;
};

/// Range statistics used by the mono scaling, over valid pixels only.
struct ScaleParams {
  double min_m = 0.0, max_m = 0.0, r_m = 0.0;
  double min_s = 0.0, max_s = 0.0, r_s = 0.0;
};

struct RatioWeightTag;
/// Per-pixel agreement between normalized mono and stereo depths, in (0,1].
using RatioWeightMap = Raster<double, RatioWeightTag>;

/// Brings the mono map into the stereo frame.
///
/// minmax: z <- min_s + r_s * (z - min_m) / r_m; when r_m == 0 every valid
/// mono pixel becomes min_s. average: z <- z * mean(zs) / mean(zm), both
/// means over the pixels valid in both maps.
/// none: identity. Invalid pixels stay invalid.
std::pair<DepthMap, ScaleParams> scale_mono(const DepthMap& zm, const DepthMap& zs, ScalingMode mode);

/// W_s = min(N_m, N_s) / max(N_m, N_s) with N = Z / max(Z), maxima over valid
/// pixels. Equal normalized values give 1. Pixels where either map is
/// invalid carry 1; they never reach the blend.
RatioWeightMap compute_ratio_weight(const DepthMap& zm_scaled, const DepthMap& zs);

/// Per-pixel fusion before smoothing:
///   stereo invalid          -> scaled mono
///   mono invalid            -> stereo
///   both valid, full        -> Wc*Zs + (1-Wc)*(Ws*Zs + (1-Ws)*Zm)
///   both valid, no weighting-> Wc*Zs + (1-Wc)*Zm
///   both invalid            -> invalid
DepthMap fuse(const DepthMap& zs, const DepthMap& zm_scaled, const ConfidenceMap& wc,
              const RatioWeightMap& ws, WeightingMode mode);

/// Median of the valid values in a kernel x kernel window (truncated at the
/// borders). With an even number of valid values the lower middle element
/// is taken, so every output value occurs in its input window. Pixels
/// without valid neighbors stay invalid.
DepthMap median_filter(const DepthMap& z, int kernel);

/// scale_mono -> compute_ratio_weight -> fuse -> median_filter.
DepthMap fuse_pipeline(const DepthMap& zs, const DepthMap& zm, const ConfidenceMap& wc,
                       const FusionParams& p);

}  // namespace depthfuse
