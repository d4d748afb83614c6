#include "depthfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace depthfuse {

ScalingMode parse_scaling_mode(std::string_view s) {
  if (s == "minmax") return ScalingMode::kMinMax;
  if (s == "average") return ScalingMode::kAverage;
  if (s == "none") return ScalingMode::kNone;
  throw ConfigError("unknown scaling mode '" + std::string(s) + "' (expected minmax|average|none)");
}

WeightingMode parse_weighting_mode(std::string_view s) {
  if (s == "full") return WeightingMode::kFull;
  if (s == "none") return WeightingMode::kNone;
  throw ConfigError("unknown weighting mode '" + std::string(s) + "' (expected full|none)");
}

std::string_view to_string(ScalingMode m) {
  switch (m) {
    case ScalingMode::kMinMax: return "minmax";
    case ScalingMode::kAverage: return "average";
    case ScalingMode::kNone: return "none";
  }
  return "?";
}

std::string_view to_string(WeightingMode m) {
  return m == WeightingMode::kFull ? "full" : "none";
}

void FusionParams::validate() const {
  if (median_kernel < 1 || median_kernel % 2 == 0) {
    throw ConfigError("fusion: median_kernel must be odd and >= 1");
  }
}

namespace {

struct RangeStats {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
};

RangeStats range_of(const DepthMap& z) {
  RangeStats s;
  for (double v : z.pixels()) {
    if (!is_valid(v)) continue;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    ++s.n;
  }
  return s;
}

}  // namespace

std::pair<DepthMap, ScaleParams> scale_mono(const DepthMap& zm, const DepthMap& zs, ScalingMode mode) {
  require_same_shape(zm, zs, "scale_mono");
  const RangeStats m = range_of(zm);
  if (m.n == 0) throw DataError("scale_mono: mono map has no valid pixels");
  const RangeStats s = range_of(zs);

  ScaleParams sp;
  sp.min_m = m.min;
  sp.max_m = m.max;
  sp.r_m = m.max - m.min;
  if (s.n > 0) {
    sp.min_s = s.min;
    sp.max_s = s.max;
    sp.r_s = s.max - s.min;
  }
  if (mode == ScalingMode::kNone) return {zm, sp};
  if (s.n == 0) throw DataError("scale_mono: stereo map has no valid pixels");

  DepthMap out = zm;
  if (mode == ScalingMode::kMinMax) {
    for (double& v : out.pixels()) {
      if (!is_valid(v)) continue;
      v = sp.r_m > 0.0 ? sp.min_s + sp.r_s * ((v - sp.min_m) / sp.r_m) : sp.min_s;
    }
  } else {
    // Means are taken over pixels valid in both maps so that both describe
    // the same scene content.
    double sum_s = 0.0, sum_m = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < zm.size(); ++i) {
      if (!is_valid(zm[i]) || !is_valid(zs[i])) continue;
      sum_s += zs[i];
      sum_m += zm[i];
      ++n;
    }
    if (n == 0 || !(sum_m > 0.0)) throw DataError("scale_mono: no pixel valid in both maps");
    const double factor = sum_s / sum_m;
    for (double& v : out.pixels()) {
      if (is_valid(v)) v *= factor;
    }
  }
  return {std::move(out), sp};
}

RatioWeightMap compute_ratio_weight(const DepthMap& zm_scaled, const DepthMap& zs) {
  require_same_shape(zm_scaled, zs, "compute_ratio_weight");
  const RangeStats m = range_of(zm_scaled);
  const RangeStats s = range_of(zs);
  if (m.n == 0 || s.n == 0) throw DataError("compute_ratio_weight: a map has no valid pixels");
  if (!(m.max > 0.0) || !(s.max > 0.0)) {
    throw DataError("compute_ratio_weight: depth maxima must be positive");
  }

  RatioWeightMap ws(zs.width(), zs.height(), 1.0);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (!is_valid(zm_scaled[i]) || !is_valid(zs[i])) continue;
    const double nm = zm_scaled[i] / m.max;
    const double ns = zs[i] / s.max;
    if (!(nm > 0.0) || !(ns > 0.0)) {
      throw DataError("compute_ratio_weight: non-positive depth at a valid pixel");
    }
    if (ns > nm) {
      ws[i] = nm / ns;
    } else if (ns < nm) {
      ws[i] = ns / nm;
    } else {
      ws[i] = 1.0;
    }
  }
  return ws;
}

DepthMap fuse(const DepthMap& zs, const DepthMap& zm_scaled, const ConfidenceMap& wc,
              const RatioWeightMap& ws, WeightingMode mode) {
  require_same_shape(zs, zm_scaled, "fuse");
  require_same_shape(zs, wc, "fuse");
  require_same_shape(zs, ws, "fuse");

  DepthMap out(zs.width(), zs.height(), kInvalid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = zs[i];
    const double m = zm_scaled[i];
    if (!is_valid(s)) {
      out[i] = m;
      continue;
    }
    if (!is_valid(m)) {
      out[i] = s;
      continue;
    }
    const double c = wc[i];
    const double inner = mode == WeightingMode::kFull ? ws[i] * s + (1.0 - ws[i]) * m : m;
    const double z = c * s + (1.0 - c) * inner;
    // Rounding may step one ulp outside the convex hull of the two inputs.
    out[i] = std::clamp(z, std::min(s, m), std::max(s, m));
  }
  return out;
}

DepthMap median_filter(const DepthMap& z, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) throw ConfigError("median_filter: kernel must be odd and >= 1");
  const int half = kernel / 2;
  const int w = z.width();
  const int h = z.height();
  DepthMap out(w, h, kInvalid);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(kernel) * kernel);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      window.clear();
      for (int yy = std::max(0, y - half); yy <= std::min(h - 1, y + half); ++yy) {
        for (int xx = std::max(0, x - half); xx <= std::min(w - 1, x + half); ++xx) {
          const double v = z.at(xx, yy);
          if (is_valid(v)) window.push_back(v);
        }
      }
      if (window.empty()) continue;
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
      std::nth_element(window.begin(), mid, window.end());
      out.at(x, y) = *mid;
    }
  }
  return out;
}

DepthMap fuse_pipeline(const DepthMap& zs, const DepthMap& zm, const ConfidenceMap& wc,
                       const FusionParams& p) {
  p.validate();
  const auto [zm_scaled, scale] = scale_mono(zm, zs, p.scaling_mode);
  const RatioWeightMap ws = compute_ratio_weight(zm_scaled, zs);
  return median_filter(fuse(zs, zm_scaled, wc, ws, p.weighting_mode), p.median_kernel);
}

}  // namespace depthfuse
