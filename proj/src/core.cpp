#include "depthfuse/core.hpp"

#include <cmath>

namespace depthfuse {

void StereoCalibration::validate() const {
  if (!(focal_length > 0.0) || !std::isfinite(focal_length)) {
    throw ConfigError("calibration: focal_length must be positive");
  }
  if (!(baseline > 0.0) || !std::isfinite(baseline)) {
    throw ConfigError("calibration: baseline must be positive");
  }
  if (max_disparity < 1) throw ConfigError("calibration: max_disparity must be >= 1");
  if (subpixel_denominator < 1) {
    throw ConfigError("calibration: subpixel_denominator must be >= 1");
  }
}

DepthMap disparity_to_depth(const DisparityMap& d, const StereoCalibration& cal) {
  cal.validate();
  const double fb = cal.focal_baseline();
  DepthMap z(d.width(), d.height(), kInvalid);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = d[i];
    if (!is_valid(v) || !(v > 0.0)) continue;
    const double depth = fb / v;
    if (std::isfinite(depth) && depth > 0.0) z[i] = depth;
  }
  return z;
}

DisparityMap depth_to_disparity(const DepthMap& z, const StereoCalibration& cal) {
  cal.validate();
  const double fb = cal.focal_baseline();
  DisparityMap d(z.width(), z.height(), kInvalid);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = z[i];
    if (!is_valid(v) || !(v > 0.0)) continue;
    const double disp = fb / v;
    if (std::isfinite(disp)) d[i] = disp;
  }
  return d;
}

namespace {

template <typename R>
Mask valid_mask_impl(const R& m) {
  Mask mask(m.width(), m.height(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) mask[i] = is_valid(m[i]) ? 1 : 0;
  return mask;
}

}  // namespace

Mask valid_mask(const DepthMap& m) { return valid_mask_impl(m); }
Mask valid_mask(const DisparityMap& m) { return valid_mask_impl(m); }

std::size_t count(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.pixels()) n += v ? 1 : 0;
  return n;
}

}  // namespace depthfuse
