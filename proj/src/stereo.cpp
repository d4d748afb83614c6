#include "depthfuse/stereo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace depthfuse {

void StereoParams::validate() const {
  if (block_radius < 1) throw ConfigError("stereo: block_radius must be >= 1");
  if (max_disparity < 1) throw ConfigError("stereo: max_disparity must be >= 1");
  if (!(lr_consistency_tol > 0.0)) throw ConfigError("stereo: lr_consistency_tol must be positive");
  if (!(uniqueness_ratio > 0.0) || uniqueness_ratio > 1.0) {
    throw ConfigError("stereo: uniqueness_ratio must lie in (0, 1]");
  }
  if (subpixel_denominator < 1) throw ConfigError("stereo: subpixel_denominator must be >= 1");
}

namespace {

std::vector<std::int32_t> quantize(const GrayImage& img) {
  std::vector<std::int32_t> q(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    q[i] = static_cast<std::int32_t>(std::lround(std::clamp(img[i], 0.0f, 1.0f) * 65535.0));
  }
  return q;
}

GrayImage mirror(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(img.width() - 1 - x, y);
  }
  return out;
}

DisparityMap mirror(const DisparityMap& d) {
  DisparityMap out(d.width(), d.height());
  for (int y = 0; y < d.height(); ++y) {
    for (int x = 0; x < d.width(); ++x) out.at(x, y) = d.at(d.width() - 1 - x, y);
  }
  return out;
}

// Window SAD for every pixel and disparity, laid out [d][y][x]. Entries whose
// window would leave the image stay zero and are never read.
std::vector<std::int32_t> cost_volume(const std::vector<std::int32_t>& left,
                                      const std::vector<std::int32_t>& right, int w, int h,
                                      int radius, int max_d) {
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  std::vector<std::int32_t> volume(plane * (max_d + 1), 0);
  // Integral image with a zero guard row/column.
  std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto I = [&](int x, int y) -> std::int64_t& {
    return integral[static_cast<std::size_t>(y) * (w + 1) + x];
  };
  for (int d = 0; d <= max_d; ++d) {
    for (int y = 0; y < h; ++y) {
      std::int64_t row_sum = 0;
      const std::size_t base = static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        if (x >= d) row_sum += std::abs(left[base + x] - right[base + x - d]);
        I(x + 1, y + 1) = I(x + 1, y) + row_sum;
      }
    }
    std::int32_t* out = volume.data() + plane * d;
    for (int y = radius; y < h - radius; ++y) {
      for (int x = d + radius; x < w - radius; ++x) {
        const int x0 = x - radius, x1 = x + radius + 1;
        const int y0 = y - radius, y1 = y + radius + 1;
        out[static_cast<std::size_t>(y) * w + x] =
            static_cast<std::int32_t>(I(x1, y1) - I(x0, y1) - I(x1, y0) + I(x0, y0));
      }
    }
  }
  return volume;
}

}  // namespace

DisparityMap match_stereo(const GrayImage& left, const GrayImage& right, const StereoParams& p) {
  p.validate();
  require_same_shape(left, right, "match_stereo");
  const int w = left.width();
  const int h = left.height();
  const int r = p.block_radius;
  const int max_d = p.max_disparity;
  if (max_d >= w) throw ConfigError("match_stereo: max_disparity must be smaller than the image width");

  DisparityMap out(w, h, kInvalid);
  if (w < 2 * r + 1 || h < 2 * r + 1) return out;

  const auto ql = quantize(left);
  const auto qr = quantize(right);
  const auto volume = cost_volume(ql, qr, w, h, r, max_d);
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  const double den = p.subpixel_denominator;

  std::vector<std::int64_t> costs(max_d + 1);
  for (int y = r; y < h - r; ++y) {
    for (int x = r + max_d; x < w - r; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      int best = 0;
      for (int d = 0; d <= max_d; ++d) {
        costs[d] = volume[plane * d + idx];
        if (costs[d] < costs[best]) best = d;
      }
      bool has_second = false;
      std::int64_t second = 0;
      for (int d = 0; d <= max_d; ++d) {
        if (std::abs(d - best) <= 1) continue;
        if (!has_second || costs[d] < second) {
          second = costs[d];
          has_second = true;
        }
      }
      if (has_second) {
        const bool unique = costs[best] < second &&
                            static_cast<double>(costs[best]) <= p.uniqueness_ratio * static_cast<double>(second);
        if (!unique) continue;
      }

      double disparity = best;
      if (best > 0 && best < max_d) {
        const double cm = static_cast<double>(costs[best - 1]);
        const double c0 = static_cast<double>(costs[best]);
        const double cp = static_cast<double>(costs[best + 1]);
        const double curvature = cm - 2.0 * c0 + cp;
        if (curvature > 0.0) {
          disparity += std::clamp((cm - cp) / (2.0 * curvature), -0.5, 0.5);
        }
      }
      disparity = std::round(disparity * den) / den;
      out[idx] = std::clamp(disparity, 0.0, static_cast<double>(max_d));
    }
  }
  return out;
}

DisparityMap match_stereo_right(const GrayImage& left, const GrayImage& right,
                                const StereoParams& p) {
  return mirror(match_stereo(mirror(right), mirror(left), p));
}

DisparityMap lr_consistency_filter(const DisparityMap& d_left, const DisparityMap& d_right,
                                   double tol) {
  require_same_shape(d_left, d_right, "lr_consistency_filter");
  DisparityMap out = d_left;
  const int w = d_left.width();
  for (int y = 0; y < d_left.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = d_left.at(x, y);
      if (!is_valid(d)) continue;
      const long xr = x - std::lround(d);
      double diff = std::numeric_limits<double>::infinity();
      if (xr >= 0 && xr < w && is_valid(d_right.at(static_cast<int>(xr), y))) {
        diff = std::abs(d - d_right.at(static_cast<int>(xr), y));
      }
      if (!(diff <= tol)) out.at(x, y) = kInvalid;
    }
  }
  return out;
}

DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right,
                               const StereoParams& p) {
  const DisparityMap dl = match_stereo(left, right, p);
  const DisparityMap dr = match_stereo_right(left, right, p);
  return lr_consistency_filter(dl, dr, p.lr_consistency_tol);
}

std::pair<Mask, DepthMap> sparse_targets(const DisparityMap& d, const ConfidenceMap& wc,
                                         const StereoCalibration& cal, double min_conf) {
  require_same_shape(d, wc, "sparse_targets");
  if (!(min_conf >= 0.0)) throw ConfigError("sparse_targets: min_conf must be >= 0");
  const DepthMap depth = disparity_to_depth(d, cal);
  Mask mask(d.width(), d.height(), 0);
  DepthMap targets(d.width(), d.height(), kInvalid);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!is_valid(d[i]) || !(wc[i] >= min_conf)) continue;
    mask[i] = 1;
    targets[i] = depth[i];
  }
  return {std::move(mask), std::move(targets)};
}

}  // namespace depthfuse
