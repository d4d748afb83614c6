#include "depthfuse/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "depthfuse/filters.hpp"

namespace depthfuse {

void ConfidenceParams::validate() const {
  if (!(sobel_threshold > 0.0)) throw ConfigError("confidence: sobel_threshold must be positive");
  if (blur_radius < 1) throw ConfigError("confidence: blur_radius must be positive");
  if (!(blur_sigma > 0.0)) throw ConfigError("confidence: blur_sigma must be positive");
}

GrayImage vertical_sobel(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw ConfigError("vertical_sobel: image must be at least 3x3");
  }
  const int w = img.width();
  const int h = img.height();
  auto px = [&](int x, int y) -> double {
    return img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  GrayImage out(w, h, 0.0f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double g = (px(x + 1, y - 1) - px(x - 1, y - 1)) +
                       2.0 * (px(x + 1, y) - px(x - 1, y)) +
                       (px(x + 1, y + 1) - px(x - 1, y + 1));
      out.at(x, y) = static_cast<float>(std::min(1.0, std::abs(g) / 4.0));
    }
  }
  return out;
}

Mask edge_mask(const GrayImage& img, double sobel_threshold) {
  const GrayImage sobel = vertical_sobel(img);
  Mask m(img.width(), img.height(), 0);
  for (std::size_t i = 0; i < sobel.size(); ++i) m[i] = sobel[i] > sobel_threshold ? 1 : 0;
  return m;
}

ConfidenceMap build_confidence(const GrayImage& img, const ConfidenceParams& p) {
  p.validate();
  const Mask edges = edge_mask(img, p.sobel_threshold);
  ConfidenceMap wc(img.width(), img.height(), 0.0);
  if (count(edges) == 0) return wc;

  filters::Plane binary(img.width(), img.height());
  for (std::size_t i = 0; i < edges.size(); ++i) binary.data[i] = edges[i] ? 1.0 : 0.0;
  const auto kernel = filters::gaussian_kernel(p.blur_radius, p.blur_sigma);
  const filters::Plane blurred = filters::convolve_separable(binary, kernel);

  const double peak = *std::max_element(blurred.data.begin(), blurred.data.end());
  for (std::size_t i = 0; i < wc.size(); ++i) {
    wc[i] = std::clamp(blurred.data[i] / peak, 0.0, 1.0);
  }
  return wc;
}

}  // namespace depthfuse
