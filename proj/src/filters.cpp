#include "depthfuse/filters.hpp"

#include <algorithm>
#include <cmath>

#include "depthfuse/errors.hpp"

namespace depthfuse::filters {

double Plane::clamped(int x, int y) const {
  x = std::clamp(x, 0, width - 1);
  y = std::clamp(y, 0, height - 1);
  return at(x, y);
}

std::vector<double> gaussian_kernel(int radius, double sigma) {
  if (radius < 0 || !(sigma > 0.0)) throw ConfigError("gaussian_kernel: invalid radius or sigma");
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

Plane convolve_separable(const Plane& in, std::span<const double> kernel) {
  if (kernel.size() % 2 == 0) throw ConfigError("convolve_separable: kernel length must be odd");
  const int r = static_cast<int>(kernel.size() / 2);
  Plane tmp(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * in.clamped(x + k, y);
      tmp.at(x, y) = acc;
    }
  }
  Plane out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * tmp.clamped(x, y + k);
      out.at(x, y) = acc;
    }
  }
  return out;
}

Plane box_mean(const Plane& in, int radius) {
  const std::vector<double> k(2 * radius + 1, 1.0 / (2 * radius + 1));
  return convolve_separable(in, k);
}

}  // namespace depthfuse::filters
