#pragma once

#include <span>
#include <vector>

namespace depthfuse::filters {

/// Dense real-valued plane used by the convolution helpers.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  /// Edge-replicated read.
  double clamped(int x, int y) const;
};

/// Normalized 1-D Gaussian of length 2*radius+1.
std::vector<double> gaussian_kernel(int radius, double sigma);

/// Separable convolution (rows, then columns) with edge replication.
/// The kernel has odd length and is applied centered.
Plane convolve_separable(const Plane& in, std::span<const double> kernel);

/// Mean over a (2*radius+1)^2 window with edge replication.
Plane box_mean(const Plane& in, int radius);

}  // namespace depthfuse::filters
