#pragma once

#include "depthfuse/core.hpp"

namespace depthfuse {

struct ConfidenceParams {
  double sobel_threshold = 0.1;  // on Sobel responses normalized to [0,1]
  int blur_radius = 10;          // 21x21 kernel
  double blur_sigma = 5.0;

  void validate() const;
};

/// Absolute response of the 3x3 Sobel kernel differentiating along x, i.e.
/// the detector of vertical edges. Responses are divided by the kernel gain 4
/// so a unit step yields 1. Borders replicate the edge pixels.
GrayImage vertical_sobel(const GrayImage& img);

/// Stereo confidence: vertical Sobel, binarized (strictly greater than the
/// threshold), Gaussian-blurred and divided by the blurred maximum. An image
/// with no pixel above the threshold produces an all-zero map.
ConfidenceMap build_confidence(const GrayImage& img, const ConfidenceParams& p);

/// The binarized edge set that build_confidence blurs.
Mask edge_mask(const GrayImage& img, double sobel_threshold);

}  // namespace depthfuse
