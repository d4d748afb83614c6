#pragma once

#include <limits>
#include <utility>

#include "depthfuse/confidence.hpp"
#include "depthfuse/core.hpp"

namespace depthfuse {

struct StereoParams {
  int block_radius = 4;  // 9x9 window
  int max_disparity = 64;
  double lr_consistency_tol = 1.0;
  double uniqueness_ratio = 0.95;
  int subpixel_denominator = 16;

  void validate() const;
};

/// Local SAD block matching of the left image against the right one.
///
/// For every left pixel whose full window and full search range
/// [0, max_disparity] lie inside the image, the integer disparity with the
/// smallest window SAD is selected (ties go to the smaller disparity). The
/// match is rejected unless it is strictly better than, and within
/// uniqueness_ratio of, the best cost outside +/-1 px of the winner. Accepted
/// matches are refined with a parabola through the costs at d-1, d, d+1 and
/// quantized to 1/subpixel_denominator px. Everything else is kInvalid.
///
/// Intensities are quantized to 16 bits before matching so that costs are
/// exact integers: results do not depend on summation order.
DisparityMap match_stereo(const GrayImage& left, const GrayImage& right, const StereoParams& p);

/// Disparity map in the right view's frame (right pixel x matches left
/// pixel x + d), computed by matching the mirrored pair.
DisparityMap match_stereo_right(const GrayImage& left, const GrayImage& right,
                                const StereoParams& p);

/// Keeps a left disparity iff |d_left(x,y) - d_right(x - round(d_left), y)| <= tol.
/// A counterpart that is missing or outside the image counts as an infinite
/// difference, so an infinite tolerance returns the input unchanged.
DisparityMap lr_consistency_filter(const DisparityMap& d_left, const DisparityMap& d_right,
                                   double tol);

/// Left-view matching followed by the left-right consistency check.
DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right,
                               const StereoParams& p);

/// Confident set C: valid disparity with confidence >= min_conf, plus the
/// triangulated depth on that set (kInvalid elsewhere).
std::pair<Mask, DepthMap> sparse_targets(const DisparityMap& d, const ConfidenceMap& wc,
                                         const StereoCalibration& cal, double min_conf);

}  // namespace depthfuse
