#include <gtest/gtest.h>

#include <cmath>

#include "depthfuse/core.hpp"
#include "support/gen.hpp"

namespace depthfuse {
namespace {

const StereoCalibration kCal{100.0, 0.5, 64, 16};

TEST(DisparityToDepth, TriangulatesFocalTimesBaselineOverDisparity) {
  DisparityMap d(3, 1);
  d[0] = 10.0;
  d[1] = 0.0;
  d[2] = kInvalid;
  const DepthMap z = disparity_to_depth(d, kCal);
  EXPECT_DOUBLE_EQ(z[0], 5.0);
  EXPECT_FALSE(is_valid(z[1]));
  EXPECT_FALSE(is_valid(z[2]));
}

TEST(DepthToDisparity, InvertsTriangulation) {
  DepthMap z(2, 1);
  z[0] = 5.0;
  z[1] = kInvalid;
  const DisparityMap d = depth_to_disparity(z, kCal);
  EXPECT_DOUBLE_EQ(d[0], 10.0);
  EXPECT_FALSE(is_valid(d[1]));
}

TEST(DepthToDisparity, RoundTripOnRandomCalibrations) {
  testing::Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const StereoCalibration cal{g.uniform(50.0, 2000.0), g.uniform(0.05, 1.0), 64, 16};
    DisparityMap d(16, 4);
    for (auto& v : d.pixels()) v = g.chance(0.2) ? kInvalid : g.uniform(0.01, 200.0);
    const DisparityMap back = depth_to_disparity(disparity_to_depth(d, cal), cal);
    for (std::size_t i = 0; i < d.size(); ++i) {
      ASSERT_EQ(is_valid(d[i]), is_valid(back[i]));
      if (is_valid(d[i])) {
        EXPECT_LE(std::abs(back[i] - d[i]), 1e-9 * d[i]);
      }
    }
  }
}

TEST(DisparityToDepth, StrictlyDecreasingAndFinite) {
  testing::Gen g(12);
  DisparityMap d(1000, 1);
  for (int i = 0; i < 1000; ++i) d[i] = 1e-6 + i * 0.25 + g.uniform(0.0, 0.2);
  const DepthMap z = disparity_to_depth(d, kCal);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_TRUE(std::isfinite(z[i]));
    if (i > 0) EXPECT_LT(z[i], z[i - 1]);
  }
}

TEST(DisparityToDepth, TinyDisparityNeverYieldsInfinity) {
  DisparityMap d(2, 1);
  d[0] = 1e-320;
  d[1] = -3.0;
  const DepthMap z = disparity_to_depth(d, kCal);
  for (double v : z.pixels()) EXPECT_TRUE(!is_valid(v) || std::isfinite(v));
  EXPECT_FALSE(is_valid(z[1]));
}

TEST(ValidMask, TracksSentinelsElementwise) {
  DepthMap all_invalid(4, 3, kInvalid);
  EXPECT_EQ(count(valid_mask(all_invalid)), 0u);
  DepthMap all_valid(4, 3, 2.0);
  EXPECT_EQ(count(valid_mask(all_valid)), 12u);

  testing::Gen g(13);
  const DepthMap mixed = g.depth(9, 7, 1.0, 5.0, 0.4);
  const Mask m = valid_mask(mixed);
  for (std::size_t i = 0; i < mixed.size(); ++i) EXPECT_EQ(m[i] != 0, is_valid(mixed[i]));
}

TEST(StereoCalibration, RejectsNonPositiveValues) {
  EXPECT_THROW((StereoCalibration{0.0, 0.5, 64, 16}.validate()), ConfigError);
  EXPECT_THROW((StereoCalibration{100.0, -1.0, 64, 16}.validate()), ConfigError);
  EXPECT_THROW((StereoCalibration{100.0, 0.5, 0, 16}.validate()), ConfigError);
  EXPECT_THROW((StereoCalibration{100.0, 0.5, 64, 0}.validate()), std::invalid_argument);
}

TEST(Raster, RowMajorTopLeftOrigin) {
  DepthMap z(3, 2, 0.0);
  z.at(2, 1) = 7.0;
  EXPECT_EQ(z[5], 7.0);
  EXPECT_EQ(z.row(1)[2], 7.0);
  EXPECT_THROW(DepthMap(2, 2, std::vector<double>(3)), ConfigError);
  EXPECT_THROW(require_same_shape(DepthMap(2, 2), Mask(2, 3), "x"), ConfigError);
}

}  // namespace
}  // namespace depthfuse
