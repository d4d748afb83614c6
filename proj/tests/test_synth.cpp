#include <gtest/gtest.h>

#include <cmath>

#include "depthfuse/synth.hpp"
#include "support/gen.hpp"

namespace depthfuse {
namespace {

// Focal length x baseline of the default scene calibration (400 px x 0.1 m).
constexpr double kFb = 40.0;

SceneSpec plane(double disparity) {
  SceneSpec s;
  s.width = 160;
  s.height = 48;
  s.background_depth = kFb / disparity;
  s.seed = 17;
  return s;
}

SceneSpec one_occluder(double d_background, double d_occluder) {
  SceneSpec s;
  s.width = 320;
  s.height = 120;
  s.background_depth = kFb / d_background;
  s.seed = 18;
  Occluder o;
  o.depth = kFb / d_occluder;
  o.x = 150.0;
  o.y = 30.0;
  o.width = 60.0;
  o.height = 50.0;
  s.occluders.push_back(o);
  return s;
}

TEST(Render, SinglePlaneHasConstantDisparityAndBorderStrip) {
  const RenderedScene sc = render(plane(10.0));
  for (double v : sc.gt_disparity.pixels()) EXPECT_NEAR(v, 10.0, 1e-12);
  for (int y = 0; y < sc.occlusion.height(); ++y) {
    for (int x = 0; x < sc.occlusion.width(); ++x) {
      EXPECT_EQ(sc.occlusion.at(x, y) != 0, x < 10) << x << "," << y;
    }
  }
}

TEST(Render, OccluderCastsABandAsWideAsTheDisparityGap) {
  const double db = 8.0, dov = 20.0;
  const SceneSpec s = one_occluder(db, dov);
  const RenderedScene sc = render(s);
  // Occluder silhouette in the left view starts at x = 150 + 20 / 2 = 160;
  // the hidden background band spans the 12 px before it.
  const int left_edge = 160, band = static_cast<int>(dov - db);
  for (int y = 0; y < sc.occlusion.height(); ++y) {
    for (int x = 0; x < sc.occlusion.width(); ++x) {
      const bool rows = y >= 30 && y < 80;
      const bool expected = x < static_cast<int>(db) || (rows && x >= left_edge - band && x < left_edge);
      EXPECT_EQ(sc.occlusion.at(x, y) != 0, expected) << x << "," << y;
    }
  }
  EXPECT_EQ(sc.gt_disparity.at(left_edge, 40), dov);
  EXPECT_EQ(sc.gt_disparity.at(left_edge - 1, 40), db);
  EXPECT_EQ(occlusion_mask(s), sc.occlusion);
}

TEST(Render, OcclusionAreaGrowsWithDisparityGap) {
  std::size_t prev = 0;
  for (double dov = 10.0; dov <= 40.0; dov += 2.5) {
    const std::size_t area = count(occlusion_mask(one_occluder(8.0, dov)));
    EXPECT_GT(area, prev) << dov;
    prev = area;
  }
}

TEST(Render, DepthAndDisparityAgree) {
  const RenderedScene sc = render(random_scene(3));
  const StereoCalibration cal{400.0, 0.1, 64, 16};
  const DepthMap z = disparity_to_depth(sc.gt_disparity, cal);
  for (std::size_t i = 0; i < z.size(); ++i) {
    ASSERT_TRUE(is_valid(sc.gt_depth[i]));
    EXPECT_LE(std::abs(z[i] - sc.gt_depth[i]), 1e-6 * sc.gt_depth[i]);
  }
}

TEST(Render, RightViewIsTheLeftViewShiftedByTheDisparity) {
  // Noise-free single plane at an integer disparity: right(x - d) = left(x).
  const RenderedScene sc = render(plane(12.0));
  for (int y = 0; y < sc.left.height(); ++y) {
    for (int x = 12; x < sc.left.width(); ++x) {
      ASSERT_FLOAT_EQ(sc.right.at(x - 12, y), sc.left.at(x, y)) << x << "," << y;
    }
  }
}

TEST(Render, Deterministic) {
  const SceneSpec s = random_scene(77);
  const RenderedScene a = render(s), b = render(s);
  EXPECT_EQ(a.left, b.left);
  EXPECT_EQ(a.right, b.right);
  EXPECT_EQ(a.gt_depth, b.gt_depth);
  EXPECT_EQ(a.occlusion, b.occlusion);
  SceneSpec other = s;
  other.seed += 1;
  EXPECT_NE(render(other).left, a.left);
}

TEST(Render, ZeroContrastIsUniform) {
  SceneSpec s = plane(8.0);
  s.background_texture.contrast = 0.0;
  const RenderedScene sc = render(s);
  for (float v : sc.left.pixels()) EXPECT_EQ(v, sc.left[0]);
}

TEST(Render, RejectsInvalidSpecs) {
  SceneSpec s = plane(8.0);
  s.background_depth = -1.0;
  EXPECT_THROW(render(s), ConfigError);
  s = one_occluder(8.0, 20.0);
  s.occluders[0].depth = 10.0;
  EXPECT_THROW(render(s), ConfigError);
}

TEST(RandomScene, RespectsOcclusionFractionAndIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneSpec s = random_scene(seed);
    const double frac = static_cast<double>(count(occlusion_mask(s))) / (s.width * s.height);
    EXPECT_GE(frac, 0.05);
    EXPECT_LE(frac, 0.20);
    EXPECT_GE(s.occluders.size(), 1u);
    EXPECT_LE(s.occluders.size(), 3u);
    EXPECT_EQ(render(random_scene(seed)).left, render(s).left);
  }
  RandomSceneOptions bad;
  bad.min_occluders = 4;
  EXPECT_THROW(random_scene(0, bad), ConfigError);
}

TEST(PerturbOracleMono, DegenerateSettings) {
  testing::Gen g(61);
  const DepthMap gt = g.depth(30, 20, 1.0, 10.0, 0.1);
  EXPECT_EQ(perturb_oracle_mono(gt, 0.0, 0.0, 5), gt);
  const DepthMap biased = perturb_oracle_mono(gt, 0.0, 0.2, 5);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (is_valid(gt[i])) {
      EXPECT_EQ(biased[i], gt[i] * 1.2);
    } else {
      EXPECT_FALSE(is_valid(biased[i]));
    }
  }
}

TEST(PerturbOracleMono, RelativeErrorSpreadMatchesSigma) {
  const DepthMap gt(400, 250, 5.0);
  const DepthMap z = perturb_oracle_mono(gt, 0.05, 0.0, 99);
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double e = z[i] / gt[i] - 1.0;
    mean += e;
    sq += e * e;
  }
  mean /= z.size();
  const double sd = std::sqrt(sq / z.size() - mean * mean);
  EXPECT_NEAR(sd, 0.05, 0.005);
  EXPECT_EQ(perturb_oracle_mono(gt, 0.05, 0.0, 99), z);
}

}  // namespace
}  // namespace depthfuse
