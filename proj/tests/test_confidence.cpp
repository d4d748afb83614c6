#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "depthfuse/confidence.hpp"
#include "depthfuse/filters.hpp"
#include "support/gen.hpp"

namespace depthfuse {
namespace {

// Columns [0, edge) at `lo`, the rest at `hi`.
GrayImage vertical_step(int w, int h, int edge, float lo = 0.0f, float hi = 1.0f) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = x < edge ? lo : hi;
  }
  return img;
}

TEST(VerticalSobel, ConstantImageHasNoResponse) {
  const GrayImage s = vertical_sobel(GrayImage(12, 9, 0.37f));
  for (float v : s.pixels()) EXPECT_EQ(v, 0.0f);
}

TEST(VerticalSobel, UnitStepGivesUnitResponseOnBothEdgeColumns) {
  // Hand convolution: at x = 4 and x = 5 the kernel sees 0 on one side and 1
  // on the other in all three rows: (1 + 2 + 1) / 4 = 1. Elsewhere both
  // sides agree.
  const GrayImage s = vertical_sobel(vertical_step(10, 6, 5));
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 10; ++x) {
      EXPECT_FLOAT_EQ(s.at(x, y), (x == 4 || x == 5) ? 1.0f : 0.0f) << x << "," << y;
    }
  }
}

TEST(VerticalSobel, HorizontalStepIsInvisible) {
  GrayImage img(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) img.at(x, y) = y < 5 ? 0.0f : 1.0f;
  }
  const GrayImage s = vertical_sobel(img);
  for (float v : s.pixels()) EXPECT_EQ(v, 0.0f);
}

TEST(VerticalSobel, RejectsImagesBelowKernelSize) {
  EXPECT_THROW(vertical_sobel(GrayImage(2, 5)), ConfigError);
}

TEST(EdgeMask, ThresholdIsStrict) {
  const GrayImage at_threshold = vertical_step(10, 4, 5, 0.0f, 0.25f);
  EXPECT_EQ(count(edge_mask(at_threshold, 0.25)), 0u);
  const GrayImage above = vertical_step(10, 4, 5, 0.0f, 0.5f);
  EXPECT_EQ(count(edge_mask(above, 0.25)), 8u);
}

TEST(BuildConfidence, TexturelessImageIsAllZero) {
  const ConfidenceMap wc = build_confidence(GrayImage(40, 30, 0.5f), {});
  for (double v : wc.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(BuildConfidence, SingleEdgePeaksAtOneAndDecaysWithDistance) {
  const int w = 80, edge = 40;
  const ConfidenceParams p;
  const ConfidenceMap wc = build_confidence(vertical_step(w, 30, edge), p);
  const int y = 15;
  EXPECT_DOUBLE_EQ(wc.at(edge - 1, y), 1.0);
  EXPECT_DOUBLE_EQ(wc.at(edge, y), 1.0);
  for (int k = 1; edge + k < w; ++k) {
    // Edge columns are edge-1 and edge; distance k to the right of both.
    const double right = wc.at(edge + k, y);
    const double left = wc.at(edge - 1 - k, y);
    EXPECT_NEAR(right, left, 1e-12);
    EXPECT_LE(right, wc.at(edge + k - 1, y));
    if (k <= p.blur_radius) {
      EXPECT_GT(right, 0.0);
      EXPECT_LT(right, wc.at(edge + k - 1, y));
    } else {
      EXPECT_EQ(right, 0.0);
    }
  }
}

TEST(BuildConfidence, CloseEdgePairLeavesNoGapBetweenThem) {
  // Steps at x = 30 and x = 50: the edge sets are 20 px apart, less than
  // twice the blur radius.
  GrayImage img(80, 20);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 80; ++x) img.at(x, y) = (x >= 30 && x < 50) ? 1.0f : 0.0f;
  }
  const ConfidenceMap wc = build_confidence(img, {});
  for (int x = 29; x <= 50; ++x) EXPECT_GT(wc.at(x, 10), 0.0) << x;
}

TEST(BuildConfidence, BoundedWithUnitMaximum) {
  testing::Gen g(21);
  for (int trial = 0; trial < 10; ++trial) {
    const ConfidenceMap wc = build_confidence(g.noise(g.integer(3, 50), g.integer(3, 50)), {});
    double mx = 0.0;
    for (double v : wc.pixels()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      mx = std::max(mx, v);
    }
    EXPECT_EQ(mx, 1.0);
  }
}

TEST(BuildConfidence, InvariantToAffineLuminanceKeepingTheEdgeSet) {
  // Blocks of 0/1: Sobel responses are 0 or >= 0.25, so a gain of 0.5 and an
  // offset keep every response on the same side of the 0.1 threshold.
  testing::Gen g(22);
  GrayImage img(64, 32);
  for (int by = 0; by < 4; ++by) {
    for (int bx = 0; bx < 8; ++bx) {
      const float v = g.chance(0.5) ? 1.0f : 0.0f;
      for (int y = by * 8; y < by * 8 + 8; ++y) {
        for (int x = bx * 8; x < bx * 8 + 8; ++x) img.at(x, y) = v;
      }
    }
  }
  GrayImage scaled = img;
  for (auto& v : scaled.pixels()) v = 0.5f * v + 0.25f;
  ASSERT_EQ(edge_mask(img, 0.1), edge_mask(scaled, 0.1));
  EXPECT_EQ(build_confidence(img, {}), build_confidence(scaled, {}));
}

TEST(BuildConfidence, RejectsInvalidParameters) {
  EXPECT_THROW(build_confidence(GrayImage(10, 10), {0.1, -1, 5.0}), ConfigError);
  EXPECT_THROW(build_confidence(GrayImage(10, 10), {0.1, 10, 0.0}), ConfigError);
}

TEST(GaussianKernel, NormalizedAndSymmetric) {
  for (int r : {0, 1, 5, 10}) {
    const auto k = filters::gaussian_kernel(r, 5.0);
    ASSERT_EQ(k.size(), static_cast<std::size_t>(2 * r + 1));
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-15);
    for (int i = 0; i < r; ++i) EXPECT_EQ(k[i], k[2 * r - i]);
  }
}

TEST(ConvolveSeparable, ConstantPlaneIsAFixedPoint) {
  filters::Plane p(23, 17, 0.731);
  const auto out = filters::convolve_separable(p, filters::gaussian_kernel(10, 5.0));
  for (double v : out.data) EXPECT_NEAR(v, 0.731, 1e-14);
}

TEST(ConvolveSeparable, MatchesDirectTwoDimensionalSum) {
  testing::Gen g(23);
  filters::Plane p(15, 11);
  for (auto& v : p.data) v = g.uniform(-1.0, 1.0);
  const auto k = filters::gaussian_kernel(3, 1.5);
  const auto out = filters::convolve_separable(p, k);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      double acc = 0.0;
      for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
          const int xx = std::clamp(x + dx, 0, p.width - 1);
          const int yy = std::clamp(y + dy, 0, p.height - 1);
          acc += k[dx + 3] * k[dy + 3] * p.at(xx, yy);
        }
      }
      EXPECT_NEAR(out.at(x, y), acc, 1e-12);
    }
  }
}

}  // namespace
}  // namespace depthfuse
