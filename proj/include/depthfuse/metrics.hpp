#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "depthfuse/core.hpp"

namespace depthfuse {

/// Standard depth-estimation error suite over the pixels valid in both maps.
/// Logarithms are natural.
struct MetricsReport {
  double delta1 = 0.0;  // fraction with max(y/y*, y*/y) < 1.25
  double delta2 = 0.0;  // ... < 1.25^2
  double delta3 = 0.0;  // ... < 1.25^3
  double abs_rel = 0.0;
  double sqr_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;
  /// (1/2N) * sum_i (log y_i - log y*_i + mean_j(log y*_j - log y_j))^2.
  /// Reported without a square root, as the formula is usually printed.
  double scale_invariant_log = 0.0;
  std::size_t n = 0;

  /// Metric values in reporting order (see kMetricNames).
  std::array<double, 8> values() const;
};

/// Row labels in reporting order: the three thresholds, abs/sqr relative
/// difference, linear RMSE, log RMSE, scale-invariant log error.
inline constexpr std::array<std::string_view, 8> kMetricNames = {
    "threshold delta<1.25", "threshold delta<1.25^2", "threshold delta<1.25^3",
    "abs relative difference", "sqr relative difference", "RMSE (linear)",
    "RMSE (log)", "RMSE (log, scale inv.)"};

/// Throws DataError when no pixel is valid in both maps.
MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt);

/// Same as evaluate() restricted to pixels where `mask` is set.
MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt, const Mask& mask);

/// Metrics over explicit (prediction, ground truth) pairs; both > 0.
MetricsReport evaluate_pairs(std::span<const double> pred, std::span<const double> gt);

struct Percentiles {
  double p5 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
};

/// Absolute error distribution per ground-truth depth bin. Bin i covers
/// [edges[i], edges[i+1]); the last bin is [edges.back(), inf). Values below
/// edges.front() are not binned.
struct DistanceProfile {
  std::vector<double> edges;
  std::vector<std::optional<Percentiles>> bins;  // nullopt marks an empty bin
  std::vector<std::size_t> counts;
};

/// Ground-truth depth counts with the same bin layout as DistanceProfile.
struct DepthHistogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t below_range = 0;  // valid values < edges.front()
};

/// Empirical quantile with linear interpolation between order statistics
/// (position q*(n-1) in the sorted sample). `sorted` must be non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

DistanceProfile distance_profile(const DepthMap& pred, const DepthMap& gt,
                                 std::span<const double> edges);
/// Pooled over several frames.
DistanceProfile distance_profile(std::span<const double> pred, std::span<const double> gt,
                                 std::span<const double> edges);

DepthHistogram depth_histogram(const DepthMap& gt, std::span<const double> edges);
DepthHistogram depth_histogram(std::span<const double> gt, std::span<const double> edges);

}  // namespace depthfuse
