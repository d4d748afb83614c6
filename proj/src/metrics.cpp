#include "depthfuse/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace depthfuse {

std::array<double, 8> MetricsReport::values() const {
  return {delta1, delta2, delta3, abs_rel, sqr_rel, rmse, rmse_log, scale_invariant_log};
}

namespace {

void check_edges(std::span<const double> edges) {
  if (edges.empty()) throw ConfigError("bin edges must not be empty");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ConfigError("bin edges must be strictly increasing");
  }
}

// Index of the bin holding v, or -1 below the first edge.
long bin_of(std::span<const double> edges, double v) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<long>(it - edges.begin()) - 1;
}

bool usable(double v) { return is_valid(v) && v > 0.0 && std::isfinite(v); }

}  // namespace

MetricsReport evaluate_pairs(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) throw ConfigError("evaluate: prediction and ground truth sizes differ");
  const std::size_t n = pred.size();
  if (n == 0) throw DataError("evaluate: no pixels valid in both prediction and ground truth");

  std::size_t t1 = 0, t2 = 0, t3 = 0;
  double abs_rel = 0.0, sqr_rel = 0.0, sq = 0.0, sq_log = 0.0, log_diff_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = pred[i];
    const double ys = gt[i];
    const double delta = std::max(y / ys, ys / y);
    t1 += delta < 1.25 ? 1 : 0;
    t2 += delta < 1.25 * 1.25 ? 1 : 0;
    t3 += delta < 1.25 * 1.25 * 1.25 ? 1 : 0;
    const double err = y - ys;
    abs_rel += std::abs(err) / ys;
    sqr_rel += err * err / ys;
    sq += err * err;
    const double ld = std::log(y) - std::log(ys);
    sq_log += ld * ld;
    log_diff_sum += ld;
  }
  const double nn = static_cast<double>(n);
  // mean over j of (log y*_j - log y_j)
  const double shift = -log_diff_sum / nn;
  double si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double term = std::log(pred[i]) - std::log(gt[i]) + shift;
    si += term * term;
  }

  MetricsReport r;
  r.n = n;
  r.delta1 = static_cast<double>(t1) / nn;
  r.delta2 = static_cast<double>(t2) / nn;
  r.delta3 = static_cast<double>(t3) / nn;
  r.abs_rel = abs_rel / nn;
  r.sqr_rel = sqr_rel / nn;
  r.rmse = std::sqrt(sq / nn);
  r.rmse_log = std::sqrt(sq_log / nn);
  r.scale_invariant_log = si / (2.0 * nn);
  return r;
}

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt, const Mask& mask) {
  require_same_shape(pred, gt, "evaluate");
  require_same_shape(pred, mask, "evaluate");
  std::vector<double> p, g;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask[i] && usable(pred[i]) && usable(gt[i])) {
      p.push_back(pred[i]);
      g.push_back(gt[i]);
    }
  }
  return evaluate_pairs(p, g);
}

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt) {
  return evaluate(pred, gt, Mask(pred.width(), pred.height(), 1));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

DistanceProfile distance_profile(std::span<const double> pred, std::span<const double> gt,
                                 std::span<const double> edges) {
  check_edges(edges);
  if (pred.size() != gt.size()) throw ConfigError("distance_profile: size mismatch");

  std::vector<std::vector<double>> errors(edges.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!usable(pred[i]) || !usable(gt[i])) continue;
    ++total;
    const long b = bin_of(edges, gt[i]);
    if (b >= 0) errors[static_cast<std::size_t>(b)].push_back(std::abs(pred[i] - gt[i]));
  }
  if (total == 0) throw DataError("distance_profile: no pixels valid in both maps");

  DistanceProfile prof;
  prof.edges.assign(edges.begin(), edges.end());
  for (auto& e : errors) {
    prof.counts.push_back(e.size());
    if (e.empty()) {
      prof.bins.emplace_back(std::nullopt);
      continue;
    }
    std::sort(e.begin(), e.end());
    prof.bins.emplace_back(Percentiles{quantile_sorted(e, 0.05), quantile_sorted(e, 0.25),
                                       quantile_sorted(e, 0.50), quantile_sorted(e, 0.75),
                                       quantile_sorted(e, 0.95)});
  }
  return prof;
}

DistanceProfile distance_profile(const DepthMap& pred, const DepthMap& gt,
                                 std::span<const double> edges) {
  require_same_shape(pred, gt, "distance_profile");
  return distance_profile(pred.pixels(), gt.pixels(), edges);
}

DepthHistogram depth_histogram(std::span<const double> gt, std::span<const double> edges) {
  check_edges(edges);
  DepthHistogram hist;
  hist.edges.assign(edges.begin(), edges.end());
  hist.counts.assign(edges.size(), 0);
  for (double v : gt) {
    if (!usable(v)) continue;
    const long b = bin_of(edges, v);
    if (b < 0) {
      ++hist.below_range;
    } else {
      ++hist.counts[static_cast<std::size_t>(b)];
    }
  }
  return hist;
}

DepthHistogram depth_histogram(const DepthMap& gt, std::span<const double> edges) {
  return depth_histogram(gt.pixels(), edges);
}

}  // namespace depthfuse
