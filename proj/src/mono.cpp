#include "depthfuse/mono.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "depthfuse/filters.hpp"
#include "depthfuse/io.hpp"

namespace depthfuse {

namespace {

constexpr std::string_view kModelHeader = "depthfuse-linear-model 1";

double dot(const FeatureVector& w, const FeatureVector& f) {
  double acc = 0.0;
  for (std::size_t k = 0; k < kFeatureCount; ++k) acc += w[k] * f[k];
  return acc;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

FeatureGrid extract_features(const GrayImage& img) {
  if (img.width() < 9 || img.height() < 9) throw ConfigError("extract_features: image must be at least 9x9");
  const int w = img.width();
  const int h = img.height();

  filters::Plane lum(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) lum.data[i] = img[i];

  const filters::Plane mean = filters::box_mean(lum, 2);
  filters::Plane laplace(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = lum.at(x, y);
      laplace.at(x, y) = std::abs((lum.clamped(x - 1, y) - c) + (lum.clamped(x + 1, y) - c) +
                                  (lum.clamped(x, y - 1) - c) + (lum.clamped(x, y + 1) - c));
    }
  }
  const filters::Plane tex3 = filters::box_mean(laplace, 1);
  const filters::Plane tex5 = filters::box_mean(laplace, 2);
  const filters::Plane tex9 = filters::box_mean(laplace, 4);

  FeatureGrid grid(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mean.at(x, y);
      double var = 0.0;
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          const double d = lum.clamped(x + dx, y + dy) - m;
          var += d * d;
        }
      }
      FeatureVector& f = grid.at(x, y);
      f[0] = static_cast<double>(y) / (h - 1);
      f[1] = static_cast<double>(x) / (w - 1);
      f[2] = m;
      f[3] = var / 25.0;
      f[4] = std::abs(lum.clamped(x, y + 1) - lum.clamped(x, y - 1)) / 2.0;
      f[5] = std::abs(lum.clamped(x + 1, y) - lum.clamped(x - 1, y)) / 2.0;
      f[6] = tex3.at(x, y);
      f[7] = tex5.at(x, y);
      f[8] = tex9.at(x, y);
      f[9] = 1.0;
    }
  }
  return grid;
}

SslDataset build_dataset(const FeatureGrid& features, const DepthMap& targets, const Mask& c_mask,
                         std::size_t max_samples, std::uint64_t seed) {
  if (features.width() != targets.width() || features.height() != targets.height()) {
    throw ConfigError("build_dataset: feature and target dimensions differ");
  }
  require_same_shape(targets, c_mask, "build_dataset");

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < c_mask.size(); ++i) {
    if (c_mask[i] && is_valid(targets[i]) && targets[i] > 0.0) eligible.push_back(i);
  }
  if (eligible.empty()) throw DataError("no confident targets");

  std::vector<std::size_t> chosen;
  if (eligible.size() <= max_samples) {
    chosen = std::move(eligible);
  } else {
    std::mt19937_64 rng(seed);
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(chosen), max_samples, rng);
  }

  SslDataset ds;
  ds.reserve(chosen.size());
  const int w = targets.width();
  for (std::size_t i : chosen) {
    ds.push_back({static_cast<int>(i % w), static_cast<int>(i / w), features[i], targets[i]});
  }
  return ds;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train: learning_rate must be finite and >= 0");
  }
  if (lr_decay_every < 1) throw ConfigError("train: lr_decay_every must be >= 1");
  if (!(lr_decay_factor > 0.0)) throw ConfigError("train: lr_decay_factor must be positive");
  if (!(output_floor > 0.0)) throw ConfigError("train: output_floor must be positive");
}

double dataset_mae(const RegressorModel& model, const SslDataset& ds) {
  double acc = 0.0;
  for (const auto& s : ds) acc += std::abs(dot(model.weights, s.features) - s.target);
  return acc / static_cast<double>(ds.size());
}

namespace {

// Per-feature affine standardization z = (f - mu) / sd. Constant features
// (including the bias) keep sd = 0 and are passed through unchanged.
struct Standardizer {
  FeatureVector mu{};
  FeatureVector sd{};

  explicit Standardizer(const SslDataset& ds) {
    const double n = static_cast<double>(ds.size());
    for (const auto& s : ds) {
      for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) mu[k] += s.features[k];
    }
    for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) mu[k] /= n;
    for (const auto& s : ds) {
      for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) {
        const double d = s.features[k] - mu[k];
        sd[k] += d * d;
      }
    }
    for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) {
      sd[k] = std::sqrt(sd[k] / n);
      if (!(sd[k] > 1e-12)) {
        mu[k] = 0.0;
        sd[k] = 0.0;
      }
    }
  }

  FeatureVector apply(const FeatureVector& f) const {
    FeatureVector z = f;
    for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) {
      z[k] = sd[k] > 0.0 ? (f[k] - mu[k]) / sd[k] : 0.0;
    }
    return z;
  }

  // Weights over raw features equivalent to v over standardized ones.
  FeatureVector to_raw(const FeatureVector& v) const {
    FeatureVector w{};
    double bias = v[kFeatureCount - 1];
    for (std::size_t k = 0; k + 1 < kFeatureCount; ++k) {
      if (sd[k] == 0.0) continue;
      w[k] = v[k] / sd[k];
      bias -= w[k] * mu[k];
    }
    w[kFeatureCount - 1] = bias;
    return w;
  }
};

}  // namespace

TrainResult train(const SslDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw DataError("train: empty dataset");

  const Standardizer norm(ds);
  std::vector<FeatureVector> z;
  z.reserve(ds.size());
  for (const auto& s : ds) z.push_back(norm.apply(s.features));

  std::vector<double> targets;
  targets.reserve(ds.size());
  for (const auto& s : ds) targets.push_back(s.target);
  const auto mid = targets.begin() + static_cast<std::ptrdiff_t>((targets.size() - 1) / 2);
  std::nth_element(targets.begin(), mid, targets.end());
  FeatureVector v{};
  v[kFeatureCount - 1] = *mid;

  TrainResult result;
  RegressorModel& model = result.model;
  model.floor = cfg.output_floor;
  auto record_loss = [&] {
    model.weights = norm.to_raw(v);
    const double loss = dataset_mae(model, ds);
    if (!std::isfinite(loss)) {
      throw NumericalError("training diverged (non-finite loss); lower the learning rate");
    }
    result.loss_history.push_back(loss);
  };
  record_loss();

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate * std::pow(cfg.lr_decay_factor, epoch / cfg.lr_decay_every);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      FeatureVector grad{};
      for (std::size_t j = start; j < end; ++j) {
        const FeatureVector& f = z[order[j]];
        const double g = sign(dot(v, f) - ds[order[j]].target);
        if (g == 0.0) continue;
        for (std::size_t k = 0; k < kFeatureCount; ++k) grad[k] += g * f[k];
      }
      const double scale = lr / static_cast<double>(end - start);
      for (std::size_t k = 0; k < kFeatureCount; ++k) v[k] -= scale * grad[k];
    }
    record_loss();
  }
  return result;
}

DepthMap predict(const RegressorModel& model, const FeatureGrid& features) {
  if (!(model.floor > 0.0)) throw ConfigError("predict: model floor must be positive");
  DepthMap z(features.width(), features.height());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double v = dot(model.weights, features[i]);
    z[i] = std::isfinite(v) ? std::max(model.floor, v) : model.floor;
  }
  return z;
}

void save_model(const std::filesystem::path& path, const RegressorModel& model) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write model '" + path.string() + "'");
  char buf[64];
  out << kModelHeader << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", model.floor);
  out << "floor " << buf << '\n';
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", model.weights[k]);
    out << kFeatureNames[k] << ' ' << buf << '\n';
  }
  if (!out) throw DataError("cannot write model '" + path.string() + "'");
}

RegressorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kModelHeader) {
    throw DataError("'" + path.string() + "' is not a depthfuse model file");
  }
  auto read_entry = [&](std::string_view expected) {
    std::string name;
    double value = 0.0;
    if (!std::getline(in, line)) throw DataError("model file truncated at '" + std::string(expected) + "'");
    std::istringstream ls(line);
    if (!(ls >> name >> value) || name != expected || !std::isfinite(value)) {
      throw DataError("model file: expected entry '" + std::string(expected) + "', got '" + line + "'");
    }
    return value;
  };
  RegressorModel model;
  model.floor = read_entry("floor");
  if (!(model.floor > 0.0)) throw DataError("model file: floor must be positive");
  for (std::size_t k = 0; k < kFeatureCount; ++k) model.weights[k] = read_entry(kFeatureNames[k]);
  return model;
}

DepthMap import_external(const std::filesystem::path& path, int expected_width, int expected_height) {
  DepthMap z = io::read_depth_any(path);
  if ((expected_width >= 0 && z.width() != expected_width) ||
      (expected_height >= 0 && z.height() != expected_height)) {
    throw DataError("external depth '" + path.string() + "' does not match the scene dimensions");
  }
  return z;
}

}  // namespace depthfuse
