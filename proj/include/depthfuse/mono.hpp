#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "depthfuse/core.hpp"

namespace depthfuse {

inline constexpr std::size_t kFeatureCount = 10;

/// Feature order inside a FeatureVector.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "row", "col", "mean", "variance", "grad_vertical", "grad_horizontal",
    "texture_3", "texture_5", "texture_9", "bias"};

using FeatureVector = std::array<double, kFeatureCount>;

/// Dense per-pixel features, row-major.
class FeatureGrid {
 public:
  FeatureGrid() = default;
  FeatureGrid(int width, int height)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  FeatureVector& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const FeatureVector& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const FeatureVector& operator[](std::size_t i) const { return data_[i]; }
  FeatureVector& operator[](std::size_t i) { return data_[i]; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<FeatureVector> data_;
};

/// Per pixel: normalized row and column coordinates (0 at the top/left,
/// 1 at the bottom/right), 5x5 mean and variance of luminance, absolute
/// central differences along y and x, the mean absolute Laplacian over 3x3,
/// 5x5 and 9x9 windows, and a constant 1. Windows replicate edge pixels.
/// Throws ConfigError for images smaller than 9x9.
FeatureGrid extract_features(const GrayImage& img);

struct SslSample {
  int x = 0;
  int y = 0;
  FeatureVector features{};
  double target = 0.0;  // meters
};

using SslDataset = std::vector<SslSample>;

/// Seeded uniform subsample (without replacement) of the pixels where the
/// mask is set and the target depth is valid, at most max_samples of them,
/// in raster order. Throws DataError when no such pixel exists.
SslDataset build_dataset(const FeatureGrid& features, const DepthMap& targets, const Mask& c_mask,
                         std::size_t max_samples, std::uint64_t seed);

struct RegressorModel {
  FeatureVector weights{};
  double floor = 0.5;  // meters
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 1024;
  double learning_rate = 1e-2;
  int lr_decay_every = 50;
  double lr_decay_factor = 0.5;
  std::uint64_t seed = 0;
  double output_floor = 0.5;

  void validate() const;
};

struct TrainResult {
  RegressorModel model;
  /// Mean absolute error of the linear response over the whole dataset:
  /// entry 0 before training, entry k after epoch k.
  std::vector<double> loss_history;
};

/// Minimizes the mean absolute error of w . f against the targets with
/// minibatch stochastic subgradient descent (sign(0) = 0). Descent runs on
/// features standardized over the dataset; the returned weights act on raw
/// features. The bias starts at the target median, all other weights at
/// zero. Batches follow a seeded per-epoch shuffle. Throws NumericalError if
/// the loss diverges.
TrainResult train(const SslDataset& ds, const TrainConfig& cfg);

/// Full-dataset mean absolute error of the linear response.
double dataset_mae(const RegressorModel& model, const SslDataset& ds);

/// Dense depth max(floor, w . f).
DepthMap predict(const RegressorModel& model, const FeatureGrid& features);

/// Plain-text model: a header line, the floor, then one "name weight" line
/// per feature in kFeatureNames order. Weights use 17 significant digits.
void save_model(const std::filesystem::path& path, const RegressorModel& model);
RegressorModel load_model(const std::filesystem::path& path);

/// External mono depth (.pfm in meters or 16-bit .png at 1/256 m). When
/// expected dimensions are given, a mismatch throws DataError.
DepthMap import_external(const std::filesystem::path& path, int expected_width = -1,
                         int expected_height = -1);

}  // namespace depthfuse
