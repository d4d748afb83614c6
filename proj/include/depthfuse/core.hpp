#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "depthfuse/errors.hpp"

namespace depthfuse {

/// Marks a pixel without a measurement in disparity and depth maps.
inline constexpr double kInvalid = -1.0;

inline bool is_valid(double v) { return v != kInvalid; }

/// Row-major raster with top-left origin. The tag keeps rasters of the same
/// element type but different meaning (depth vs. disparity) apart.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw ConfigError("raster data length does not match its dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> row(int y) { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const {
    return {data_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  template <typename OtherT, typename OtherTag>
  bool same_shape(const Raster<OtherT, OtherTag>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  bool operator==(const Raster&) const = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w < 0 || h < 0) throw ConfigError("raster dimensions must be non-negative");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct GrayTag;
struct DisparityTag;
struct DepthTag;
struct ConfidenceTag;
struct MaskTag;

/// Luminance in [0,1].
using GrayImage = Raster<float, GrayTag>;
/// Disparity in pixels; kInvalid marks missing values.
using DisparityMap = Raster<double, DisparityTag>;
/// Depth in meters; valid values are > 0, kInvalid marks missing values.
using DepthMap = Raster<double, DepthTag>;
/// Stereo confidence weights in [0,1].
using ConfidenceMap = Raster<double, ConfidenceTag>;
/// Boolean per-pixel set, stored as 0/1 bytes.
using Mask = Raster<std::uint8_t, MaskTag>;

struct StereoCalibration {
  double focal_length = 0.0;  // pixels
  double baseline = 0.0;      // meters
  int max_disparity = 64;     // pixels
  int subpixel_denominator = 16;

  /// Throws ConfigError when any invariant is violated.
  void validate() const;
  double focal_baseline() const { return focal_length * baseline; }
};

DepthMap disparity_to_depth(const DisparityMap& d, const StereoCalibration& cal);
DisparityMap depth_to_disparity(const DepthMap& z, const StereoCalibration& cal);

Mask valid_mask(const DepthMap& m);
Mask valid_mask(const DisparityMap& m);

/// Number of true pixels.
std::size_t count(const Mask& m);

/// Throws ConfigError unless both rasters have identical dimensions.
template <typename A, typename TA, typename B, typename TB>
void require_same_shape(const Raster<A, TA>& a, const Raster<B, TB>& b, const char* what) {
  if (!a.same_shape(b)) throw ConfigError(std::string(what) + ": dimension mismatch");
}

}  // namespace depthfuse
