#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "depthfuse/core.hpp"

namespace depthfuse::io {

/// Raw single-channel 8- or 16-bit PNG contents.
struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> data;  // row-major
};

/// Reads a PNG as single-channel values. Color images are reduced to
/// luminance with Rec. 601 weights and rounded to the source bit depth;
/// alpha is dropped. Throws DataError on unreadable files.
PngImage read_png(const std::filesystem::path& path);
/// Writes 8-bit (values <= 255) or 16-bit grayscale without ancillary chunks.
void write_png(const std::filesystem::path& path, const PngImage& img);

/// Luminance image in [0,1].
GrayImage read_gray(const std::filesystem::path& path);
/// Stored as 8-bit grayscale, value = round(v * 255).
void write_gray(const std::filesystem::path& path, const GrayImage& img);

/// Depth in meters to 16-bit value round(z * 256); invalid or out-of-range
/// depths become 0.
std::uint16_t encode_depth(double meters);
/// 16-bit value to meters; 0 is invalid.
double decode_depth(std::uint16_t value);

DepthMap read_depth_png(const std::filesystem::path& path);
void write_depth_png(const std::filesystem::path& path, const DepthMap& z);

/// Confidence as 8-bit PNG, value = round(W_c * 255).
void write_confidence_png(const std::filesystem::path& path, const ConfidenceMap& wc);
ConfidenceMap read_confidence_png(const std::filesystem::path& path);

/// 8-bit mask, 255 = set.
void write_mask_png(const std::filesystem::path& path, const Mask& m);
Mask read_mask_png(const std::filesystem::path& path);

/// Single-channel PFM ("Pf"), little-endian float32, scale -1.0, rows stored
/// bottom-up. Invalid pixels are written as 0 and read back as invalid.
struct PfmImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // row-major, top row first
};
PfmImage read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const PfmImage& img);

/// Depth/disparity maps through PFM. Zero (and non-finite values) map to
/// kInvalid on load.
DepthMap read_depth_pfm(const std::filesystem::path& path);
void write_depth_pfm(const std::filesystem::path& path, const DepthMap& z);
DisparityMap read_disparity_pfm(const std::filesystem::path& path);
void write_disparity_pfm(const std::filesystem::path& path, const DisparityMap& d);

/// Depth from .pfm (meters) or .png (16-bit, x256), chosen by extension.
DepthMap read_depth_any(const std::filesystem::path& path);

}  // namespace depthfuse::io
