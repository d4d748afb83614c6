#include "depthfuse/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

namespace depthfuse::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open '" + path.string() + "'");
  return f;
}

// Decoded PNG before channel reduction. All C++ state lives outside the
// setjmp frame so a libpng longjmp skips no destructors.
struct RawPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<png_byte> bytes;
  std::vector<png_bytep> rows;
};

bool decode_png(std::FILE* fp, RawPng& raw) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  raw.width = png_get_image_width(png, info);
  raw.height = png_get_image_height(png, info);
  raw.bit_depth = png_get_bit_depth(png, info);
  raw.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw.bytes.resize(stride * raw.height);
  raw.rows.resize(raw.height);
  for (png_uint_32 y = 0; y < raw.height; ++y) raw.rows[y] = raw.bytes.data() + y * stride;
  png_read_image(png, raw.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_png(std::FILE* fp, const PngImage& img, std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               img.bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  RawPng raw;
  if (!decode_png(f.get(), raw)) throw DataError("cannot decode PNG '" + path.string() + "'");

  PngImage img;
  img.width = static_cast<int>(raw.width);
  img.height = static_cast<int>(raw.height);
  img.bit_depth = raw.bit_depth == 16 ? 16 : 8;
  img.data.resize(static_cast<std::size_t>(raw.width) * raw.height);
  const int bytes_per_sample = raw.bit_depth == 16 ? 2 : 1;
  const int color_channels = raw.channels >= 3 ? 3 : 1;
  const double max_value = raw.bit_depth == 16 ? 65535.0 : 255.0;
  for (png_uint_32 y = 0; y < raw.height; ++y) {
    const png_byte* row = raw.rows[y];
    for (png_uint_32 x = 0; x < raw.width; ++x) {
      auto sample = [&](int c) -> double {
        const png_byte* p = row + (static_cast<std::size_t>(x) * raw.channels + c) * bytes_per_sample;
        return bytes_per_sample == 2 ? (p[0] << 8) | p[1] : p[0];
      };
      double v;
      if (color_channels == 3) {
        v = std::round(0.299 * sample(0) + 0.587 * sample(1) + 0.114 * sample(2));
        v = std::clamp(v, 0.0, max_value);
      } else {
        v = sample(0);
      }
      img.data[static_cast<std::size_t>(y) * raw.width + x] = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const PngImage& img) {
  if (img.bit_depth != 8 && img.bit_depth != 16) throw ConfigError("write_png: bit depth must be 8 or 16");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height || img.width <= 0 ||
      img.height <= 0) {
    throw ConfigError("write_png: data length does not match dimensions");
  }
  const int bps = img.bit_depth / 8;
  const std::size_t stride = static_cast<std::size_t>(img.width) * bps;
  std::vector<png_byte> bytes(stride * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) {
    rows[y] = bytes.data() + y * stride;
    for (int x = 0; x < img.width; ++x) {
      const std::uint16_t v = img.data[static_cast<std::size_t>(y) * img.width + x];
      if (bps == 2) {
        rows[y][2 * x] = static_cast<png_byte>(v >> 8);
        rows[y][2 * x + 1] = static_cast<png_byte>(v & 0xFF);
      } else {
        if (v > 255) throw ConfigError("write_png: value exceeds 8-bit range");
        rows[y][x] = static_cast<png_byte>(v);
      }
    }
  }
  auto f = open_file(path, "wb");
  if (!encode_png(f.get(), img, rows)) throw DataError("cannot encode PNG '" + path.string() + "'");
}

GrayImage read_gray(const std::filesystem::path& path) {
  const PngImage png = read_png(path);
  const float scale = png.bit_depth == 16 ? 65535.0f : 255.0f;
  GrayImage img(png.width, png.height);
  for (std::size_t i = 0; i < png.data.size(); ++i) img[i] = static_cast<float>(png.data[i]) / scale;
  return img;
}

void write_gray(const std::filesystem::path& path, const GrayImage& img) {
  PngImage png{img.width(), img.height(), 8, std::vector<std::uint16_t>(img.size())};
  for (std::size_t i = 0; i < img.size(); ++i) {
    png.data[i] = static_cast<std::uint16_t>(std::lround(std::clamp(img[i], 0.0f, 1.0f) * 255.0f));
  }
  write_png(path, png);
}

std::uint16_t encode_depth(double meters) {
  if (!is_valid(meters) || !std::isfinite(meters) || !(meters > 0.0)) return 0;
  const double v = std::round(meters * 256.0);
  if (v < 1.0) return 0;
  return static_cast<std::uint16_t>(std::min(v, 65535.0));
}

double decode_depth(std::uint16_t value) {
  return value == 0 ? kInvalid : static_cast<double>(value) / 256.0;
}

DepthMap read_depth_png(const std::filesystem::path& path) {
  const PngImage png = read_png(path);
  if (png.bit_depth != 16) throw DataError("depth PNG '" + path.string() + "' is not 16-bit");
  DepthMap z(png.width, png.height);
  for (std::size_t i = 0; i < png.data.size(); ++i) z[i] = decode_depth(png.data[i]);
  return z;
}

void write_depth_png(const std::filesystem::path& path, const DepthMap& z) {
  PngImage png{z.width(), z.height(), 16, std::vector<std::uint16_t>(z.size())};
  for (std::size_t i = 0; i < z.size(); ++i) png.data[i] = encode_depth(z[i]);
  write_png(path, png);
}

void write_confidence_png(const std::filesystem::path& path, const ConfidenceMap& wc) {
  PngImage png{wc.width(), wc.height(), 8, std::vector<std::uint16_t>(wc.size())};
  for (std::size_t i = 0; i < wc.size(); ++i) {
    png.data[i] = static_cast<std::uint16_t>(std::lround(std::clamp(wc[i], 0.0, 1.0) * 255.0));
  }
  write_png(path, png);
}

ConfidenceMap read_confidence_png(const std::filesystem::path& path) {
  const PngImage png = read_png(path);
  const double scale = png.bit_depth == 16 ? 65535.0 : 255.0;
  ConfidenceMap wc(png.width, png.height);
  for (std::size_t i = 0; i < png.data.size(); ++i) wc[i] = png.data[i] / scale;
  return wc;
}

void write_mask_png(const std::filesystem::path& path, const Mask& m) {
  PngImage png{m.width(), m.height(), 8, std::vector<std::uint16_t>(m.size())};
  for (std::size_t i = 0; i < m.size(); ++i) png.data[i] = m[i] ? 255 : 0;
  write_png(path, png);
}

Mask read_mask_png(const std::filesystem::path& path) {
  const PngImage png = read_png(path);
  Mask m(png.width, png.height);
  for (std::size_t i = 0; i < png.data.size(); ++i) m[i] = png.data[i] != 0 ? 1 : 0;
  return m;
}

PfmImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string magic;
  PfmImage img;
  double scale = 0.0;
  in >> magic >> img.width >> img.height >> scale;
  if (!in || magic != "Pf") throw DataError("'" + path.string() + "' is not a single-channel PFM");
  if (img.width <= 0 || img.height <= 0 || scale == 0.0) throw DataError("malformed PFM header in '" + path.string() + "'");
  in.get();  // single whitespace byte ends the header
  const bool little = scale < 0.0;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  std::vector<unsigned char> bytes(n * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) throw DataError("truncated PFM '" + path.string() + "'");

  img.data.resize(n);
  for (int row = 0; row < img.height; ++row) {
    const int y = img.height - 1 - row;
    for (int x = 0; x < img.width; ++x) {
      const unsigned char* b = bytes.data() + (static_cast<std::size_t>(row) * img.width + x) * 4;
      const std::uint32_t bits = little ? (b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t{b[3]} << 24))
                                        : (b[3] | (b[2] << 8) | (b[1] << 16) | (std::uint32_t{b[0]} << 24));
      img.data[static_cast<std::size_t>(y) * img.width + x] = std::bit_cast<float>(bits);
    }
  }
  return img;
}

void write_pfm(const std::filesystem::path& path, const PfmImage& img) {
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw ConfigError("write_pfm: data length does not match dimensions");
  }
  std::ostringstream header;
  header << "Pf\n" << img.width << ' ' << img.height << "\n-1.0\n";
  std::string out = header.str();
  out.reserve(out.size() + img.data.size() * 4);
  for (int row = 0; row < img.height; ++row) {
    const int y = img.height - 1 - row;
    for (int x = 0; x < img.width; ++x) {
      const auto bits = std::bit_cast<std::uint32_t>(img.data[static_cast<std::size_t>(y) * img.width + x]);
      for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("cannot write '" + path.string() + "'");
}

DepthMap read_depth_pfm(const std::filesystem::path& path) {
  const PfmImage pfm = read_pfm(path);
  DepthMap z(pfm.width, pfm.height, kInvalid);
  for (std::size_t i = 0; i < pfm.data.size(); ++i) {
    const float v = pfm.data[i];
    if (std::isfinite(v) && v > 0.0f) z[i] = v;
  }
  return z;
}

void write_depth_pfm(const std::filesystem::path& path, const DepthMap& z) {
  PfmImage pfm{z.width(), z.height(), std::vector<float>(z.size(), 0.0f)};
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (is_valid(z[i])) pfm.data[i] = static_cast<float>(z[i]);
  }
  write_pfm(path, pfm);
}

// Disparity 0 is a legitimate value, so missing disparities are stored as
// +inf (the Middlebury convention) rather than 0.
DisparityMap read_disparity_pfm(const std::filesystem::path& path) {
  const PfmImage pfm = read_pfm(path);
  DisparityMap d(pfm.width, pfm.height, kInvalid);
  for (std::size_t i = 0; i < pfm.data.size(); ++i) {
    const float v = pfm.data[i];
    if (std::isfinite(v) && v >= 0.0f) d[i] = v;
  }
  return d;
}

void write_disparity_pfm(const std::filesystem::path& path, const DisparityMap& d) {
  PfmImage pfm{d.width(), d.height(),
               std::vector<float>(d.size(), std::numeric_limits<float>::infinity())};
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (is_valid(d[i])) pfm.data[i] = static_cast<float>(d[i]);
  }
  write_pfm(path, pfm);
}

DepthMap read_depth_any(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pfm" || ext == ".PFM") return read_depth_pfm(path);
  if (ext == ".png" || ext == ".PNG") return read_depth_png(path);
  throw DataError("unsupported depth format '" + path.string() + "' (expected .pfm or .png)");
}

}  // namespace depthfuse::io
