#include "depthfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace depthfuse {

namespace {

struct Surface {
  double disparity;
  double x, y, width, height;  // cyclopean rectangle; background is unbounded
  bool unbounded;
  TextureSpec texture;
};

std::vector<Surface> surfaces_of(const SceneSpec& spec) {
  const double fb = spec.calibration.focal_baseline();
  std::vector<Surface> s;
  s.push_back({fb / spec.background_depth, 0, 0, 0, 0, true, spec.background_texture});
  for (const auto& o : spec.occluders) {
    s.push_back({fb / o.depth, o.x, o.y, o.width, o.height, false, o.texture});
  }
  return s;
}

bool in_rows(const Surface& s, int y) {
  return s.unbounded || (y >= s.y && y < s.y + s.height);
}

bool covers_left(const Surface& s, double x, int y) {
  return s.unbounded ||
         (in_rows(s, y) && x >= s.x + s.disparity / 2 && x < s.x + s.width + s.disparity / 2);
}

bool covers_right(const Surface& s, double x, int y) {
  return s.unbounded ||
         (in_rows(s, y) && x >= s.x - s.disparity / 2 && x < s.x + s.width - s.disparity / 2);
}

// Nearest (largest disparity) surface covering the pixel; ties keep the
// earlier surface.
template <typename Covers>
std::size_t visible(const std::vector<Surface>& surfaces, double x, int y, Covers covers) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < surfaces.size(); ++i) {
    if (covers(surfaces[i], x, y) && surfaces[i].disparity > surfaces[best].disparity) best = i;
  }
  return best;
}

// Texture of one surface sampled on the integer lattice of cyclopean
// coordinates u in [-pad, width + pad).
class TextureRaster {
 public:
  TextureRaster(const TextureSpec& spec, int width, int height, int pad, std::uint64_t seed)
      : pad_(pad), w_(width + 2 * pad), h_(height), values_(static_cast<std::size_t>(w_) * h_, 0.5) {
    if (spec.contrast == 0.0 || spec.octaves < 1) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> noise(values_.size(), 0.0);
    double total_amp = 0.0;
    double amp = 1.0;
    for (int k = 0; k < spec.octaves; ++k) {
      const int period = 1 << (spec.octaves - 1 - k);
      const int lw = w_ / period + 2;
      const int lh = h_ / period + 2;
      std::vector<double> lattice(static_cast<std::size_t>(lw) * lh);
      for (auto& v : lattice) v = uni(rng);
      for (int y = 0; y < h_; ++y) {
        const int ly = y / period;
        const double ty = static_cast<double>(y % period) / period;
        for (int u = 0; u < w_; ++u) {
          const int lx = u / period;
          const double tx = static_cast<double>(u % period) / period;
          auto L = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * lw + i]; };
          const double top = (1 - tx) * L(lx, ly) + tx * L(lx + 1, ly);
          const double bot = (1 - tx) * L(lx, ly + 1) + tx * L(lx + 1, ly + 1);
          noise[static_cast<std::size_t>(y) * w_ + u] += amp * ((1 - ty) * top + ty * bot);
        }
      }
      total_amp += amp;
      amp *= spec.persistence;
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      values_[i] = std::clamp(0.5 + 0.5 * spec.contrast * noise[i] / total_amp, 0.0, 1.0);
    }
  }

  /// Linear interpolation along the row at fractional cyclopean coordinate u.
  double sample(double u, int y) const {
    const double fu = std::clamp(u + pad_, 0.0, static_cast<double>(w_ - 1));
    const int i0 = std::min(static_cast<int>(std::floor(fu)), w_ - 2);
    const double t = fu - i0;
    const double* row = values_.data() + static_cast<std::size_t>(y) * w_;
    return (1.0 - t) * row[i0] + t * row[i0 + 1];
  }

 private:
  int pad_;
  int w_;
  int h_;
  std::vector<double> values_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

void SceneSpec::validate() const {
  calibration.validate();
  if (width < 1 || height < 1) throw ConfigError("scene: image size must be positive");
  if (calibration.max_disparity >= width) {
    throw ConfigError("scene: max_disparity must be smaller than the image width");
  }
  const double fb = calibration.focal_baseline();
  auto check_depth = [&](double z, const char* what) {
    if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError(std::string("scene: ") + what + " depth must be positive");
    if (fb / z > calibration.max_disparity) {
      throw ConfigError(std::string("scene: ") + what + " depth exceeds the disparity range");
    }
  };
  check_depth(background_depth, "background");
  for (const auto& o : occluders) {
    check_depth(o.depth, "occluder");
    if (!(o.depth < background_depth)) throw ConfigError("scene: occluders must be nearer than the background");
    if (!(o.width > 0.0) || !(o.height > 0.0)) throw ConfigError("scene: occluder size must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("scene: noise_sigma must be >= 0");
}

Mask occlusion_mask(const SceneSpec& spec) {
  spec.validate();
  const auto surfaces = surfaces_of(spec);
  Mask occ(spec.width, spec.height, 0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const auto& s = surfaces[visible(surfaces, x, y, covers_left)];
      const double xr = x - s.disparity;
      bool hidden = xr < 0.0;
      for (const auto& other : surfaces) {
        if (hidden) break;
        hidden = other.disparity > s.disparity && covers_right(other, xr, y);
      }
      occ.at(x, y) = hidden ? 1 : 0;
    }
  }
  return occ;
}

RenderedScene render(const SceneSpec& spec) {
  spec.validate();
  const auto surfaces = surfaces_of(spec);
  const int w = spec.width;
  const int h = spec.height;
  const int pad = spec.calibration.max_disparity + 2;

  std::vector<TextureRaster> textures;
  textures.reserve(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    textures.emplace_back(surfaces[i].texture, w, h, pad, mix_seed(spec.seed, i));
  }

  RenderedScene out{GrayImage(w, h), GrayImage(w, h), DepthMap(w, h), DisparityMap(w, h),
                    occlusion_mask(spec)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t sl = visible(surfaces, x, y, covers_left);
      const double dl = surfaces[sl].disparity;
      out.left.at(x, y) = static_cast<float>(textures[sl].sample(x - dl / 2, y));
      out.gt_disparity.at(x, y) = dl;
      out.gt_depth.at(x, y) = sl == 0 ? spec.background_depth : spec.occluders[sl - 1].depth;

      const std::size_t sr = visible(surfaces, x, y, covers_right);
      out.right.at(x, y) = static_cast<float>(textures[sr].sample(x + surfaces[sr].disparity / 2, y));
    }
  }

  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(mix_seed(spec.seed, 0xA11CE));
    std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
    for (auto* img : {&out.left, &out.right}) {
      for (float& v : img->pixels()) v = static_cast<float>(std::clamp(v + gauss(rng), 0.0, 1.0));
    }
  }
  return out;
}

DepthMap perturb_oracle_mono(const DepthMap& gt_depth, double relative_sigma, double bias,
                             std::uint64_t seed) {
  if (!(relative_sigma >= 0.0)) throw ConfigError("perturb_oracle_mono: relative_sigma must be >= 0");
  DepthMap out(gt_depth.width(), gt_depth.height(), kInvalid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double z = gt_depth[i];
    if (!is_valid(z)) continue;
    const double g = relative_sigma > 0.0 ? gauss(rng) : 0.0;
    out[i] = std::max(0.1, z * (1.0 + bias + relative_sigma * g));
  }
  return out;
}

void RandomSceneOptions::validate() const {
  if (width < 1 || height < 1) throw ConfigError("random scene: image size must be positive");
  calibration.validate();
  if (min_occluders < 0 || min_occluders > max_occluders) {
    throw ConfigError("random scene: need 0 <= min_occluders <= max_occluders");
  }
  auto check_range = [](double lo, double hi, const char* what) {
    if (!(lo > 0.0) || !(lo <= hi) || !std::isfinite(hi)) {
      throw ConfigError(std::string("random scene: invalid ") + what + " range");
    }
  };
  check_range(min_background_depth, max_background_depth, "background depth");
  check_range(min_occluder_depth, max_occluder_depth, "occluder depth");
  if (!(max_occluder_depth < min_background_depth)) {
    throw ConfigError("random scene: occluders must be nearer than the background");
  }
  if (!(min_occlusion_fraction >= 0.0) || !(min_occlusion_fraction <= max_occlusion_fraction) ||
      !(max_occlusion_fraction <= 1.0)) {
    throw ConfigError("random scene: invalid occlusion fraction range");
  }
  if (!(contrast >= 0.0) || !(noise_sigma >= 0.0)) {
    throw ConfigError("random scene: contrast and noise_sigma must be >= 0");
  }
}

SceneSpec random_scene(std::uint64_t seed, const RandomSceneOptions& opt) {
  opt.validate();
  std::mt19937_64 rng(mix_seed(seed, 0x5CE4E));
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SceneSpec spec;
    spec.width = opt.width;
    spec.height = opt.height;
    spec.calibration = opt.calibration;
    spec.background_depth = uniform(opt.min_background_depth, opt.max_background_depth);
    spec.background_texture.contrast = opt.contrast;
    spec.noise_sigma = opt.noise_sigma;
    spec.seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(attempt));
    const int n = std::uniform_int_distribution<int>(opt.min_occluders, opt.max_occluders)(rng);
    for (int i = 0; i < n; ++i) {
      Occluder o;
      o.depth = uniform(opt.min_occluder_depth, opt.max_occluder_depth);
      o.width = std::round(uniform(0.08, 0.30) * opt.width);
      o.height = std::round(uniform(0.25, 0.70) * opt.height);
      o.x = std::round(uniform(0.0, opt.width - o.width));
      o.y = std::round(uniform(0.0, opt.height - o.height));
      o.texture.contrast = opt.contrast;
      spec.occluders.push_back(o);
    }
    const Mask occ = occlusion_mask(spec);
    const double frac = static_cast<double>(count(occ)) / static_cast<double>(occ.size());
    if (frac >= opt.min_occlusion_fraction && frac <= opt.max_occlusion_fraction) return spec;
  }
  throw DataError("random_scene: no scene with the requested occlusion fraction");
}

}  // namespace depthfuse
