#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "depthfuse/cli.hpp"
#include "depthfuse/io.hpp"
#include "depthfuse/metrics.hpp"

namespace depthfuse::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write '" + path.string() + "'");
}

void require_dirs(const RunConfig& cfg, bool need_dataset) {
  if (need_dataset && cfg.dataset.empty()) throw ConfigError("config key 'dataset' is required");
  if (cfg.output.empty()) throw ConfigError("an output directory is required (--output or 'output')");
}

// Paths of the stereo outputs inside the output tree.
fs::path disparity_path(const RunConfig& cfg, const std::string& id) {
  return cfg.output / "stereo" / "disparity" / (id + ".pfm");
}

struct FrameImages {
  GrayImage left;
  GrayImage right;
};

FrameImages load_pair(const RunConfig& cfg, const std::string& id) {
  FrameImages f{io::read_gray(cfg.dataset / "left" / (id + ".png")),
                io::read_gray(cfg.dataset / "right" / (id + ".png"))};
  if (!f.left.same_shape(f.right)) throw DataError("frame " + id + ": left and right sizes differ");
  return f;
}

// Stereo disparity for a frame: the stored result from `stereo` when present,
// otherwise computed now.
DisparityMap frame_disparity(const RunConfig& cfg, const std::string& id, const FrameImages& img) {
  const fs::path stored = disparity_path(cfg, id);
  if (fs::exists(stored)) {
    DisparityMap d = io::read_disparity_pfm(stored);
    if (!d.same_shape(img.left)) throw DataError("frame " + id + ": stored disparity has the wrong size");
    return d;
  }
  return compute_disparity(img.left, img.right, cfg.stereo_params());
}

std::optional<DepthMap> load_gt(const RunConfig& cfg, const std::string& id, const GrayImage& like) {
  const fs::path p = cfg.dataset / "gt" / (id + ".png");
  if (!fs::exists(p)) return std::nullopt;
  DepthMap gt = io::read_depth_png(p);
  if (!gt.same_shape(like)) throw DataError("frame " + id + ": ground truth has the wrong size");
  return gt;
}

std::optional<Mask> load_occlusion(const RunConfig& cfg, const std::string& id, const GrayImage& like) {
  const fs::path p = cfg.dataset / "occlusion" / (id + ".png");
  if (!fs::exists(p)) return std::nullopt;
  Mask m = io::read_mask_png(p);
  if (!m.same_shape(like)) throw DataError("frame " + id + ": occlusion mask has the wrong size");
  return m;
}

std::optional<fs::path> imported_mono_path(const RunConfig& cfg, const std::string& id) {
  for (const char* ext : {".pfm", ".png"}) {
    const fs::path p = cfg.dataset / "mono" / (id + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

std::string frame_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", i);
  return buf;
}

std::uint64_t frame_seed(std::uint64_t seed, int i) {
  return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(i) * 0xD1B54A32D192ED03ull + 1;
}

std::optional<MetricsReport> try_evaluate(const DepthMap& pred, const DepthMap& gt,
                                          const std::optional<Mask>& mask = std::nullopt) {
  try {
    return mask ? evaluate(pred, gt, *mask) : evaluate(pred, gt);
  } catch (const DataError&) {
    return std::nullopt;
  }
}

// RFC 4180 field quoting; metric labels contain commas.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_report(std::string& csv, const std::string& frame, std::string_view method,
                   const std::optional<MetricsReport>& r) {
  const auto values = r ? r->values() : std::array<double, 8>{};
  for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
    csv += frame + "," + std::string(method) + "," + csv_field(kMetricNames[k]) + "," +
           (r ? fmt(values[k]) : std::string("nan")) + "\n";
  }
}

}  // namespace

std::vector<std::string> discover_frames(const fs::path& root, const std::vector<std::string>& requested) {
  const fs::path left = root / "left";
  const fs::path right = root / "right";
  std::vector<std::string> ids;
  std::error_code ec;
  if (fs::is_directory(left, ec)) {
    for (const auto& entry : fs::directory_iterator(left)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") {
        ids.push_back(entry.path().stem().string());
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    if (!fs::exists(right / (id + ".png"))) throw DataError("frame " + id + ": missing right image");
  }
  if (!requested.empty()) {
    for (const auto& id : requested) {
      if (!std::binary_search(ids.begin(), ids.end(), id)) {
        throw DataError("frame '" + id + "' not found under " + left.string());
      }
    }
    ids = requested;
  }
  if (ids.empty()) throw DataError("no frames found in '" + root.string() + "'");
  return ids;
}

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  require_dirs(cfg, false);
  cfg.validate();
  RandomSceneOptions opt = cfg.synth.scene;
  opt.calibration = cfg.calibration;
  for (const char* sub : {"left", "right", "gt", "occlusion"}) ensure_dir(cfg.output / sub);
  if (cfg.synth.write_mono) ensure_dir(cfg.output / "mono");

  for (int i = 0; i < cfg.synth.frames; ++i) {
    const std::string id = frame_id(i);
    const std::uint64_t seed = frame_seed(cfg.seed, i);
    const SceneSpec spec = random_scene(seed, opt);
    const RenderedScene scene = render(spec);
    io::write_gray(cfg.output / "left" / (id + ".png"), scene.left);
    io::write_gray(cfg.output / "right" / (id + ".png"), scene.right);
    io::write_depth_png(cfg.output / "gt" / (id + ".png"), scene.gt_depth);
    io::write_mask_png(cfg.output / "occlusion" / (id + ".png"), scene.occlusion);
    if (cfg.synth.write_mono) {
      io::write_depth_pfm(cfg.output / "mono" / (id + ".pfm"),
                          perturb_oracle_mono(scene.gt_depth, cfg.synth.mono_sigma, cfg.synth.mono_bias, seed));
    }
    log << "synth " << id << ": " << spec.occluders.size() << " occluders, "
        << fmt(100.0 * static_cast<double>(count(scene.occlusion)) / static_cast<double>(scene.occlusion.size()))
        << "% occluded\n";
  }
}

void cmd_stereo(const RunConfig& cfg, std::ostream& log) {
  require_dirs(cfg, true);
  cfg.validate();
  const auto ids = discover_frames(cfg.dataset, cfg.frames);
  for (const char* sub : {"disparity", "depth", "confidence"}) ensure_dir(cfg.output / "stereo" / sub);

  for (const auto& id : ids) {
    const FrameImages img = load_pair(cfg, id);
    const DisparityMap d = compute_disparity(img.left, img.right, cfg.stereo_params());
    const ConfidenceMap wc = build_confidence(img.left, cfg.confidence);
    io::write_disparity_pfm(disparity_path(cfg, id), d);
    io::write_depth_png(cfg.output / "stereo" / "depth" / (id + ".png"), disparity_to_depth(d, cfg.calibration));
    io::write_confidence_png(cfg.output / "stereo" / "confidence" / (id + ".png"), wc);
    log << "stereo " << id << ": " << count(valid_mask(d)) << " / " << d.size() << " valid\n";
  }
}

void cmd_ssl_train(const RunConfig& cfg, std::ostream& log) {
  require_dirs(cfg, true);
  cfg.validate();
  const auto ids = discover_frames(cfg.dataset, cfg.train_frames.empty() ? cfg.frames : cfg.train_frames);
  const std::size_t per_frame = (cfg.max_samples + ids.size() - 1) / ids.size();

  SslDataset pooled;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const FrameImages img = load_pair(cfg, ids[i]);
    const DisparityMap d = frame_disparity(cfg, ids[i], img);
    const ConfidenceMap wc = build_confidence(img.left, cfg.confidence);
    const auto [mask, targets] = sparse_targets(d, wc, cfg.calibration, cfg.min_confidence);
    if (count(mask) == 0) continue;
    const SslDataset part =
        build_dataset(extract_features(img.left), targets, mask, per_frame, cfg.seed + i);
    pooled.insert(pooled.end(), part.begin(), part.end());
  }
  if (pooled.empty()) throw DataError("no confident targets in any training frame");

  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  const TrainResult result = train(pooled, tc);
  save_model(cfg.resolved_model_path(), result.model);

  std::string csv = "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    csv += std::to_string(e) + "," + fmt(result.loss_history[e]) + "\n";
  }
  write_text(cfg.output / "loss_history.csv", csv);
  log << "ssl-train: " << pooled.size() << " samples from " << ids.size() << " frames, loss "
      << fmt(result.loss_history.front()) << " -> " << fmt(result.loss_history.back()) << "\n";
}

void cmd_fuse(const RunConfig& cfg, std::ostream& log) {
  require_dirs(cfg, true);
  cfg.validate();
  const auto ids = discover_frames(cfg.dataset, cfg.frames);

  std::optional<RegressorModel> model;
  bool use_import = false;
  const fs::path model_file = cfg.resolved_model_path();
  switch (cfg.mono_source) {
    case MonoSource::kModel:
      model = load_model(model_file);
      break;
    case MonoSource::kImport:
      use_import = true;
      break;
    case MonoSource::kAuto:
      if (fs::exists(model_file)) {
        model = load_model(model_file);
      } else {
        use_import = true;
      }
      break;
  }

  ensure_dir(cfg.output / "fused");
  ensure_dir(cfg.output / "mono");
  std::string csv;
  for (const auto& id : ids) {
    const FrameImages img = load_pair(cfg, id);
    const DepthMap zs = disparity_to_depth(frame_disparity(cfg, id, img), cfg.calibration);
    const ConfidenceMap wc = build_confidence(img.left, cfg.confidence);

    DepthMap zm;
    if (model) {
      zm = predict(*model, extract_features(img.left));
    } else {
      const auto path = use_import ? imported_mono_path(cfg, id) : std::nullopt;
      if (!path) {
        throw DataError("frame " + id + ": missing mono source (no model at '" + model_file.string() +
                        "' and no mono/" + id + ".pfm|.png in the dataset)");
      }
      zm = import_external(*path, img.left.width(), img.left.height());
    }

    const auto [zm_scaled, scale] = scale_mono(zm, zs, cfg.fusion.scaling_mode);
    const RatioWeightMap ws = compute_ratio_weight(zm_scaled, zs);
    const DepthMap fused =
        median_filter(fuse(zs, zm_scaled, wc, ws, cfg.fusion.weighting_mode), cfg.fusion.median_kernel);
    io::write_depth_png(cfg.output / "fused" / (id + ".png"), fused);
    io::write_depth_png(cfg.output / "mono" / (id + ".png"), zm_scaled);

    if (const auto gt = load_gt(cfg, id, img.left)) {
      std::optional<Mask> nonocc = load_occlusion(cfg, id, img.left);
      if (nonocc) {
        for (auto& v : nonocc->pixels()) v = v ? 0 : 1;
      }
      append_report(csv, id, "stereo-nonocc", try_evaluate(zs, *gt, nonocc));
      append_report(csv, id, "stereo-all", try_evaluate(zs, *gt));
      append_report(csv, id, "mono", try_evaluate(zm_scaled, *gt));
      const auto fused_report = try_evaluate(fused, *gt);
      append_report(csv, id, "fused", fused_report);
      log << "fuse " << id << ": fused RMSE " << (fused_report ? fmt(fused_report->rmse) : "nan") << " m\n";
    } else {
      log << "fuse " << id << ": written (no ground truth)\n";
    }
  }
  if (!csv.empty()) write_text(cfg.output / "fused_metrics.csv", "frame,method,metric,value\n" + csv);
}

void cmd_eval(const RunConfig& cfg, std::ostream& log) {
  require_dirs(cfg, true);
  cfg.validate();
  const auto ids = discover_frames(cfg.dataset, cfg.frames);

  struct Method {
    const char* name;
    fs::path dir;
    std::vector<double> pred, gt;
  };
  std::vector<Method> methods = {{"stereo", cfg.output / "stereo" / "depth", {}, {}},
                                 {"mono", cfg.output / "mono", {}, {}},
                                 {"fused", cfg.output / "fused", {}, {}}};
  std::vector<double> all_gt;
  std::size_t frames_with_gt = 0;

  for (const auto& id : ids) {
    const fs::path gt_path = cfg.dataset / "gt" / (id + ".png");
    if (!fs::exists(gt_path)) continue;
    ++frames_with_gt;
    const DepthMap gt = io::read_depth_png(gt_path);
    for (double v : gt.pixels()) {
      if (is_valid(v)) all_gt.push_back(v);
    }
    for (auto& m : methods) {
      const fs::path p = m.dir / (id + ".png");
      if (!fs::exists(p)) throw DataError("frame " + id + ": missing prediction '" + p.string() + "'");
      const DepthMap pred = io::read_depth_png(p);
      if (!pred.same_shape(gt)) throw DataError("frame " + id + ": prediction size differs from ground truth");
      for (std::size_t i = 0; i < gt.size(); ++i) {
        if (is_valid(pred[i]) && is_valid(gt[i])) {
          m.pred.push_back(pred[i]);
          m.gt.push_back(gt[i]);
        }
      }
    }
  }
  if (frames_with_gt == 0) throw DataError("no frames with ground truth under '" + (cfg.dataset / "gt").string() + "'");

  std::string metrics_csv = "method,metric,value,n\n";
  std::string profile_csv = "method,bin_lo,bin_hi,p5,p25,p50,p75,p95,count\n";
  std::vector<DepthHistogram> hists;
  hists.push_back(depth_histogram(all_gt, cfg.bin_edges));
  for (const auto& m : methods) {
    if (m.pred.empty()) throw DataError(std::string("no overlapping valid pixels for ") + m.name);
    const MetricsReport r = evaluate_pairs(m.pred, m.gt);
    const auto values = r.values();
    for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
      metrics_csv += std::string(m.name) + "," + csv_field(kMetricNames[k]) + "," + fmt(values[k]) + "," +
                     std::to_string(r.n) + "\n";
    }
    const DistanceProfile prof = distance_profile(m.pred, m.gt, cfg.bin_edges);
    for (std::size_t b = 0; b < prof.bins.size(); ++b) {
      const std::string hi = b + 1 < prof.edges.size() ? fmt(prof.edges[b + 1]) : "inf";
      profile_csv += std::string(m.name) + "," + fmt(prof.edges[b]) + "," + hi;
      if (const auto& q = prof.bins[b]) {
        for (double v : {q->p5, q->p25, q->p50, q->p75, q->p95}) profile_csv += "," + fmt(v);
      } else {
        profile_csv += ",,,,,";
      }
      profile_csv += "," + std::to_string(prof.counts[b]) + "\n";
    }
    hists.push_back(depth_histogram(m.pred, cfg.bin_edges));
    log << "eval " << m.name << ": RMSE " << fmt(r.rmse) << " m over " << r.n << " px\n";
  }

  std::string hist_csv = "bin_lo,bin_hi,gt";
  for (const auto& m : methods) hist_csv += std::string(",") + m.name;
  hist_csv += "\n-inf," + fmt(cfg.bin_edges.front());
  for (const auto& h : hists) hist_csv += "," + std::to_string(h.below_range);
  hist_csv += "\n";
  for (std::size_t b = 0; b < cfg.bin_edges.size(); ++b) {
    hist_csv += fmt(cfg.bin_edges[b]) + "," + (b + 1 < cfg.bin_edges.size() ? fmt(cfg.bin_edges[b + 1]) : "inf");
    for (const auto& h : hists) hist_csv += "," + std::to_string(h.counts[b]);
    hist_csv += "\n";
  }

  write_text(cfg.output / "eval" / "metrics.csv", metrics_csv);
  write_text(cfg.output / "eval" / "distance_profile.csv", profile_csv);
  write_text(cfg.output / "eval" / "depth_histogram.csv", hist_csv);
}

}  // namespace depthfuse::cli
