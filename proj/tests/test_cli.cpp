#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "depthfuse/cli.hpp"
#include "depthfuse/io.hpp"
#include "depthfuse/metrics.hpp"

namespace depthfuse::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("depthfuse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "depthfuse");
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  // Small synthetic dataset shared by the pipeline tests.
  std::vector<std::string> small(const std::string& data) const {
    return {"--set", "dataset=" + data, "--set", "synth.width=192", "--set", "synth.height=80",
            "--set", "synth.frames=2", "--set", "train.epochs=20"};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

TEST(RunConfig, ParsesKnownKeysAndRejectsUnknownOnes) {
  RunConfig c;
  c.set("fusion.scaling", "average");
  c.set(" stereo.lr_tol ", " inf ");
  c.set("frames", "a, b,,c");
  c.set("eval.bin_edges", "0,1.5,3");
  EXPECT_EQ(c.fusion.scaling_mode, ScalingMode::kAverage);
  EXPECT_TRUE(std::isinf(c.stereo.lr_consistency_tol));
  EXPECT_EQ(c.frames, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(c.bin_edges, (std::vector<double>{0.0, 1.5, 3.0}));
  EXPECT_THROW(c.set("stereo.block_size", "4"), ConfigError);
  EXPECT_THROW(c.set("train.epochs", "ten"), ConfigError);
  EXPECT_THROW(c.set("train.epochs", "10.5"), ConfigError);
  EXPECT_THROW(c.set("calib.baseline", "nan"), ConfigError);
  EXPECT_THROW(c.set("mono.source", "cnn"), ConfigError);
}

TEST(RunConfig, ValidationCoversEveryModule) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.calibration.focal_length = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.min_confidence = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.bin_edges = {0.0, 0.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.fusion.median_kernel = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_FALSE(RunConfig::keys().empty());
}

TEST_F(CliTest, ConfigFileWithComments) {
  std::ofstream(root_ / "run.cfg") << "# comment\n\nseed = 42  # trailing\nfusion.weighting=none\n";
  RunConfig c;
  c.load_file(root_ / "run.cfg");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.fusion.weighting_mode, WeightingMode::kNone);
  std::ofstream(root_ / "bad.cfg") << "seed 42\n";
  EXPECT_THROW(c.load_file(root_ / "bad.cfg"), ConfigError);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"stereo", "--set", "no.such.key=1", "--output", (root_ / "o").string()}), 1);
  EXPECT_NE(err_.str().find("unknown config key"), std::string::npos);
  EXPECT_EQ(run({"bogus"}), 1);
  EXPECT_EQ(run({}), 1);

  fs::create_directories(root_ / "empty");
  EXPECT_EQ(run({"stereo", "--set", "dataset=" + (root_ / "empty").string(), "--output", (root_ / "o").string()}),
            2);
  EXPECT_NE(err_.str().find("no frames found"), std::string::npos);

  EXPECT_EQ(run({"ssl-train", "--set", "dataset=" + (root_ / "empty").string(), "--set", "train.learning_rate=1e308",
                 "--output", (root_ / "o").string()}),
            2);
}

TEST_F(CliTest, DivergentTrainingExitsWithNumericalFailure) {
  const std::string data = (root_ / "data").string();
  ASSERT_EQ(run({"synth", "--output", data, "--set", "synth.width=192", "--set", "synth.height=80", "--set",
                 "synth.frames=1"}),
            0);
  EXPECT_EQ(run({"ssl-train", "--set", "dataset=" + data, "--set", "train.learning_rate=1e308", "--set",
                 "train.epochs=3", "--output", (root_ / "o").string()}),
            3)
      << err_.str();
}

TEST_F(CliTest, FuseWithoutMonoSourceIsADataError) {
  const std::string data = (root_ / "data").string();
  ASSERT_EQ(run({"synth", "--output", data, "--set", "synth.write_mono=false", "--set", "synth.width=192", "--set",
                 "synth.height=80", "--set", "synth.frames=1"}),
            0);
  EXPECT_EQ(run({"fuse", "--set", "dataset=" + data, "--output", (root_ / "o").string()}), 2);
  EXPECT_NE(err_.str().find("missing mono source"), std::string::npos);
}

TEST_F(CliTest, StereoOutputsReimportWithinQuantization) {
  const std::string data = (root_ / "data").string(), out = (root_ / "out").string();
  auto args = small(data);
  args.insert(args.begin(), {"synth", "--output", data});
  ASSERT_EQ(run(args), 0) << err_.str();
  ASSERT_EQ(run({"stereo", "--set", "dataset=" + data, "--output", out}), 0) << err_.str();

  const StereoCalibration cal{400.0, 0.1, 64, 16};
  for (const auto& id : discover_frames(data)) {
    const DisparityMap d = io::read_disparity_pfm(fs::path(out) / "stereo" / "disparity" / (id + ".pfm"));
    const DepthMap computed = disparity_to_depth(d, cal);
    const DepthMap stored = io::read_depth_png(fs::path(out) / "stereo" / "depth" / (id + ".png"));
    ASSERT_TRUE(stored.same_shape(computed));
    for (std::size_t i = 0; i < stored.size(); ++i) {
      ASSERT_EQ(is_valid(stored[i]), is_valid(computed[i]));
      if (is_valid(stored[i])) ASSERT_LE(std::abs(stored[i] - computed[i]), 1.0 / 512.0);
    }
  }

  const std::string first = slurp(fs::path(out) / "stereo" / "depth" / "000000.png");
  ASSERT_EQ(run({"stereo", "--set", "dataset=" + data, "--output", out}), 0);
  EXPECT_EQ(slurp(fs::path(out) / "stereo" / "depth" / "000000.png"), first);
}

TEST_F(CliTest, FullPipelineProducesTheDocumentedArtifacts) {
  const std::string data = (root_ / "data").string(), out = (root_ / "out").string();
  auto with = [&](std::string cmd, std::string dest) {
    auto args = small(data);
    args.insert(args.begin(), {cmd, "--output", dest, "--seed", "3"});
    return run(args);
  };
  ASSERT_EQ(with("synth", data), 0) << err_.str();
  for (const char* sub : {"left", "right", "gt", "mono", "occlusion"}) {
    EXPECT_TRUE(fs::exists(fs::path(data) / sub / "000001.png") || fs::exists(fs::path(data) / sub / "000001.pfm"))
        << sub;
  }
  for (const char* cmd : {"stereo", "ssl-train", "fuse", "eval"}) ASSERT_EQ(with(cmd, out), 0) << cmd << err_.str();

  const fs::path o(out);
  EXPECT_TRUE(fs::exists(o / "model.txt"));
  EXPECT_TRUE(fs::exists(o / "fused" / "000000.png"));
  EXPECT_TRUE(fs::exists(o / "eval" / "distance_profile.csv"));
  EXPECT_TRUE(fs::exists(o / "eval" / "depth_histogram.csv"));

  std::istringstream loss(slurp(o / "loss_history.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(loss, line)) ++lines;
  EXPECT_EQ(lines, 1 + 21);

  std::istringstream metrics(slurp(o / "fused_metrics.csv"));
  std::getline(metrics, line);
  EXPECT_EQ(line, "frame,method,metric,value");
  int rows = 0;
  std::string last;
  while (std::getline(metrics, line)) {
    last = line;
    const std::string metric = line.substr(0, line.rfind(','));
    EXPECT_NE(metric.find(std::string(kMetricNames[rows % 8])), std::string::npos) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 2 * 4 * 8);
  EXPECT_NE(last.find(",\"RMSE (log, scale inv.)\","), std::string::npos) << last;
}

TEST_F(CliTest, ImportedMonoIsUsedWhenNoModelExists) {
  const std::string data = (root_ / "data").string(), out = (root_ / "out").string();
  auto args = small(data);
  args.insert(args.begin(), {"synth", "--output", data});
  ASSERT_EQ(run(args), 0);
  ASSERT_EQ(run({"fuse", "--set", "dataset=" + data, "--set", "fusion.scaling=none", "--output", out}), 0)
      << err_.str();
  // With scaling disabled the stored mono map is the imported oracle map,
  // quantized to the 16-bit depth encoding.
  const DepthMap imported = io::read_depth_pfm(fs::path(data) / "mono" / "000000.pfm");
  const DepthMap stored = io::read_depth_png(fs::path(out) / "mono" / "000000.png");
  for (std::size_t i = 0; i < stored.size(); ++i) ASSERT_LE(std::abs(stored[i] - imported[i]), 1.0 / 512.0);
}

}  // namespace
}  // namespace depthfuse::cli
