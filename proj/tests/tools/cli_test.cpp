#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "salmanip/png_io.hpp"
#include "salmanip/setup_mask.hpp"
#include "salmanip/tools/cli.hpp"
#include "synthetic.hpp"

namespace salmanip {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("salmanip_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    png::write_rgb(path("a.png"), testing::structured_rgb(1, 56, 48));
    GrayImage m(56, 48);
    for (int y = 12; y < 36; ++y) {
      for (int x = 14; x < 42; ++x) m.at(x, y) = 255;
    }
    png::write_gray(path("m.png"), m);
    png::write_gray(path("small.png"), GrayImage(10, 10));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "salmanip");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str({});
    err_.str({});
    return tools::run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::vector<std::string> quick_enhance(const std::string& output) {
    return {"enhance", "--input", path("a.png"), "--mask", path("m.png"), "--output", output,
            "--max-db-iterations", "3", "--iters-fine", "2"};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, EnhanceWritesResultAndReports) {
  auto args = quick_enhance(path("o.png"));
  args.insert(args.end(), {"--report", path("r.json"), "--trace-csv", path("t.csv"),
                           "--save-saliency", path("sal")});
  ASSERT_EQ(run(args), 0) << err_.str();
  const RgbImage out = png::read_rgb(path("o.png"));
  EXPECT_EQ(out.width, 56);
  EXPECT_EQ(out.height, 48);
  const auto report = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_GE(report["trace"].size(), 1u);
  EXPECT_TRUE(report.contains("wall_time_s"));
  EXPECT_EQ(slurp(path("t.csv")).rfind("iteration,tau_plus,tau_minus,psi,e_sal\n", 0), 0u);
  EXPECT_TRUE(fs::exists(path("sal/input_saliency.png")));
  EXPECT_TRUE(fs::exists(path("sal/output_saliency.png")));
}

TEST_F(Cli, DeltaSOutOfRange) {
  auto args = quick_enhance(path("o.png"));
  args.insert(args.end(), {"--delta-s", "1.5"});
  EXPECT_EQ(run(args), 1);
  EXPECT_NE(err_.str().find("delta-s must be in [0,1]"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("o.png")));
}

TEST_F(Cli, InputErrorsExitOne) {
  EXPECT_EQ(run({"enhance", "--input", path("a.png"), "--mask", path("small.png"), "--output",
                 path("o.png")}),
            1);
  EXPECT_NE(err_.str().find("mask size mismatch"), std::string::npos);
  EXPECT_EQ(run({"enhance", "--input", path("missing.png"), "--mask", path("m.png"), "--output",
                 path("o.png")}),
            1);
  EXPECT_EQ(run({"enhance", "--input", path("a.png"), "--output", path("o.png")}), 1);
  EXPECT_EQ(run({"sharpen"}), 1);
  EXPECT_EQ(run({"enhance", "--input", path("a.png"), "--mask", path("m.png"), "--output",
                 path("o.png"), "--patch-size", "6"}),
            1);
}

TEST_F(Cli, DryRunPrintsConfigOnly) {
  ASSERT_EQ(run({"attenuate", "--input", path("a.png"), "--mask", path("m.png"), "--dry-run",
                 "--delta-s", "0.3", "--seed", "5"}),
            0);
  const auto cfg = nlohmann::json::parse(out_.str());
  EXPECT_DOUBLE_EQ(cfg["delta_s"].get<double>(), 0.3);
  EXPECT_EQ(cfg["seed"].get<int>(), 5);
  EXPECT_DOUBLE_EQ(cfg["lambda"].get<double>(), 5.0);
  EXPECT_DOUBLE_EQ(cfg["eta"].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(cfg["epsilon"].get<double>(), 0.05);
  EXPECT_DOUBLE_EQ(cfg["beta_top"].get<double>(), 0.2);
  EXPECT_EQ(cfg["patch_size"].get<int>(), 7);
  EXPECT_EQ(cfg["saliency_patch"].get<int>(), 5);
  EXPECT_EQ(cfg["coarse_width"].get<int>(), 150);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir_), fs::directory_iterator{}), 3);
}

TEST_F(Cli, SetupMaskPath) {
  SetupMask s(56, 48);
  for (int y = 4; y < 20; ++y) {
    for (int x = 4; x < 24; ++x) s.set(x, y, Label::kIncrease);
  }
  for (int y = 28; y < 44; ++y) {
    for (int x = 30; x < 52; ++x) s.set(x, y, Label::kDecrease);
  }
  png::write_gray(path("setup.png"), setup_to_gray(s));
  ASSERT_EQ(run({"enhance", "--input", path("a.png"), "--setup-mask", path("setup.png"),
                 "--output", path("o.png"), "--max-db-iterations", "2"}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(path("o.png")));
}

TEST_F(Cli, SameSeedSameBytes) {
  ASSERT_EQ(run(quick_enhance(path("o1.png"))), 0);
  ASSERT_EQ(run(quick_enhance(path("o2.png"))), 0);
  EXPECT_EQ(slurp(path("o1.png")), slurp(path("o2.png")));
}

TEST_F(Cli, SaliencySubcommand) {
  ASSERT_EQ(run({"saliency", "--input", path("a.png"), "--output", path("s.png")}), 0);
  const GrayImage s = png::read_gray(path("s.png"));
  EXPECT_EQ(s.width, 56);
  EXPECT_EQ(s.height, 48);
}

TEST_F(Cli, EvalWritesCsv) {
  fs::create_directories(dir_ / "pred");
  fs::create_directories(dir_ / "gt");
  GrayImage g(8, 8);
  for (int x = 0; x < 4; ++x) g.at(x, 3) = 255;
  png::write_gray(dir_ / "pred" / "x.png", g);
  png::write_gray(dir_ / "gt" / "x.png", g);
  ASSERT_EQ(run({"eval", "--pred-dir", path("pred"), "--gt-dir", path("gt"), "--metric", "cc",
                 "--report", path("r.csv")}),
            0);
  const std::string csv = slurp(path("r.csv"));
  EXPECT_EQ(csv.rfind("image_id,metric,score\n", 0), 0u);
  EXPECT_NE(csv.find("\nx,cc,1"), std::string::npos);
  EXPECT_NE(csv.find("\nmean,cc,1"), std::string::npos);
}

TEST_F(Cli, EvalEmptyDirectorySignalsNoData) {
  fs::create_directories(dir_ / "pred");
  fs::create_directories(dir_ / "gt");
  EXPECT_EQ(run({"eval", "--pred-dir", path("pred"), "--gt-dir", path("gt"), "--report",
                 path("r.csv")}),
            1);
  EXPECT_EQ(slurp(path("r.csv")), "image_id,metric,score\n");
  EXPECT_EQ(run({"eval", "--pred-dir", path("pred"), "--gt-dir", path("gt"), "--metric", "auc"}),
            1);
}

}  // namespace
}  // namespace salmanip
