#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/surface_io.hpp"

namespace fs = std::filesystem;
using flatflow::cli::run;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("flatflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    torus_ = (dir_ / "torus.json").string();
    flatflow::write_surface(torus_, flatflow::make_torus());
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  fs::path dir_;
  std::string torus_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(call({"--help"}), 0); }

TEST_F(Cli, MissingSubcommandIsValidationError) { EXPECT_EQ(call({}), flatflow::cli::kValidation); }

TEST_F(Cli, UnknownOptionIsValidationError) {
  EXPECT_EQ(call({"saddle", "--surface", torus_, "--T", "2", "--bogus"}), flatflow::cli::kValidation);
}

TEST_F(Cli, SurfaceValidatePrintsSummaryAndHeader) {
  ASSERT_EQ(call({"surface", "validate", torus_}), 0);
  EXPECT_NE(out_.str().find("\"genus\": 1"), std::string::npos);
  EXPECT_EQ(err_.str().rfind("# flatflow ", 0), 0u);
  EXPECT_NE(err_.str().find("surface="), std::string::npos);
}

TEST_F(Cli, SaddleCsvMatchesLatticeCount) {
  ASSERT_EQ(call({"saddle", "--surface", torus_, "--T", "2.5"}), 0);
  const std::string csv = out_.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
}

TEST_F(Cli, BudgetExhaustionExitCode) {
  EXPECT_EQ(call({"saddle", "--surface", torus_, "--T", "40", "--budget", "5"}), flatflow::cli::kBudget);
}

TEST_F(Cli, VertexHitExitCode) {
  EXPECT_EQ(call({"trace", "--surface", torus_, "--x", "0.5", "--y", "0.5", "--theta", "0.7853981633974483"}),
            flatflow::cli::kVertexHit);
}

TEST_F(Cli, MissingFileIsFailure) {
  EXPECT_EQ(call({"surface", "validate", (dir_ / "none.json").string()}), flatflow::cli::kFailure);
}

TEST_F(Cli, MalformedSurfaceIsValidationError) {
  flatflow::write_text_file(dir_ / "bad.json", "{\"faces\": []");
  EXPECT_EQ(call({"surface", "validate", (dir_ / "bad.json").string()}), flatflow::cli::kValidation);
}

TEST_F(Cli, ConfigSuppliesOptionsAndFlagsOverride) {
  flatflow::write_text_file(dir_ / "cfg.json",
                            "{\"command\": \"hitting\", \"hitting\": {\"surface\": \"" + torus_ + "\", \"M\": 5}}");
  ASSERT_EQ(call({"--config", (dir_ / "cfg.json").string()}), 0);
  const std::string first = out_.str();
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 5);
  ASSERT_EQ(call({"--config", (dir_ / "cfg.json").string(), "hitting", "--M", "3"}), 0);
  const std::string text = out_.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST_F(Cli, OutWritesFile) {
  const std::string path = (dir_ / "iet.json").string();
  ASSERT_EQ(call({"iet", "--surface", torus_, "--theta", "0.3", "--out", path}), 0);
  EXPECT_TRUE(out_.str().empty());
  EXPECT_NE(flatflow::read_text_file(path).find("\"branches\""), std::string::npos);
}

TEST_F(Cli, UnfoldProducesSurface) {
  const std::string poly = (dir_ / "tri.json").string();
  flatflow::write_text_file(poly, "{\"vertices\": [[0,0],[1,0],[0.5,0.8660254037844386]]}");
  ASSERT_EQ(call({"surface", "unfold", "--polygon", poly, "--normalize"}), 0);
  const flatflow::TranslationSurface s = flatflow::surface_from_json(out_.str());
  EXPECT_EQ(s.face_count(), 6);
  EXPECT_NEAR(s.area(), 1.0, 1e-12);
}

TEST_F(Cli, BalanceFromPointsFile) {
  flatflow::write_text_file(dir_ / "pts.txt", "0.1\n0.35\n0.6\n0.85\n");
  ASSERT_EQ(call({"balance", "--points", (dir_ / "pts.txt").string(), "--z1", "1", "--p", "2"}), 0);
  EXPECT_NE(out_.str().find("\"telescoping\""), std::string::npos);
}

TEST_F(Cli, SpreadAndConstantsRun) {
  ASSERT_EQ(call({"spread", "--surface", torus_, "--dirs", "8", "--T", "50", "--csv", (dir_ / "s.csv").string()}), 0);
  EXPECT_NE(out_.str().find("\"pass_fraction\""), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "s.csv"));
  ASSERT_EQ(call({"constants", "--surface", torus_, "--eps", "0.5", "--T", "16", "--runs", "5"}), 0);
  EXPECT_NE(out_.str().find("\"all_hold\": true"), std::string::npos);
}

TEST_F(Cli, DiscrepancyAndOmegaAndGood) {
  ASSERT_EQ(call({"discrepancy", "--surface", torus_, "--M", "100"}), 0);
  EXPECT_NE(out_.str().find("star_discrepancy"), std::string::npos);
  ASSERT_EQ(call({"omega", "--surface", torus_, "--n", "3", "--c0", "16"}), 0);
  EXPECT_NE(out_.str().find("\"measure\""), std::string::npos);
  ASSERT_EQ(call({"good", "--surface", torus_, "--N", "4", "--eps", "0.5"}), 0);
  EXPECT_NE(out_.str().find("\"meets_target\": true"), std::string::npos);
}
