#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lfdisp/pfm.hpp"
#include "lfdisp/pgm.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LFDISP_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_scene_file(const fs::path& p, int size) {
  std::ofstream out(p);
  out << "angular = 9\nwidth = " << size << "\nheight = " << size << "\n"
      << "layer = noise:5:0.2 disp=0.6\n"
      << "layer = noise:6:0.2 disp=1.6 rect=" << size / 3 << "," << size / 3
      << "," << 2 * size / 3 << "," << 2 * size / 3 << "\n";
}

}  // namespace

TEST(Cli, UnknownSubcommandExitsOne) {
  EXPECT_EQ(run_cli("frobnicate > /dev/null 2>&1"), 1);
}

TEST(Cli, MissingRequiredOptionExitsOne) {
  EXPECT_EQ(run_cli("estimate > /dev/null 2>&1"), 1);
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run_cli("--help > /dev/null 2>&1"), 0);
}

TEST(Cli, EvalIdenticalMapsReportsZero) {
  const auto dir = testutil::make_temp_dir("cli_eval");
  lfdisp::DisparityMap m(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) {
      m.values.at(x, y) = 0.1f * float(x) - 0.3f;
      m.valid.at(x, y) = 1;
    }
  lfdisp::write_pfm(m, (dir / "a.pfm").string());
  const auto json_path = dir / "out.json";
  ASSERT_EQ(run_cli("eval --est " + (dir / "a.pfm").string() + " --gt " +
                    (dir / "a.pfm").string() + " --json > " +
                    json_path.string()),
            0);
  const json j = json::parse(slurp(json_path));
  EXPECT_EQ(j["metrics"]["mse_x100"].get<double>(), 0.0);
  EXPECT_EQ(j["metrics"]["badpix"]["0.07"].get<double>(), 0.0);
}

TEST(Cli, JsonReportRoundTripsExactly) {
  const auto dir = testutil::make_temp_dir("cli_json");
  lfdisp::DisparityMap gt(8, 8), est(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      gt.values.at(x, y) = 0.37f * float(x) / 7.0f;
      est.values.at(x, y) = gt.values.at(x, y) + 0.013f * float(y % 3);
      gt.valid.at(x, y) = est.valid.at(x, y) = 1;
    }
  lfdisp::write_pfm(gt, (dir / "gt.pfm").string());
  lfdisp::write_pfm(est, (dir / "est.pfm").string());
  const auto json_path = dir / "report.json";
  ASSERT_EQ(run_cli("eval --est " + (dir / "est.pfm").string() + " --gt " +
                    (dir / "gt.pfm").string() + " --out " +
                    json_path.string() + " > /dev/null"),
            0);
  const json first = json::parse(slurp(json_path));
  const json second = json::parse(first.dump());
  EXPECT_EQ(first, second);
  EXPECT_EQ(first["metrics"]["mse_x100"].get<double>(),
            second["metrics"]["mse_x100"].get<double>());
}

TEST(Cli, FullPipelineProducesReport) {
  const auto dir = testutil::make_temp_dir("cli_pipe");
  write_scene_file(dir / "scene.cfg", 36);
  ASSERT_EQ(run_cli("synth --spec " + (dir / "scene.cfg").string() +
                    " --out " + (dir / "lf").string() + " > /dev/null"),
            0);
  EXPECT_TRUE(fs::exists(dir / "lf" / "input_Cam080.png"));
  EXPECT_TRUE(fs::exists(dir / "lf" / "gt.pfm"));
  EXPECT_TRUE(fs::exists(dir / "lf" / "parameters.cfg"));

  ASSERT_EQ(run_cli("estimate --input " + (dir / "lf").string() + " --out " +
                    (dir / "disp.pfm").string() + " --regions " +
                    (dir / "regions.png").string() + " --json " +
                    (dir / "report.json").string() +
                    " --fine-step 0.1 > /dev/null"),
            0);
  EXPECT_TRUE(fs::exists(dir / "disp.pfm"));
  EXPECT_TRUE(fs::exists(dir / "regions.png"));

  const json j = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["params"]["alpha1"].get<double>(), 1.0);
  EXPECT_EQ(j["params"]["lambda"].get<double>(), 1.0);
  EXPECT_EQ(j["params"]["gamma"].get<double>(), 0.2);
  EXPECT_LT(j["metrics"]["mse_x100"].get<double>(), 10.0);
  EXPECT_GE(j["runtime_seconds"].get<double>(), 0.0);

  const lfdisp::DisparityMap disp =
      lfdisp::read_pfm((dir / "disp.pfm").string());
  EXPECT_EQ(disp.width(), 36);
  EXPECT_EQ(disp.height(), 36);
}

TEST(Cli, RegionsCommandWritesLabelImages) {
  const auto dir = testutil::make_temp_dir("cli_regions");
  write_scene_file(dir / "scene.cfg", 36);
  ASSERT_EQ(run_cli("synth --spec " + (dir / "scene.cfg").string() +
                    " --out " + (dir / "lf").string() + " > /dev/null"),
            0);
  ASSERT_EQ(run_cli("regions --input " + (dir / "lf").string() + " --out " +
                    (dir / "r.png").string() + " --pgm " +
                    (dir / "r.pgm").string() + " > /dev/null"),
            0);
  const lfdisp::RegionMap labels =
      lfdisp::read_pgm_labels((dir / "r.pgm").string());
  EXPECT_EQ(labels.width(), 36);
  EXPECT_EQ(labels.height(), 36);
}

TEST(Cli, InspectWindowEmitsCandidateTable) {
  const auto dir = testutil::make_temp_dir("cli_inspect");
  write_scene_file(dir / "scene.cfg", 36);
  ASSERT_EQ(run_cli("synth --spec " + (dir / "scene.cfg").string() +
                    " --out " + (dir / "lf").string() + " > /dev/null"),
            0);
  ASSERT_EQ(run_cli("inspect-window --input " + (dir / "lf").string() +
                    " --x 18 --y 18 --out " + (dir / "table.csv").string() +
                    " > /dev/null"),
            0);
  const std::string csv = slurp(dir / "table.csv");
  EXPECT_NE(csv.find("shape,side,entropy,selected"), std::string::npos);
  EXPECT_NE(csv.find(",1\n"), std::string::npos);  // something got selected
}

TEST(Cli, ProfileEmitsRow) {
  const auto dir = testutil::make_temp_dir("cli_profile");
  lfdisp::DisparityMap m(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) {
      m.values.at(x, y) = float(x);
      m.valid.at(x, y) = 1;
    }
  lfdisp::write_pfm(m, (dir / "m.pfm").string());
  ASSERT_EQ(run_cli("profile --map " + (dir / "m.pfm").string() +
                    " --row 2 --out " + (dir / "p.csv").string()),
            0);
  const std::string csv = slurp(dir / "p.csv");
  EXPECT_NE(csv.find("x,value,valid"), std::string::npos);
  EXPECT_NE(csv.find("4,4,1"), std::string::npos);

  EXPECT_EQ(run_cli("profile --map " + (dir / "m.pfm").string() +
                    " --row 9 > /dev/null 2>&1"),
            1);
}
