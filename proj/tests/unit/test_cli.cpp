#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lidarsynth/kitti_io.hpp"
#include "lidarsynth_tools/commands.hpp"
#include "oracles.hpp"

using namespace lidarsynth;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = tools::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Relative path -> file bytes for every regular file under `root`.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = oracle::slurp(e.path());
  }
  return out;
}

const std::vector<std::string> kSmall = {"--width", "320", "--height", "180"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = oracle::temp_dir("cli"); }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DatasetOfFiveFramesHasCompleteLayout) {
  const CliResult r = cli(with({"dataset", "-s", "street-basic", "-n", "5", "-o", (dir_ / "ds").string()}, kSmall));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const std::string& sub : dataset_subdirs()) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir_ / "ds" / sub)) names.push_back(e.path().stem().string());
    std::sort(names.begin(), names.end());
    EXPECT_EQ(names, (std::vector<std::string>{"000000", "000001", "000002", "000003", "000004"})) << sub;
  }
  std::ifstream in(dir_ / "ds" / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(in);
  EXPECT_EQ(m.at("version"), tools::kToolVersion);
  EXPECT_EQ(m.at("seed"), 0);
  EXPECT_EQ(m.at("config").at("scene"), "street-basic");
  ASSERT_EQ(m.at("frames").size(), 5u);
  for (const auto& f : m.at("frames")) {
    const std::size_t labels = f.at("labeled").get<std::size_t>() + f.at("dont_care").get<std::size_t>();
    const std::string name = f.at("name");
    EXPECT_EQ(read_labels(dir_ / "ds" / "label_2" / (name + ".txt")).size(), labels);
  }
}

TEST_F(CliTest, RerunsAreByteIdenticalForAnyWorkerCount) {
  const std::vector<std::string> base = with({"dataset", "-s", "random", "--seed", "11", "-n", "3"}, kSmall);
  ASSERT_EQ(cli(with(base, {"-j", "1", "-o", (dir_ / "a").string()})).code, 0);
  ASSERT_EQ(cli(with(base, {"-j", "1", "-o", (dir_ / "b").string()})).code, 0);
  ASSERT_EQ(cli(with(base, {"-j", "4", "-o", (dir_ / "c").string()})).code, 0);
  const auto a = tree(dir_ / "a");
  EXPECT_GT(a.size(), 25u);
  EXPECT_TRUE(a == tree(dir_ / "b"));
  EXPECT_TRUE(a == tree(dir_ / "c"));
  // A different seed changes the data.
  ASSERT_EQ(cli(with({"dataset", "-s", "random", "--seed", "12", "-n", "3", "-o", (dir_ / "d").string()}, kSmall)).code, 0);
  EXPECT_FALSE(a == tree(dir_ / "d"));
}

TEST_F(CliTest, ConfigFileAndFlagOverrides) {
  {
    std::ofstream cfg(dir_ / "run.json");
    cfg << R"({"scene": "wall", "scene_params": {"z": 15}, "camera": {"width": 200, "height": 100},
              "noise": false, "frames": 1, "color": false})";
  }
  const CliResult r = cli({"dataset", "-c", (dir_ / "run.json").string(), "--height", "120", "-o", (dir_ / "ds").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const DepthBuffer d = read_depth_buffer(dir_ / "ds" / "depth" / "000000.bin");
  EXPECT_EQ(d.width(), 200);
  EXPECT_EQ(d.height(), 120);
  EXPECT_TRUE(fs::is_empty(dir_ / "ds" / "image_2"));
  const PointCloud c = read_point_cloud(dir_ / "ds" / "velodyne" / "000000.bin", std::nullopt);
  ASSERT_FALSE(c.empty());
  for (const LidarPoint& p : c.points) ASSERT_NEAR(p.position.z(), 15.0, 0.005);  // read back in the camera frame

  std::ofstream(dir_ / "bad.json") << R"({"scene": "wall", "colour": true})";
  const CliResult bad = cli({"dataset", "-c", (dir_ / "bad.json").string(), "-o", (dir_ / "x").string()});
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.err.find("colour"), std::string::npos) << bad.err;
}

TEST_F(CliTest, Errors) {
  CliResult r = cli({"dataset", "-s", "no-such-scene", "-o", (dir_ / "x").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("no-such-scene"), std::string::npos) << r.err;
  r = cli({"dataset", "--no-such-flag"});
  EXPECT_NE(r.code, 0);
  r = cli({"stats"});
  EXPECT_NE(r.code, 0);
  r = cli({"stats", (dir_ / "missing").string()});
  EXPECT_NE(r.code, 0);
  std::ofstream(dir_ / "file") << "x";
  r = cli(with({"dataset", "-s", "wall", "-n", "1", "-o", (dir_ / "file" / "sub").string()}, kSmall));
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
  r = cli({"dataset", "-s", "wall", "-p", "z", "-o", (dir_ / "y").string()});
  EXPECT_NE(r.code, 0);
  r = cli({});
  EXPECT_NE(r.code, 0);
}

TEST_F(CliTest, RenderAndGenerateSingleFrame) {
  ASSERT_EQ(cli(with({"render", "-s", "sphere", "--frame", "3", "-o", (dir_ / "r").string()}, kSmall)).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "r" / "depth" / "000003.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "r" / "image_2" / "000003.ppm"));
  EXPECT_FALSE(fs::exists(dir_ / "r" / "velodyne"));
  ASSERT_EQ(cli(with({"generate", "-s", "street-basic", "-o", (dir_ / "g").string()}, kSmall)).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "g" / "velodyne" / "000000.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "g" / "extended" / "000000.txt"));
}

TEST_F(CliTest, StatsOnTwoFrameFixture) {
  fs::create_directories(dir_ / "ds" / "label_2");
  auto label = [](const std::string& type, double x, double z) {
    ObjectLabel l;
    l.type = type;
    l.bbox = {1, 2, 3, 4};
    l.h = l.w = l.l = 1;
    l.location = Vec3(x, 1.7, z);
    return l;
  };
  write_labels({label("Car", 0, 10), label("Car", 5, 20), label("Pedestrian", 0, 50)},
               dir_ / "ds" / "label_2" / "000000.txt");
  write_labels({label("Car", -50, 10), label(kDontCare, 0, 0)}, dir_ / "ds" / "label_2" / "000001.txt");
  const CliResult r = cli({"stats", (dir_ / "ds").string(), "--heatmap", (dir_ / "h").string(), "--report",
                     (dir_ / "s.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Car"), std::string::npos);
  std::ifstream in(dir_ / "s.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("frames"), 2);
  EXPECT_EQ(j.at("classes").at("Car").at("count"), 3);
  EXPECT_EQ(j.at("classes").at("Car").at("frames_with"), 2);
  EXPECT_DOUBLE_EQ(j.at("classes").at("Car").at("apicc").get<double>(), 1.5);
  EXPECT_EQ(j.at("classes").at("Pedestrian").at("count"), 1);
  EXPECT_FALSE(j.at("classes").contains(kDontCare));
  EXPECT_EQ(j.at("heatmap").at("total"), 3);  // the car at x = -50 m is outside
  EXPECT_TRUE(fs::exists(dir_ / "h.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "h.csv"));

  const CliResult peds = cli({"stats", (dir_ / "ds").string(), "--class", "Pedestrian", "--report",
                        (dir_ / "p.json").string()});
  ASSERT_EQ(peds.code, 0);
  std::ifstream pin(dir_ / "p.json");
  EXPECT_EQ(nlohmann::json::parse(pin).at("heatmap").at("total"), 1);
}

TEST_F(CliTest, CompareListsFarCarAsMissed) {
  const CliResult r = cli({"compare", "-s", "street-basic", "--report", (dir_ / "c.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("missed by ray casting: 2 3"), std::string::npos) << r.out;
  std::ifstream in(dir_ / "c.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("missed"), nlohmann::json::array({2, 3}));

  const CliResult d = cli({"compare", "-s", "street-basic", "--detailed", "--no-limit"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(d.out.find("missed by ray casting: 2"), std::string::npos) << d.out;
}

TEST(CliValidate, DefaultPassesAndVariantsBehave) {
  CliResult r = cli({"validate"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  for (const char* check : {"oracle-equivalence", "gate", "fov", "noise-statistics", "point-label-consistency"}) {
    EXPECT_NE(r.out.find(std::string("[PASS] ") + check), std::string::npos) << check << "\n" << r.out;
  }

  r = cli({"validate", "--gate-ratio", "10"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("[FAIL] gate"), std::string::npos) << r.out;

  r = cli({"validate", "--noise-sigma", "0"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("[SKIP] noise-statistics"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos) << r.out;
}
