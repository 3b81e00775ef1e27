#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PWAVE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "pwave_cli_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, IntervalCrossSectionPasses) {
  const fs::path cfg = write_config("interval.cfg",
                                    "experiment = cross-section\ngeometry.shape = interval\n"
                                    "geometry.length = 1\nnumerics.p = 2\nnumerics.h = 0.01\n");
  const fs::path out = cfg.parent_path() / "interval_out";
  fs::remove_all(out);
  ASSERT_EQ(run("--config " + cfg.string() + " --out " + out.string() + " --seed-oracle --mesh-out"), 0);
  std::ifstream in(out / "report.json");
  const auto report = nlohmann::json::parse(in);
  EXPECT_NEAR(report["quantities"]["ground_state"]["eigenvalue"].get<double>(), 9.87, 0.02);
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_TRUE(fs::exists(out / "ground_state.csv"));
  EXPECT_TRUE(fs::exists(out / "oracle.json"));
  EXPECT_TRUE(fs::exists(out / "mesh.txt"));
  EXPECT_TRUE(fs::exists(out / "timings.json"));
}

TEST(Cli, ErrorsExitWithOne) {
  const fs::path disk = write_config("disk.cfg",
                                     "experiment = twist-hardy\ngeometry.shape = disk\n"
                                     "numerics.p = 2\ngeometry.twist = constant amplitude=1\n");
  const std::string out = " --out " + (disk.parent_path() / "never").string();
  EXPECT_EQ(run("--config " + disk.string() + out), 1);
  const fs::path nop = write_config("nop.cfg", "experiment = straight\ngeometry.shape = disk\n");
  EXPECT_EQ(run("--config " + nop.string() + out), 1);
  EXPECT_EQ(run("--config /nonexistent/file.cfg" + out), 1);
  EXPECT_FALSE(fs::exists(disk.parent_path() / "never"));
}

TEST(Cli, FailedVerdictExitsWithTwo) {
  const fs::path cfg = write_config("strict.cfg",
                                    "experiment = straight\ngeometry.shape = interval\n"
                                    "numerics.p = 2\nnumerics.h = 0.1\nnumerics.h_s = 0.2\n"
                                    "numerics.lengths = 2\nnumerics.cutoffs = 2\n"
                                    "verdict.gap_fraction = 0.001\n");
  EXPECT_EQ(run("--config " + cfg.string() + " --out " + (cfg.parent_path() / "strict").string()), 2);
}

TEST(Cli, ListSucceeds) { EXPECT_EQ(run("list"), 0); }
