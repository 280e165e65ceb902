#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

std::filesystem::path work_dir() {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "mhd_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MHD_CLI_PATH) + " " + args + " > " +
                          (work_dir() / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string last_output() { return read_text(work_dir() / "stdout.txt"); }

}  // namespace

TEST(Cli, VerifySucceeds) {
  EXPECT_EQ(run_cli("verify"), 0) << last_output();
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("run --case nowhere"), 1);
  EXPECT_EQ(run_cli("run --c 1 --s 1"), 1);
  const auto cfg = work_dir() / "bad.cfg";
  std::ofstream(cfg) << "case=mms\nwibble=3\n";
  EXPECT_EQ(run_cli("run --config " + cfg.string()), 1);
  EXPECT_NE(last_output().find("wibble"), std::string::npos) << last_output();
}

TEST(Cli, RunWritesOutputsDeterministically) {
  const auto a = work_dir() / "run_a", b = work_dir() / "run_b";
  const std::string common = "run --case conservation -N 1 -K 3 --dt 0.05 --t-end 0.2 --rf 100 "
                             "--rm 100 --snapshot-every 2 --out ";
  ASSERT_EQ(run_cli(common + a.string()), 0) << last_output();
  ASSERT_EQ(run_cli(common + b.string()), 0) << last_output();
  for (const char* f : {"diagnostics.csv", "final.vtk", "state.txt", "fields_000000.vtk",
                        "fields_000002.vtk", "fields_000004.vtk"}) {
    EXPECT_TRUE(std::filesystem::exists(a / f)) << f;
  }
  EXPECT_FALSE(std::filesystem::exists(a / "fields_000001.vtk"));
  EXPECT_EQ(read_text(a / "diagnostics.csv"), read_text(b / "diagnostics.csv"));
  EXPECT_EQ(run_cli("centerline --state " + (a / "state.txt").string()), 0) << last_output();
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = work_dir() / "mms.cfg";
  const auto out = work_dir() / "mms_out";
  std::ofstream(cfg) << "# short manufactured run\ncase=mms N=2 K=2\ndt=0.05 t_end=0.1\n";
  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --scheme coupled-cn --out " + out.string()),
            0)
      << last_output();
  EXPECT_NE(last_output().find("coupled-cn"), std::string::npos);
  EXPECT_NE(last_output().find("errors"), std::string::npos);
  EXPECT_NE(read_text(out / "state.txt").find("coupled-cn"), std::string::npos);
}

TEST(Cli, NumericalFailureExitCode) {
  // Ideal conservation flow at this resolution breaks the Picard iteration within ten steps.
  const auto out = work_dir() / "fail_out";
  EXPECT_EQ(run_cli("run --case conservation -N 2 -K 8 --dt 0.02 --t-end 0.2 --out " +
                    out.string()),
            2)
      << last_output();
}
