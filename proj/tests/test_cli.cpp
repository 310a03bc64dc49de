#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "support/fixtures.hpp"

using namespace cohortce::testing;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    out_ = fs::temp_directory_path() /
           ("cohortce_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) +
            "_" + std::to_string(::getpid()));
    fs::remove_all(out_);
  }
  void TearDown() override { fs::remove_all(out_); }

  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " \"" + std::string(COHORT_CE_CLI) + "\" " + args + " >" +
                            (out_.string() + ".log") + " 2>&1";
    const int status = std::system(cmd.c_str());
    fs::remove(out_.string() + ".log");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string data(const std::string& name) const { return "\"" + (data_root() / name).string() + "\""; }
  std::string out() const { return "\"" + out_.string() + "\""; }

  fs::path out_;
};

}  // namespace

TEST_F(Cli, RunWritesSummaryAndGroups) {
  EXPECT_EQ(run("run --scenario screen-50 --data-dir " + data("toy_j3") + " --out " + out()), 0);
  EXPECT_TRUE(fs::exists(out_ / "run_screen-50.txt"));
  EXPECT_TRUE(fs::exists(out_ / "run_screen-50_groups.csv"));
  EXPECT_EQ(run("run --scenario screen-50 --format csv --data-dir " + data("toy_j3") + " --out " + out()), 0);
  EXPECT_TRUE(fs::exists(out_ / "run_screen-50.csv"));
}

TEST_F(Cli, UnknownScenarioExitsTwo) {
  EXPECT_EQ(run("run --scenario nope --data-dir " + data("toy_j3") + " --out " + out()), 2);
}

TEST_F(Cli, MissingDataDirExitsTwo) {
  EXPECT_EQ(run("compare --out " + out(), "env -u COHORT_CE_DATA_DIR"), 2);
  EXPECT_EQ(run("compare --data-dir /nonexistent/bundle --out " + out()), 2);
}

TEST_F(Cli, DataDirFromEnvironment) {
  EXPECT_EQ(run("compare --out " + out(), "COHORT_CE_DATA_DIR=" + data("toy_j3")), 0);
  EXPECT_TRUE(fs::exists(out_ / "comparison.txt"));
}

TEST_F(Cli, BadFlagsExitTwo) {
  EXPECT_EQ(run("compare --format xml --data-dir " + data("toy_j3")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("validate --individuals 0 --data-dir " + data("toy_j3")), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, CompareSelectsAlternatives) {
  EXPECT_EQ(run("compare --baseline screen-50 --alts screen-46 --format csv --data-dir " + data("toy_j3") +
                " --out " + out()),
            0);
  std::ifstream in(out_ / "comparison.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST_F(Cli, EmptySuiteWritesNothing) {
  fs::create_directories(out_);
  const fs::path suite = out_ / "empty_suite.txt";
  std::ofstream(suite) << "# no cases\n";
  EXPECT_EQ(run("sensitivity --suite \"" + suite.string() + "\" --data-dir " + data("toy_j3") + " --out " +
                out()),
            0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(out_)) files += e.path().filename().string().rfind("sensitivity_", 0) == 0;
  EXPECT_EQ(files, 0);
}

TEST_F(Cli, ValidateDeterministicBundle) {
  EXPECT_EQ(run("validate --individuals 20000 --data-dir " + data("adversarial_j27") + " --out " + out()), 0);
  EXPECT_TRUE(fs::exists(out_ / "validate_50-69.txt"));
}

TEST_F(Cli, InvalidBundleExitsTwo) {
  fs::create_directories(out_);
  const fs::path bad = out_ / "bad";
  fs::copy(data_root() / "toy_j3", bad, fs::copy_options::recursive);
  std::ofstream(bad / "incidence.csv", std::ios::trunc) << "age_start,age_end,policy_variant,rate\n46,47,baseline,2\n";
  EXPECT_EQ(run("compare --data-dir \"" + bad.string() + "\" --out " + out()), 2);
}
