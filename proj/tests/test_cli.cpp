#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "treedpp/app.hpp"
#include "treedpp/version.hpp"

using namespace treedpp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"treedpp"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = runCli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("treedpp-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    unsetenv("TREEDPP_CONFIG");
  }
  void TearDown() override {
    unsetenv("TREEDPP_CONFIG");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

std::size_t dataLines(const std::string& csv) {
  std::istringstream in(csv);
  std::size_t n = 0;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

}  // namespace

TEST_F(Cli, PartitionOfTwoUnitsAtLevelThreeHasEightCells) {
  const auto r = run({"partition", "--kernel", "sine", "--window=-1..1", "--level", "3"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(dataLines(r.out), 8U);
  EXPECT_NE(r.out.find(std::string("# generator: ") + kVersionString), std::string::npos);
  EXPECT_NE(r.out.find("# config: "), std::string::npos);
}

TEST_F(Cli, VersionFlag) {
  const auto r = run({"--version"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find(kVersionString), std::string::npos);
}

TEST_F(Cli, UnknownFlagIsAConfigError) {
  EXPECT_EQ(run({"partition", "--no-such-flag"}).code, kExitConfigError);
  EXPECT_EQ(run({}).code, kExitConfigError);
}

TEST_F(Cli, ConfigErrorsNameTheFieldAndLine) {
  const auto cfg = write("bad.yaml", "kernel:\n  name: sine\nlevel: 2\nrank_max: 0\n");
  const auto r = run({"partition", "--config", cfg});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("rank_max"), std::string::npos) << r.err;

  const auto unknown = write("unknown.yaml", "level: 2\nlevle: 3\n");
  const auto u = run({"partition", "-c", unknown});
  EXPECT_EQ(u.code, kExitConfigError);
  EXPECT_NE(u.err.find("line 2"), std::string::npos) << u.err;

  const auto typed = write("typed.yaml", "level: two\n");
  EXPECT_EQ(run({"partition", "-c", typed}).code, kExitConfigError);
}

TEST_F(Cli, WindowOutsideTheHalfLineIsAConfigError) {
  EXPECT_EQ(run({"partition", "--kernel", "bessel", "--window=-1..1"}).code, kExitConfigError);
}

TEST_F(Cli, FlagsOverrideTheFileWhichOverridesDefaults) {
  const auto cfg = write("run.yaml", "window: \"0..1\"\nlevel: 2\n");
  EXPECT_EQ(dataLines(run({"partition", "-c", cfg}).out), 2U);
  EXPECT_EQ(dataLines(run({"partition", "-c", cfg, "--level", "4"}).out), 8U);
  setenv("TREEDPP_CONFIG", cfg.c_str(), 1);
  EXPECT_EQ(dataLines(run({"partition"}).out), 2U);
  EXPECT_EQ(dataLines(run({"partition", "--level", "3"}).out), 4U);
  // An explicit --config wins over the environment.
  const auto other = write("other.yaml", "window: \"0..2\"\nlevel: 1\n");
  EXPECT_EQ(dataLines(run({"partition", "-c", other}).out), 2U);
  EXPECT_EQ(dataLines(run({"partition", "-c", other, "--window", "0..3"}).out), 3U);
}

TEST_F(Cli, SampleIsByteIdenticalAcrossRunsAndThreadCounts) {
  const auto a = path("a.csv"), b = path("b.csv"), c = path("c.csv");
  EXPECT_EQ(run({"sample", "--kernel", "sine", "--level", "2", "--rank-max", "4", "--n", "300", "--seed", "7",
                 "--threads", "1", "-o", a}).code,
            kExitOk);
  EXPECT_EQ(run({"sample", "--kernel", "sine", "--level", "2", "--rank-max", "4", "--n", "300", "--seed", "7",
                 "--threads", "1", "-o", b}).code,
            kExitOk);
  EXPECT_EQ(run({"sample", "--kernel", "sine", "--level", "2", "--rank-max", "4", "--n", "300", "--seed", "7",
                 "--threads", "4", "-o", c}).code,
            kExitOk);
  EXPECT_EQ(read(a), read(b));
  EXPECT_EQ(read(a), read(c));
  EXPECT_EQ(dataLines(read(a)), 300U);
  const auto other = run({"sample", "--kernel", "sine", "--level", "2", "--rank-max", "4", "--n", "300", "--seed",
                          "8"});
  EXPECT_NE(other.out, read(a));
}

TEST_F(Cli, ProjectWritesASchemaTaggedArtifact) {
  const auto r = run({"project", "--kernel", "sine", "--window", "0..1", "--level", "1", "--rank-max", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "treedpp.projected-kernel");
  EXPECT_EQ(j["generator"], kVersionString);
  EXPECT_EQ(j["config"]["kernel"]["name"], "sine");
  EXPECT_EQ(j["metadata"]["size"], 4);

  const auto file = write("k.json", r.out);
  const auto s = run({"spectrum", "--input", file});
  EXPECT_EQ(s.code, kExitOk) << s.err;
  EXPECT_EQ(dataLines(s.out), 4U);
}

TEST_F(Cli, VerificationFailureExitsWithOne) {
  const auto ok = run({"verify", "ortho", "--window", "0..2", "--level", "2", "--rank-max", "3"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_TRUE(nlohmann::json::parse(ok.out)["pass"].get<bool>());
  // Rank 1 is far from the kernel; a 1e-14 allowance cannot absorb the gap.
  const auto bad = run({"verify", "corr", "--kernel", "sine", "--window", "0..1", "--level", "1", "--rank-max",
                        "1", "--cells", "0:", "--cells", "0:", "--tolerance", "1e-14"});
  EXPECT_EQ(bad.code, kExitVerificationFailed) << bad.err;
}

TEST_F(Cli, UnconvergedQuadratureIsANumericError) {
  const auto r = run({"project", "--kernel", "airy", "--window=-2..0", "--level", "1", "--rank-max", "1",
                      "--quadrature-order", "2", "--quadrature-tolerance", "1e-14"});
  EXPECT_EQ(r.code, kExitNumericError);
  EXPECT_NE(r.err.find("on cells"), std::string::npos) << r.err;
}

TEST_F(Cli, VerifyReportsEmbedVersionAndConfig) {
  const auto r = run({"verify", "refine", "--window", "0..2", "--level", "1", "--other-level", "3",
                      "--configurations", "20", "--points", "10", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["generator"], kVersionString);
  EXPECT_EQ(j["config"]["seed"], 3);
  EXPECT_EQ(j["config"]["window"], "0..2");
}

TEST_F(Cli, PlotWritesAnSvgWithItsConfig) {
  const auto r = run({"plot", "--kernel", "ginibre", "--window=-1..1,-1..1", "--level", "1", "--rank-max", "2",
                      "--n", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("<svg"), std::string::npos);
  EXPECT_NE(r.out.find("<desc>"), std::string::npos);
  EXPECT_NE(r.out.find(kVersionString), std::string::npos);
}
