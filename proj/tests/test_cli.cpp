#include "vccrecon/cli.hpp"
#include "vccrecon/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace vcc {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("vccrecon_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args)
  {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string path(std::string const &name) const { return (dir_ / name).string(); }

  std::map<std::string, std::string> values() const
  {
    std::map<std::string, std::string> kv;
    std::istringstream in(out_.str());
    for (std::string line; std::getline(in, line);) {
      auto const eq = line.find('=');
      if (eq != std::string::npos) {
        kv[line.substr(0, eq)] = line.substr(eq + 1);
      }
    }
    return kv;
  }

  static std::string slurp(std::string const &p)
  {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, UsageErrors)
{
  EXPECT_EQ(call({"ecalib", "--in", path("x.ksp1"), "--out", path("m.ksp1"), "--kernel", "0"}), 1);
  EXPECT_EQ(call({"pipeline", "--bogus"}), 1);
  EXPECT_EQ(call({"frobnicate"}), 1);
  EXPECT_EQ(call({"pipeline", "--mode", "phase"}), 1);
  EXPECT_EQ(call({"pipeline", "--pf", "1/2", "--out", path("p")}), 1);
  EXPECT_EQ(call({"--help"}), 0);
  EXPECT_NE(out_.str().find("pipeline"), std::string::npos);
}

TEST_F(Cli, MissingFileIsDataError)
{
  EXPECT_EQ(call({"vcc", "--in", path("absent.ksp1"), "--out", path("v.ksp1")}), 2);
  EXPECT_NE(err_.str().find("error:"), std::string::npos);
}

TEST_F(Cli, BadFileIsDataError)
{
  std::ofstream(path("junk.ksp1")) << "not a tensor";
  EXPECT_EQ(call({"metrics", "--a", path("junk.ksp1"), "--b", path("junk.ksp1")}), 2);
}

TEST_F(Cli, PipelineIsDeterministic)
{
  ASSERT_EQ(call({"pipeline", "--seed", "42", "--iters", "20", "--out", path("a")}), 0) << err_.str();
  std::string const first = slurp(path("a/manifest.txt"));
  ASSERT_EQ(call({"pipeline", "--seed", "42", "--iters", "20", "--out", path("b")}), 0) << err_.str();
  std::string const second = slurp(path("b/manifest.txt"));
  EXPECT_FALSE(first.empty());
  EXPECT_NE(first.find("sha256.recon.ksp1="), std::string::npos);
  EXPECT_NE(first.find("kernel=6"), std::string::npos);
  EXPECT_EQ(first, second);
  EXPECT_EQ(cli::sha256_file(path("a/recon.ksp1")), cli::sha256_file(path("b/recon.ksp1")));
}

TEST_F(Cli, PipelineFixture)
{
  ASSERT_EQ(call({"pipeline", "--hf-blobs", "3", "--maps", "2", "--mode", "real", "--out", path("run")}), 0)
    << err_.str();
  auto const kv = values();
  ASSERT_TRUE(kv.contains("nrmse"));
  EXPECT_NEAR(std::stod(kv.at("nrmse")), 0.00143637, 1e-3);
  EXPECT_EQ(kv.at("iterations"), "100");
  EXPECT_TRUE(fs::exists(path("run/recon_diff.pgm")));
  EXPECT_NE(slurp(path("run/metrics.txt")).find("nrmse=" + kv.at("nrmse")), std::string::npos);
}

TEST_F(Cli, PipelineSkipRecon)
{
  ASSERT_EQ(call({"pipeline", "--calib", "espirit", "--skip-recon", "--out", path("run")}), 0) << err_.str();
  auto const kv = values();
  EXPECT_TRUE(kv.contains("proj_complex"));
  EXPECT_FALSE(kv.contains("nrmse"));
  EXPECT_FALSE(fs::exists(path("run/recon.ksp1")));
}

TEST_F(Cli, SubcommandChain)
{
  ASSERT_EQ(call({"phantom", "--hf-blobs", "2", "--out", path("ph")}), 0) << err_.str();
  ASSERT_EQ(call({"vcc", "--in", path("ph/ksp.ksp1"), "--out", path("v.ksp1")}), 0) << err_.str();
  EXPECT_EQ(values().at("coils"), "16");
  ASSERT_EQ(call({"ecalib", "--in", path("v.ksp1"), "--vcc", "--maps", "2", "--out", path("raw.ksp1")}), 0)
    << err_.str();
  EXPECT_TRUE(fs::exists(path("raw_eig.ksp1")));
  ASSERT_EQ(call({"ecalib", "--in", path("ph/ksp.ksp1"), "--direct", "--out", path("direct.ksp1")}), 0)
    << err_.str();
  ASSERT_EQ(call({"phasecal", "--maps", path("raw.ksp1"), "--out", path("maps.ksp1"), "--phase", path("phi.ksp1"),
                  "--align-ref", path("direct.ksp1")}),
            0)
    << err_.str();
  EXPECT_GT(std::stod(values().at("valid_fraction")), 0.5);
  KTensor const maps = read_ktensor(path("maps.ksp1"));
  EXPECT_EQ(maps.extent(Dim::Coil), 8);
  EXPECT_EQ(maps.extent(Dim::Set), 2);

  ASSERT_EQ(call({"recon", "--ksp", path("ph/ksp.ksp1"), "--maps", path("maps.ksp1"), "--pattern", "R=3,acs=24",
                  "--mode", "real", "--out", path("rec.ksp1"), "--coils-out", path("rec_coils.ksp1")}),
            0)
    << err_.str();
  EXPECT_TRUE(values().contains("iterations"));
  ASSERT_EQ(call({"project", "--coils", path("ph/coils.ksp1"), "--maps", path("maps.ksp1"), "--mode", "real",
                  "--mask", path("ph/support.ksp1"), "--out", path("p.ksp1"), "--err", path("e.ksp1")}),
            0)
    << err_.str();
  EXPECT_LT(std::stod(values().at("residual")), 0.2);
  ASSERT_EQ(call({"metrics", "--a", path("rec_coils.ksp1"), "--b", path("ph/coils.ksp1"), "--mask",
                  path("ph/support.ksp1")}),
            0)
    << err_.str();
  EXPECT_LT(std::stod(values().at("nrmse")), 0.05);
}

TEST_F(Cli, ShapeMismatchIsDataError)
{
  ASSERT_EQ(call({"phantom", "--grid", "64", "--out", path("small")}), 0) << err_.str();
  ASSERT_EQ(call({"phantom", "--out", path("big")}), 0) << err_.str();
  EXPECT_EQ(call({"metrics", "--a", path("small/coils.ksp1"), "--b", path("big/coils.ksp1")}), 2);
}

} // namespace
} // namespace vcc
