#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fel/cli.hpp"
#include "fel/inequalities.hpp"
#include "fel/json_io.hpp"

using namespace fel;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "fel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_file(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / "fel_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(Cli, EntropyOfSemicircle) {
  const Invocation r = run({"entropy", "--named", "semicircle", "--variance", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("command"), "entropy");
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_NEAR(j.at("result")[0].at("chi_log_energy").at("value").get<double>(), 1.418939, 1e-3);
  EXPECT_EQ(j.at("config").at("n_points"), kDefaultGridPoints);
  EXPECT_FALSE(j.contains("timestamp"));
}

TEST(Cli, BernoulliMonotonicityPasses) {
  const Invocation r = run({"monotonicity", "--named", "bernoulli", "--n-max", "8"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  const Json& seq = j.at("result").at("sequence");
  ASSERT_EQ(seq.size(), 8u);
  for (std::size_t i = 2; i < seq.size(); ++i) {
    EXPECT_GE(seq[i].at("chi").at("value").get<double>(), seq[i - 1].at("chi").at("value").get<double>() - 5e-3);
  }
}

TEST(Cli, FailedCheckExitsOne) {
  // a variance-2 semicircle sits above the standard-semicircle bound
  const Invocation r = run({"monotonicity", "--named", "semicircle", "--variance", "2", "--n-max", "2"});
  EXPECT_EQ(r.code, kExitCheckFailed) << r.err;
  EXPECT_FALSE(Json::parse(r.out).at("pass").get<bool>());
}

TEST(Cli, MalformedSpecNamesTheFile) {
  const std::string a = write_file("a.json", R"({"kind":"named","name":"semicircle","variance":1})");
  const std::string b = write_file("b.json", R"({"kind":"atomic","atoms":[[0, 0.5], [1,)");
  const std::string c = write_file("c.json", R"({"kind":"named","name":"uniform"})");
  const Invocation r = run({"stam", "--spec", a, "--spec", b, "--spec", c});
  EXPECT_EQ(r.code, kExitBadInput);
  EXPECT_NE(r.err.find("b.json"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, MissingFileAndBadFlags) {
  EXPECT_EQ(run({"entropy", "--spec", "/nonexistent/x.json"}).code, kExitBadInput);
  EXPECT_EQ(run({"entropy"}).code, kExitBadInput);
  EXPECT_EQ(run({"entropy", "--named", "cauchy"}).code, kExitBadInput);
  EXPECT_EQ(run({"entropy", "--named", "semicircle", "--format", "xml"}).code, kExitBadInput);
  EXPECT_EQ(run({"frobnicate"}).code, kExitBadInput);
  EXPECT_EQ(run({"stam", "--named", "semicircle"}).code, kExitBadInput);
}

TEST(Cli, NonConvergenceExitsThree) {
  const Invocation r = run({"convolve", "--named", "uniform", "--named", "arcsine", "--max-iter", "1", "--sub-tol", "1e-15"});
  EXPECT_EQ(r.code, kExitNoConvergence) << r.err;
}

TEST(Cli, ByteReproducible) {
  const std::vector<std::string> args{"epi", "--named", "uniform", "--copies", "2", "--smooth", "0.25"};
  const Invocation x = run(args);
  const Invocation y = run(args);
  ASSERT_EQ(x.code, kExitOk) << x.err;
  EXPECT_EQ(x.out, y.out);
  const Invocation seeded_a = run({"rmt-check", "--named", "bernoulli", "--copies", "2", "--dim", "64", "--trials", "8",
                            "--seed", "7"});
  const Invocation seeded_b = run({"rmt-check", "--named", "bernoulli", "--copies", "2", "--dim", "64", "--trials", "8",
                            "--seed", "7"});
  EXPECT_EQ(seeded_a.out, seeded_b.out);
}

TEST(Cli, TimestampIsASeparateField) {
  const Invocation r = run({"fisher", "--named", "semicircle", "--timestamp"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_TRUE(j.contains("timestamp"));
  j.erase("timestamp");
  EXPECT_EQ(j.dump() + "\n", run({"fisher", "--named", "semicircle"}).out);
}

TEST(Cli, CsvOutput) {
  const Invocation r = run({"stam", "--named", "semicircle", "--copies", "2", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string config, header, row;
  std::getline(lines, config);
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(config.rfind("# ", 0), 0u);
  EXPECT_EQ(header, csv_header());
  EXPECT_EQ(row.rfind("free_stam", 0), 0u) << row;
}

TEST(Cli, ConvolveReportsOracleMoments) {
  const Invocation r = run({"convolve", "--named", "bernoulli", "--copies", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  const auto got = j.at("result").at("moments").get<std::vector<double>>();
  const auto want = j.at("result").at("oracle_moments").get<std::vector<double>>();
  EXPECT_NEAR(want[1], 2.0, 1e-12);
  EXPECT_NEAR(want[5], 20.0, 1e-12);
  for (std::size_t k = 1; k < 6; k += 2) EXPECT_NEAR(got[k], want[k], 1e-3);
}

TEST(Cli, DumpDensity) {
  const Invocation r = run({"fisher", "--named", "uniform", "--n-points", "64", "--dump-density"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json d = Json::parse(r.out).at("result")[0].at("density");
  EXPECT_EQ(d.at("density").size(), 64u);
}

TEST(Cli, ClassicalMonotonicity) {
  const Invocation r = run({"classical-monotonicity", "--named", "uniform", "--n-max", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("result").at("sequence").size(), 4u);
}
