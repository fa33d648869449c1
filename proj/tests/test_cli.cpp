#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch files are named after the running test so that tests can run in
// parallel from the same directory.
std::string scratch(const std::string& suffix) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  return std::string("cli_") + info->test_suite_name() + "_" + info->name() + suffix;
}

Run run(const std::string& args) {
  const std::string out = scratch(".stdout");
  const std::string err = scratch(".stderr");
  const std::string cmd = std::string(CAYLEY_GIBBS_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::string kTi = "--k 2 --a 2,0,0,0 --b 0,0,2,0";

}  // namespace

TEST(CliExitCodes, Mapping) {
  EXPECT_EQ(run("solve --k 2 --a 2,1,0,0 --b 0,0,2,0 --theta 0.5").code, 2);
  EXPECT_EQ(run("solve --k 2 --a 2,0,0 --b 0,0,2,0 --theta 0.5").code, 2);
  EXPECT_EQ(run("solve " + kTi + " --theta 1").code, 3);
  EXPECT_EQ(run("solve " + kTi + " --theta 0").code, 3);
  EXPECT_EQ(run("sweep --k 2 --steps 3 --output /nonexistent-dir/x.csv").code, 4);
  EXPECT_EQ(run("enumerate --k 9").code, 5);
  EXPECT_EQ(run("verify " + kTi + " --theta 0.8 --depth 4").code, 5);
  EXPECT_EQ(run("verify --theta 0.8 --assignment /nonexistent-dir/a.txt").code, 4);
  EXPECT_EQ(run("sweep --k 30").code, 5);
  EXPECT_EQ(run("sweep --k 2 --theta-lo 0.9 --theta-hi 0.1").code, 3);
  EXPECT_EQ(run("solve --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("solve " + kTi + " --theta 0.5 --grid-points 1").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(CliSolve, TranslationInvariantHasNineSolutions) {
  const auto r = run("solve " + kTi + " --theta 0.8");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  auto it = j.begin();
  EXPECT_EQ(it.key(), "reduced");
  EXPECT_EQ((++it).key(), "criterion");
  EXPECT_EQ((++it).key(), "solutions");
  EXPECT_EQ((++it).key(), "family");
  EXPECT_FALSE(j["criterion"].get<bool>());
  EXPECT_EQ(j["solutions"].size(), 9u);
  EXPECT_EQ(j["family"], "TranslationInvariant");
}

TEST(CliSolve, UniqueBelowCriterion) {
  const auto r = run("solve --k 2 --a 1,1,0,0 --b 0,0,1,1 --theta 0.5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_FALSE(j["criterion"].get<bool>());
  ASSERT_EQ(j["solutions"].size(), 1u);
  EXPECT_EQ(j["solutions"][0]["h"].get<double>(), 0.0);
}

TEST(CliEnumerate, RowCounts) {
  for (const auto& [k, n] : {std::pair{1, 16u}, std::pair{2, 100u}, std::pair{3, 400u}}) {
    const auto r = run("enumerate --k " + std::to_string(k));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out), n + 2);
    EXPECT_EQ(r.out.rfind("# schema=1\nk,a1,a2,a3,a4,b1,b2,b3,b4,a,b,c,d,family\n", 0), 0u);
  }
}

TEST(CliVerify, SolutionPassesPerturbationFails) {
  auto r = run("verify " + kTi + " --theta 0.8 --depth 3");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_GT(j["h"].get<double>(), 2.0);
  r = run("verify " + kTi + " --theta 0.8 --depth 3 --perturb-h 0.1 --perturb-l 0.1");
  EXPECT_EQ(r.code, 1);
  j = Json::parse(r.out);
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_FALSE(j["kolmogorov"]["pass"].get<bool>());
}

TEST(CliVerify, ExportRoundTrip) {
  const std::string path = scratch(".assign");
  auto r = run("verify --k 2 --a 1,0,1,0 --b 0,1,0,1 --theta 0.8 --depth 3 --root-label -L --export " + path);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(path);
  EXPECT_EQ(text.rfind("k=2 n=3 h=", 0), 0u);
  EXPECT_EQ(lines(text), 16u);
  EXPECT_NE(text.find("\n0\t-1\t-L\n"), std::string::npos);
  const auto again = run("verify --theta 0.8 --assignment " + path);
  EXPECT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(Json::parse(again.out)["compatibility"], Json::parse(r.out)["compatibility"]);
}

TEST(CliClassify, ExplicitAndSolved) {
  auto r = run("classify " + kTi + " --h 0 --l 0");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  ASSERT_EQ(j["classifications"].size(), 1u);
  EXPECT_EQ(j["classifications"][0]["family"]["tag"], "TranslationInvariant");
  EXPECT_TRUE(j["theta"].is_null());
  r = run("classify " + kTi + " --theta 0.8");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["classifications"].size(), 9u);
  EXPECT_EQ(run("classify " + kTi).code, 2);
}

TEST(CliSweep, DeterministicAcrossJobsAndRuns) {
  const std::string a = scratch(".a.csv");
  const std::string b = scratch(".b.csv");
  ASSERT_EQ(run("sweep --k 2 --jobs 1 --output " + a).code, 0);
  ASSERT_EQ(run("sweep --k 2 --jobs 4 --output " + b).code, 0);
  const std::string first = slurp(a);
  EXPECT_EQ(lines(first), 1902u);
  EXPECT_EQ(first, slurp(b));
  ASSERT_EQ(run("sweep --k 2 --jobs 4 --output " + b).code, 0);
  EXPECT_EQ(first, slurp(b));
  const auto sidecar = Json::parse(slurp(a + ".warnings.json"));
  EXPECT_EQ(sidecar["schema"], 1);
  EXPECT_EQ(sidecar["rows"], 1900);
  EXPECT_TRUE(sidecar["generated_at"].is_string());
}

TEST(CliSweep, ExplicitSchemesToStdout) {
  const auto r = run("sweep --k 2 --scheme 2,0,0,0/0,0,2,0 --scheme 1,1,0,0/0,0,1,1 --theta-lo 0.4 --theta-hi 0.6 --steps 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 8u);
  EXPECT_EQ(run("sweep --k 2 --scheme 2,0,0/0,0,2,0").code, 2);
  EXPECT_EQ(run("sweep --k 3 --scheme 2,0,0,0/0,0,2,0").code, 2);
}

TEST(CliConfig, FileValuesAndFlagPrecedence) {
  const std::string cfg = scratch(".conf");
  {
    std::ofstream out(cfg);
    out << "# solve defaults\nk=2\na=2,0,0,0\nb=0,0,2,0\ntheta=0.45\n";
  }
  auto r = run("solve --config " + cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["solutions"].size(), 1u);
  r = run("solve --config " + cfg + " --theta 0.8");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["solutions"].size(), 9u);
  {
    std::ofstream out(cfg, std::ios::app);
    out << "no-such-key=1\n";
  }
  EXPECT_EQ(run("solve --config " + cfg).code, 2);
  EXPECT_EQ(run("solve --config /nonexistent-dir/c.conf").code, 4);
}
