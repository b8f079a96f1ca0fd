#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "opfree/cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "opfree");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = opfree::cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("opfree_cli_" + name);
}

}  // namespace

TEST(Cli, ToeplitzDemoUsesTwoQueriesExactly) {
  const auto r = invoke({"toeplitz-demo", "--n", "50"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("queries=2 max_abs_err=0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("n,queries,max_abs_err\n50,2,0\n"), std::string::npos) << r.out;
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, MissingCommandIsUsageError) {
  EXPECT_EQ(invoke({}).code, 2);
}

TEST(Cli, UnknownFlagIsUsageError) {
  const auto r = invoke({"toeplitz-demo", "--bogus", "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;
}

TEST(Cli, BadFormatNamesTheFlag) {
  const auto r = invoke({"toeplitz-demo", "--format", "xml"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--format"), std::string::npos) << r.err;
}

TEST(Cli, DescendingNListRejected) {
  const auto r = invoke({"greens-error", "--grid", "200", "--n-list", "20,10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--n-list"), std::string::npos) << r.err;
}

TEST(Cli, WrongAdvectionArityRejected) {
  const auto r = invoke({"converge-2d", "--c", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--c"), std::string::npos) << r.err;
}

TEST(Cli, ZeroDiffusionRejected) {
  const auto r = invoke({"converge-1d", "--nu", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--nu"), std::string::npos) << r.err;
}

TEST(Cli, PecletViolationIsUsageError) {
  const auto r = invoke({"perturb-sweep", "--grid", "99", "--queries", "20", "--n-fixed", "5",
                         "--c-values", "0,300"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("PecletViolation"), std::string::npos) << r.err;
}

TEST(Cli, QueriesAboveNListRejected) {
  const auto r = invoke({"converge-1d", "--grid", "200", "--queries", "20", "--n-list", "5,25"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SmallConvergeRunCertifies) {
  const auto r = invoke({"converge-1d", "--grid", "400", "--queries", "64", "--n-list",
                         "2,4,8,16,32", "--fit-min", "2", "--fit-max", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n,lambda_next,err,m_norm,bound\n", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("certificate=pass"), std::string::npos);
}

TEST(Cli, OutFilesAreByteIdenticalAcrossRuns) {
  const auto a = temp_file("a.csv"), b = temp_file("b.csv");
  const std::vector<std::string> base{"converge-2d", "--grid", "24", "--queries", "40",
                                      "--n-list", "2,4,8,16", "--fit-min", "2", "--fit-max",
                                      "16", "--seed", "7"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "3"});
  const auto ra = invoke(args_a), rb = invoke(args_b);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  const std::string ca = slurp(a);
  EXPECT_FALSE(ca.empty());
  EXPECT_EQ(ca, slurp(b));
  EXPECT_EQ(ra.out, rb.out);  // summary only, the table went to the file
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, UnwritableOutIsUsageError) {
  const auto r = invoke({"toeplitz-demo", "--out", "/nonexistent-dir/x.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--out"), std::string::npos) << r.err;
}

TEST(Cli, JsonSweepParses) {
  const auto path = temp_file("sweep.json");
  const auto r = invoke({"perturb-sweep", "--grid", "200", "--queries", "60", "--n-fixed", "10",
                         "--c-values", "0,4,8", "--format", "json", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j.at("n_fixed").get<int>(), 10);
  ASSERT_EQ(j.at("rows").size(), 3u);
  EXPECT_EQ(j.at("rows")[2].at("c_mag").get<double>(), 8.0);
  EXPECT_NE(r.out.find("increasing=yes"), std::string::npos) << r.out;
  std::filesystem::remove(path);
}

TEST(Cli, GreensErrorReportsMonotone) {
  const auto r = invoke({"greens-error", "--grid", "300", "--n-list", "10,20,40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n,rel_l2_error\n", 0), 0u);
  EXPECT_NE(r.out.find("monotone=pass"), std::string::npos);
}

TEST(Cli, LastarTwoDimensional) {
  const auto r = invoke({"lastar", "--dim", "2", "--grid", "20", "--queries", "30", "--n-list",
                         "5,10,20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n,m_norm\n", 0), 0u);
  EXPECT_NE(r.out.find("\n30,"), std::string::npos);
}

TEST(Cli, LastarRejectsThreeDimensions) {
  EXPECT_EQ(invoke({"lastar", "--dim", "3"}).code, 2);
}

TEST(Cli, SketchCommandsCertify) {
  const auto b = invoke({"sketch-bounds", "--seed", "3"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(b.out.find("certificate=pass"), std::string::npos) << b.out;
  const auto w = invoke({"sketch-witness", "--seed", "3", "--format", "json"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NE(w.out.find("members=yes"), std::string::npos) << w.out;
}

TEST(Cli, SelfcheckPasses) {
  const auto r = invoke({"selfcheck"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rotation=100/100 truncated=200/200 sandwich=50/50 certificate=pass"),
            std::string::npos)
      << r.out;
}
