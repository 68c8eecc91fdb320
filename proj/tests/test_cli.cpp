#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "cli/io.hpp"
#include "cli/report.hpp"
#include "collapse/error.hpp"

using collapse::cli::Json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(COLLAPSE_KIT) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("collapse_kit_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

Json without_timing(Json j) {
  j.erase("timing");
  return j;
}

}  // namespace

TEST(Cli, TableExampleReport) {
  const auto r = run("table " + data("a_collapsible_table.csv"));
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], "collapse-kit/1");
  EXPECT_EQ(j["summary"]["A_collapsible"], true);
  EXPECT_EQ(j["summary"]["homogeneous"], false);
  EXPECT_EQ(j["summary"]["collapsible"], false);
  EXPECT_EQ(j["summary"]["X_indep_W"], true);
  EXPECT_EQ(j["input"]["dimensions"]["w"], 2);
  EXPECT_EQ(j["values"]["dependence"]["marginal"][0]["exact"], "3/44");
  for (const auto& c : j["checks"]) {
    ASSERT_TRUE(c.contains("property"));
    if (c.contains("tolerance")) EXPECT_TRUE(c.contains("method"));
  }
}

TEST(Cli, ReversalTableHasWitnessCells) {
  const auto r = run("table " + data("reversal_table.csv") + " --checks reversal");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["summary"]["reversal"], true);
  const auto& c = j["checks"][0];
  EXPECT_EQ(c["reversal"], true);
  EXPECT_EQ(c["witness"]["y"], "1");
  EXPECT_TRUE(c["witness"].contains("conditional_w"));
}

TEST(Cli, EmptyCsvIsAnInputError) {
  const auto r = run("table " + temp_file("empty.csv", ""), true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("empty CSV"), std::string::npos);
}

TEST(Cli, MalformedRowNamesItsLine) {
  const auto r = run("table " + temp_file("bad.csv", "y,x,w,count\n1,1,1,3\n1,2,1,abc\n"), true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("line 3"), std::string::npos);
}

TEST(Cli, UniformQuadraticModel) {
  const auto r = run("model " + data("uniform_quadratic.json") +
                     " --checks A_collapsibility,residual_integral,density_A_collapsibility,sufficiency_necessity");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["summary"]["A_collapsible"], true);
  const auto& sn = j["checks"][3];
  EXPECT_EQ(sn["C1_Y_indep_W_given_X"], false);
  EXPECT_EQ(sn["C2_X_indep_W"], false);
  EXPECT_EQ(j["config"]["grid"]["x"].size(), 10u);
}

TEST(Cli, LinearInteractionIsNotHomogeneous) {
  const auto r = run("model " + data("linear_interaction.json") + " --checks homogeneity --grid 6x6x3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["summary"]["homogeneous"], false);
}

TEST(Cli, InvalidModelRequestsAreInputErrors) {
  EXPECT_EQ(run("model " + data("uniform_shift.json") + " --checks uniform_collapsibility").code, 1);
  EXPECT_EQ(run("model " + temp_file("fam.json", R"({"family": "cauchy"})")).code, 1);
  EXPECT_EQ(run("model " + temp_file("neg.json", R"({"family": "uniform-shift", "params": {"w_shift": 0},
      "evaluation": {"y": [0], "x": [-1, 1], "w": [0]}})")).code,
            1);
  EXPECT_EQ(run("model " + temp_file("broken.json", "{not json")).code, 1);
  EXPECT_EQ(run("model " + data("uniform_shift.json") + " --tol cox_identity=-1").code, 1);
}

TEST(Cli, ModelReportIsDeterministic) {
  const std::string args = "model " + data("linear_interaction.json") + " --grid 5x5x3 --emit-fields";
  const auto a = run(args), b = run(args), s = run(args + " --serial");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(without_timing(Json::parse(a.out)).dump(), without_timing(Json::parse(b.out)).dump());
  const auto ja = Json::parse(a.out), js = Json::parse(s.out);
  EXPECT_EQ(ja["checks"].dump(), js["checks"].dump());
  EXPECT_EQ(ja["fields"].dump(), js["fields"].dump());
}

TEST(Cli, CochranMatrixAndSample) {
  const auto id = run("cochran " + temp_file("id.json", "[[1,0,0],[0,1,0],[0,0,1]]"));
  ASSERT_EQ(id.code, 0);
  const auto j = Json::parse(id.out);
  for (const char* k : {"beta_yx", "beta_yx_w", "beta_yw_x", "beta_wx", "residual"}) EXPECT_EQ(j["values"][k], 0.0);
  EXPECT_EQ(run("cochran " + temp_file("const.csv", "y,x,w\n1,2,3\n2,2,1\n3,2,7\n4,2,2\n")).code, 1);
  EXPECT_EQ(run("cochran " + temp_file("two.csv", "y,x,w\n1,2,3\n2,3,1\n")).code, 1);
  const auto g = run("cochran " + data("gaussian_cov.json"));
  EXPECT_EQ(Json::parse(g.out)["summary"]["identity_holds"], true);
}

TEST(Cli, BatchNeedsSeedAndIsDeterministic) {
  EXPECT_EQ(run("batch --suite chain --count 5").code, 1);
  EXPECT_EQ(run("batch --seed 1 --suite everything").code, 1);
  const auto a = run("batch --seed 3 --count 40 --suite lattice");
  const auto b = run("batch --seed 3 --count 40 --suite lattice --serial");
  ASSERT_EQ(a.code, 0);
  auto ja = without_timing(Json::parse(a.out)), jb = without_timing(Json::parse(b.out));
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(ja["values"]["failed"], 0);
}

TEST(Cli, CsvSummaryToFile) {
  const auto path = (std::filesystem::temp_directory_path() / "collapse_kit_summary.csv").string();
  std::filesystem::remove(path);
  const auto r = run("table " + data("a_collapsible_table.csv") + " --format csv-summary --out " + path);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto text = collapse::cli::read_file(path);
  EXPECT_EQ(text.rfind("property,applicable,holds,max_violation,tolerance\n", 0), 0u);
  EXPECT_NE(text.find("A_collapsibility,true,true,0.0,0.0"), std::string::npos);
}

TEST(Cli, RunConfigOverridesAndUnknownKeys) {
  const auto cfg = temp_file("run.json", R"({"checks": ["homogeneity"], "output": {"format": "csv-summary"}})");
  const auto r = run("table " + data("a_collapsible_table.csv") + " --config " + cfg);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "property,applicable,holds,max_violation,tolerance\nhomogeneity,true,false,0.30833333333333335,0.0\n");
  EXPECT_EQ(run("table " + data("a_collapsible_table.csv") + " --config " + temp_file("bad_run.json", R"({"color": 1})"))
                .code,
            1);
}

TEST(Cli, Sha256Fingerprint) {
  EXPECT_EQ(collapse::cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CliParsing, TableCsvColumnsInAnyOrder) {
  const auto rows = collapse::cli::parse_table_csv("count,w,y,x\n3,a,1,2\n1/2,b,2,1\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].x, "2");
  EXPECT_EQ(rows[1].count, collapse::Rational(1, 2));
  EXPECT_THROW(collapse::cli::parse_table_csv("y,x,count\n1,1,1\n"), collapse::InputError);
}
