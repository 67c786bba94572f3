#include <gtest/gtest.h>

#include <sstream>

#include "relosc/cli.hpp"

using namespace relosc;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "relosc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

}  // namespace

TEST(Cli, OmegaList) {
  EXPECT_EQ(cli::parse_omega_list("0.002:0.005:0.0005").size(), 7u);
  EXPECT_EQ(cli::parse_omega_list("0.002:0.005:0.0005").back(), "0.005");
  EXPECT_EQ(cli::parse_omega_list("0.002,0.004:0.005:0.001").size(), 3u);
  EXPECT_TRUE(cli::parse_omega_list("").empty());
  EXPECT_THROW(cli::parse_omega_list("-1"), cli::UsageError);
  EXPECT_THROW(cli::parse_omega_list("0.002:0.001:0.001"), cli::UsageError);
  EXPECT_THROW(cli::parse_omega_list("0.1:0.2"), cli::UsageError);
  EXPECT_THROW(cli::parse_omega_list("abc"), cli::UsageError);
}

TEST(Cli, LevelAndFrameLists) {
  EXPECT_EQ(cli::parse_level_list("0:3"), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(cli::parse_level_list("1,4"), (std::vector<int>{1, 4}));
  EXPECT_THROW(cli::parse_level_list("-1"), cli::UsageError);
  EXPECT_EQ(cli::parse_frame_list("r,t,d").size(), 3u);
  EXPECT_EQ(cli::parse_frame("translated"), cli::FrameKind::translated);
  EXPECT_THROW(cli::parse_frame("x"), cli::UsageError);
}

TEST(Cli, HarmonicLevels) {
  const auto r = run({"levels", "--omega", "1e-6", "--levels", "0:3", "--digits", "30", "--blocks", "40",
                      "--no-timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "omega");
  const size_t e = 5;
  EXPECT_EQ(rows[0][e], "E");
  for (int n = 0; n < 4; ++n) {
    EXPECT_EQ(rows[n + 1][2], "translated");
    EXPECT_NEAR(std::stod(rows[n + 1][e]), 2 * n + 1, 1e-4);
    EXPECT_EQ(rows[n + 1].back(), "");
  }
}

TEST(Cli, EmptyOmegaGivesHeader) {
  const auto r = run({"levels"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(csv_rows(r.out).size(), 1u);
  EXPECT_EQ(r.out.substr(r.out.size() - 2), "\r\n");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"verify", "thorough"}).code, 2);
  EXPECT_EQ(run({"levels", "--bogus"}).code, 2);
  EXPECT_EQ(run({"levels", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"levels", "--digits", "10"}).code, 2);
  EXPECT_EQ(run({"levels", "--y", "-1"}).code, 2);
  EXPECT_EQ(run({"levels", "--theta", "0.7"}).code, 2);
  EXPECT_EQ(run({"levels", "--omega", "0"}).code, 2);
  EXPECT_EQ(run({"levels", "--variant", "schrodinger"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, JsonRows) {
  const auto r = run({"levels", "--omega", "0.002", "--digits", "30", "--blocks", "40", "--format", "json",
                      "--no-timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["schema_version"], 1);
  EXPECT_EQ(j[0]["n"], 0);
  EXPECT_EQ(j[0]["basis_blocks"], 40);
  EXPECT_TRUE(j[0]["error"].is_null());
  EXPECT_TRUE(j[0]["wall_time_s"].is_null());
  EXPECT_NEAR(std::stod(j[0]["E"].get<std::string>()), 1.000501762, 1e-9);
}

TEST(Cli, SolverFailureRow) {
  const auto r = run({"levels", "--omega", "0.002", "--frame", "r", "--blocks", "2", "--digits", "30"});
  EXPECT_EQ(r.code, 1);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].back().rfind("NoPlateau", 0), 0u);
}

TEST(Cli, Reproducible) {
  const std::vector<std::string> args{"sweep", "--omega", "0.004", "--frame", "t,d", "--digits", "30", "--blocks",
                                      "40", "--no-timing"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(csv_rows(a.out).size(), 3u);
}

TEST(Cli, OutputFile) {
  const std::string path = ::testing::TempDir() + "relosc_cli_out.csv";
  const auto r = run({"levels", "--out", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path, std::ios::binary);
  std::string first;
  std::getline(f, first);
  EXPECT_EQ(first.rfind("omega,n,frame", 0), 0u);
}

TEST(Cli, DiagnosticsSingleOmegaWarns) {
  const auto r = run({"diagnostics", "--omega", "0.004", "--digits", "40", "--blocks", "60", "--curve-step", "30",
                      "--no-timing"});
  EXPECT_NE(r.err.find("warning: fits need at least two omega values"), std::string::npos);
  const auto rows = csv_rows(r.out);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "kind");
}
