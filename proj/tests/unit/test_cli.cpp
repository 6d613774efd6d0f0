#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(RWM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, CurveRowsAndHeader) {
  const auto r = run("curve gaussian gaussian --dim 10 --lambda-min 0.05 --lambda-max 5 --points 200");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"lambda", "ear", "esjd", "converged"}));
}

TEST(Cli, CsvAndJsonAgree) {
  const std::string args = "optimize laplace laplace --dim 1";
  const auto c = run(args);
  const auto j = run("--format json " + args);
  ASSERT_EQ(c.code, 0);
  ASSERT_EQ(j.code, 0);
  const auto rows = csv(c.out);
  ASSERT_EQ(rows.size(), 2u);
  const auto doc = nlohmann::json::parse(j.out);
  const auto& rec = doc.contains("rows") ? doc["rows"][0] : doc;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    const auto& v = rec.at(rows[0][i]);
    if (v.is_number_float()) EXPECT_EQ(std::stod(rows[1][i]), v.get<double>()) << rows[0][i];
  }
  EXPECT_NEAR(std::stod(rows[1][1]), 4.0, 1e-3);
  EXPECT_NEAR(std::stod(rows[1][2]), 1.0 / 3.0, 1e-4);
}

TEST(Cli, AsymptoticExponential) {
  const auto r = run("--format json asymptotic --mixing exp");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc.at("mu_hat").get<double>(), 2.86, 0.01);
  EXPECT_NEAR(doc.at("aoa").get<double>(), 0.055, 0.002);
}

TEST(Cli, DeterministicSimulation) {
  const std::string args = "--seed 11 --format json simulate gaussian gaussian --dim 3 --lambda 1.2 --iters 20000";
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run("--seed 12 --format json simulate gaussian gaussian --dim 3 --lambda 1.2 --iters 20000").out);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("curve gaussian gaussian --lambda-min 1 --lambda-max 1").code, 2);
  EXPECT_EQ(run("curve nosuch gaussian").code, 2);
  EXPECT_EQ(run("optimize gaussian gaussian --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--format xml curve gaussian gaussian").code, 2);
  EXPECT_EQ(run("sweep gaussian gaussian --dims 0:3:lin2").code, 2);
}

TEST(Cli, NumericalFailureExitsThree) {
  EXPECT_EQ(run("optimize gaussian gaussian --dim 1 --lambda-min 10 --lambda-max 1000 --grid 64").code, 3);
}

TEST(Cli, SweepColumns) {
  const auto r = run("sweep gaussian gaussian --dims 2,10 --grid 64");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"d", "lambda_hat", "ear_hat", "esjd_hat", "n_local_maxima",
                                               "corollary4_lambda", "status"}));
}
