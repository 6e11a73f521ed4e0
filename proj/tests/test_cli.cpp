// Runs the fraclyap binary and checks exit codes and report contents.

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include <fraclyap/io/report.hpp>

using fraclyap::io::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(FRACLYAP_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    return r;
  }
  std::array<char, 4096> buf{};
  while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) {
    r.out.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string spec(const char* name) { return std::string(FRACLYAP_SPECS) + "/" + name; }

json run_json(const std::string& args, int expected_code) {
  const auto r = run(args + " --json");
  EXPECT_EQ(r.code, expected_code) << args;
  json doc = json::parse(r.out);
  const auto errors = fraclyap::io::validate_report(doc);
  EXPECT_TRUE(errors.empty()) << args << ": " << (errors.empty() ? "" : errors.front());
  return doc;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

} // namespace

TEST(Cli, Constants) {
  const json doc = run_json("constants --spec " + spec("example1.json"), 0);
  EXPECT_NEAR(doc["constants"]["gamma"].get<double>(), 4.514, 0.002);
  EXPECT_NEAR(doc["constants"]["gamma_star"].get<double>(), 26.459, 0.05);
  EXPECT_NEAR(doc["constants"]["lambda"].get<double>(), 0.64645, 1e-4);
  EXPECT_EQ(doc["settings"]["quadrature"]["rule"], "G7K15");
}

TEST(Cli, ShiftedSpecMatches) {
  const json base = run_json("constants --spec " + spec("example1.json"), 0);
  const json shifted = run_json("constants --spec " + spec("example1_shifted.json"), 0);
  for (const char* key : {"gamma", "gamma_star"}) {
    EXPECT_NEAR(shifted["constants"][key].get<double>() / base["constants"][key].get<double>(),
                1.0, 1e-8);
  }
  EXPECT_NEAR(shifted["constants"]["lambda"].get<double>() - 1.0,
              base["constants"]["lambda"].get<double>(), 1e-8);
}

TEST(Cli, ClassicalConstants) {
  const auto path =
      write_temp("classical.json", R"js({"a":0,"b":1,"alpha":2,"q":"1","f":"exp(y)"})js");
  const json doc = run_json("constants --spec " + path, 0);
  EXPECT_NEAR(doc["constants"]["gamma"].get<double>(), 6.0, 1e-9);
}

TEST(Cli, Existence) {
  const json ok = run_json("existence --spec " + spec("example1.json"), 0);
  EXPECT_EQ(ok["certificate"]["conclusion"], "exists");
  const auto zero = write_temp("zero_f.json", R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"0"})js");
  const json none = run_json("existence --spec " + zero + " --r1 1/27 --r2 1", 1);
  EXPECT_EQ(none["certificate"]["conclusion"], "not-certified");
  const json searched = run_json("existence --spec " + spec("example2.json") + " --search", 0);
  EXPECT_TRUE(searched["search"]["found"].get<bool>());
  EXPECT_EQ(searched["certificate"]["conclusion"], "exists");
}

TEST(Cli, Lyapunov) {
  const json cor =
      run_json("lyapunov --spec " + spec("example2.json") + " --r1 1/40 --r2 1", 0);
  EXPECT_NEAR(cor["lyapunov"]["bound"].get<double>(), 4.0334e-2, 1e-5);
  EXPECT_EQ(cor["lyapunov"]["variant"], "corollary");
  const json solved = run_json("lyapunov --spec " + spec("example2.json"), 0);
  EXPECT_EQ(solved["source"], "solved");
  EXPECT_TRUE(solved["lyapunov"]["inequality_holds"].get<bool>());
  const auto ident =
      write_temp("ident.json", R"js({"a":0,"b":2,"alpha":1.5,"q":"t","f":"y"})js");
  const json rf = run_json("lyapunov --spec " + ident + " --eta 0.7", 0);
  EXPECT_NEAR(rf["lyapunov"]["bound"].get<double>(),
              rf["lyapunov"]["riemann_fractional_reference"].get<double>(), 1e-12);
}

TEST(Cli, SolveWithCsv) {
  const std::string csv = ::testing::TempDir() + "sol.csv";
  const json doc = run_json("solve --spec " + spec("example1.json") + " --csv " + csv, 0);
  EXPECT_EQ(doc["solution"]["status"], "converged");
  const double eta = doc["solution"]["eta"].get<double>();
  EXPECT_GE(eta, 1.0 / 27.0);
  EXPECT_LE(eta, 1.0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,y");
}

TEST(Cli, NonConvergenceExitCode) {
  const auto path = write_temp(
      "slow.json",
      R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"exp(y)","solver":{"n":64,"max_iter":2}})js");
  const json doc = run_json("solve --spec " + path, 4);
  EXPECT_EQ(doc["solution"]["status"], "max-iterations");
}

TEST(Cli, ErrorExitCodes) {
  EXPECT_EQ(run("solve").code, 2);
  EXPECT_EQ(run("constants --spec /nonexistent.json").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  const auto typo =
      write_temp("typo.json", R"js({"a":0,"b":1,"aplha":1.5,"q":"t","f":"exp(y)"})js");
  EXPECT_EQ(run("constants --spec " + typo).code, 2);
  const auto negq = write_temp("negq.json", R"js({"a":0,"b":1,"alpha":1.5,"q":"t-1","f":"exp(y)"})js");
  EXPECT_EQ(run("constants --spec " + negq).code, 2);
  EXPECT_EQ(run("existence --spec " + spec("example1.json") + " --r1 2 --r2 1").code, 2);
  const auto domain = write_temp("domain.json", R"js({"a":0,"b":1,"alpha":1.5,"q":"t","f":"ln(y)"})js");
  EXPECT_EQ(run("solve --spec " + domain).code, 3);
  EXPECT_EQ(run("--help").code, 0);
}
