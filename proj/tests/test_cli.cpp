// Copyright 2026 The madfold Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "madfold/cli/commands.hpp"
#include "madfold/cli/report.hpp"

using namespace madfold::cli;
using nlohmann::json;

namespace {

std::filesystem::path temp_path(const std::string& suffix) {
  static int counter = 0;
  return std::filesystem::temp_directory_path() /
         ("madfold_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix);
}

class TempFile {
 public:
  explicit TempFile(const std::string& content) : path_(temp_path(".csv")) {
    std::ofstream(path_, std::ios::binary) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string blobs_csv() {
  std::string text = "a,b\n";
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int i = 0; i < 200; ++i) {
    const double c = i % 2 ? 5.0 : 0.0;
    text += std::to_string(c + g(rng)) + "," + std::to_string(c + g(rng)) + "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("linregr emits the regression record") {
  const TempFile f("x,y\n0,1\n1,2\n2,4\n");
  const auto r = run_cli({"--data", f.path(), "--label", "y", "--intercept", "--json", "linregr"});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto report = json::parse(r.out);
  CHECK(report["command"] == "linregr");
  CHECK(report["dataset"]["n"] == 3);
  CHECK(report["dataset"]["d"] == 2);
  const auto& res = report["result"];
  for (const char* key : {"coef", "r2", "std_err", "t_stats", "p_values", "condition_no"}) {
    CHECK(res.contains(key));
  }
  // Cramer's rule on X^T X = [[3,3],[3,5]], X^T y = (7,10)
  CHECK(res["coef"][0].get<double>() == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(res["coef"][1].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(res["r2"].get<double>() == doctest::Approx(27.0 / 28.0).epsilon(1e-12));
}

TEST_CASE("text output") {
  const TempFile f("x,y\n0,1\n1,2\n2,4\n");
  const auto r = run_cli({"--data", f.path(), "--label", "y", "--intercept", "linregr"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0.833333") != std::string::npos);
  CHECK(r.out.find("r2") != std::string::npos);
}

TEST_CASE("kmeans with more clusters than points is an argument error") {
  const TempFile f("a,b\n0,0\n1,1\n");
  const auto r = run_cli({"--data", f.path(), "--json", "kmeans", "--k", "3"});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  const auto e = json::parse(r.err);
  CHECK(e["error"]["kind"] == "argument_error");
}

TEST_CASE("separable logistic data exits 2") {
  const TempFile f("x,y\n-2,0\n-1,0\n-0.5,0\n0.5,1\n1,1\n2,1\n");
  const auto r = run_cli({"--data", f.path(), "--label", "y", "--intercept", "--json", "logregr"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  const auto e = json::parse(r.err);
  CHECK(e["error"]["kind"] == "perfect_separation_error");
  CHECK(e["error"]["message"].get<std::string>().find("separation") != std::string::npos);
}

TEST_CASE("iteration cap reports an unconverged result with exit 2") {
  std::string text = "x,y\n";
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const double x = std::uniform_real_distribution<double>(-2, 2)(rng);
    const double y = std::uniform_real_distribution<double>(0, 1)(rng) < 1 / (1 + std::exp(-x));
    text += std::to_string(x) + "," + std::to_string(static_cast<int>(y)) + "\n";
  }
  const TempFile f(text);
  const auto r = run_cli({"--data", f.path(), "--label", "y", "--intercept", "--json",
                          "logregr", "--max-iter", "1"});
  CHECK(r.code == 2);
  const auto report = json::parse(r.out);
  CHECK(report["converged"] == false);
  CHECK(report["ledger"]["iterations"] == 1);
}

TEST_CASE("seed fully determines stochastic output") {
  const TempFile f(blobs_csv());
  for (const char* p : {"1", "3"}) {
    std::vector<std::string> args{"--data", f.path(), "--seed", "7", "--partitions", p,
                                  "--json", "kmeans", "--k", "2"};
    const auto a = run_cli(args), b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(without_timing(json::parse(a.out)) == without_timing(json::parse(b.out)));
  }
  std::vector<std::string> sgd{"--data", f.path(), "--label", "b", "--seed", "3", "--json",
                               "sgd", "--objective", "least_squares", "--alpha0", "1e-4",
                               "--epochs", "5"};
  const auto a = run_cli(sgd), b = run_cli(sgd);
  REQUIRE(a.code == 0);
  CHECK(without_timing(json::parse(a.out)) == without_timing(json::parse(b.out)));
}

TEST_CASE("failures print one whole error object and nothing on stdout") {
  const TempFile bad("x,y\n1,2\nabc,3\n");
  const std::vector<std::vector<std::string>> cases = {
      {"--data", "/nonexistent.csv", "--label", "y", "--json", "linregr"},
      {"--data", bad.path(), "--label", "y", "--features", "x", "--json", "linregr"},
      {"--json", "linregr", "--bogus"},
      {"--json", "nosuchcommand"},
      {"--json", "sgd", "--objective", "ridge"},
  };
  for (const auto& args : cases) {
    const auto r = run_cli(args);
    CHECK(r.code == 1);
    CHECK(r.out.empty());
    const auto e = json::parse(r.err);  // throws on partial output
    CHECK(e.contains("error"));
    CHECK(e["error"].contains("kind"));
    CHECK(e["error"].contains("message"));
  }
}

TEST_CASE("help exits cleanly") {
  const auto r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("linregr") != std::string::npos);
}

TEST_CASE("sketch state survives save and load") {
  const TempFile f("item\napple\npear\napple\nfig\napple\n");
  const auto state = temp_path(".cm");
  auto r = run_cli({"--data", f.path(), "--json", "sketch", "cm", "--query", "apple", "--save",
                    state.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["queries"][0]["estimate"] == 3);
  r = run_cli({"--json", "sketch", "cm", "--load", state.string(), "--query", "apple", "--query",
               "fig"});
  REQUIRE(r.code == 0);
  const auto res = json::parse(r.out)["result"];
  CHECK(res["total"] == 5);
  CHECK(res["queries"][0]["estimate"] == 3);
  CHECK(res["queries"][1]["estimate"] >= 1);
  // loading plus new data merges the two
  r = run_cli({"--data", f.path(), "--json", "sketch", "cm", "--load", state.string(),
               "--query", "apple"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["queries"][0]["estimate"] == 6);
  std::filesystem::remove(state);

  r = run_cli({"--data", f.path(), "--json", "sketch", "fm"});
  REQUIRE(r.code == 0);
  const double est = json::parse(r.out)["result"]["estimate"].get<double>();
  CHECK(est > 1.5);
  CHECK(est < 6.0);
}

TEST_CASE("sgd maps 0/1 labels for classification objectives") {
  const TempFile f("x,y\n-1,0\n-0.5,0\n0.5,1\n1,1\n");
  const auto r = run_cli({"--data", f.path(), "--label", "y", "--json", "sgd", "--objective",
                          "logistic", "--alpha0", "0.01", "--epochs", "3"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["x"][0].get<double>() > 0.0);
}

TEST_CASE("bench produces a table and identical payloads") {
  const auto r = run_cli({"--seed", "2", "--json", "bench", "--vars", "2,4", "--rows", "5000",
                          "--threads", "1,2", "--repeats", "3"});
  REQUIRE(r.code == 0);
  const auto res = json::parse(r.out);
  CHECK(res["cells"].size() == 4);
  for (const auto& cell : res["cells"]) {
    CHECK(cell["payloads_identical"] == true);
    CHECK(cell["seconds"].size() == 3);
  }
  CHECK(res["fits"].size() == 2);
  CHECK(res["speedups"].size() == 4);

  const auto text = run_cli({"bench", "--vars", "2", "--rows", "1000", "--threads", "1"});
  REQUIRE(text.code == 0);
  CHECK(text.out.find("variables") != std::string::npos);
}

TEST_CASE("bench refuses sizes that do not fit in memory") {
  const auto r = run_cli({"--json", "bench", "--vars", "80", "--rows", "1000000000000"});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(json::parse(r.err)["error"]["kind"] == "sizing_error");
}
