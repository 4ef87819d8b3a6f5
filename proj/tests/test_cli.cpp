#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "wehrl/cli.hpp"

using namespace wehrl;
using cli::parse_config;
using cli::RunConfig;

namespace {

std::string temp_path(const std::string& tag) {
  return std::string("/tmp/wehrl_test_") + tag + "_" + std::to_string(::getpid());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: valid commands") {
  const RunConfig entropy =
      parse_config({"entropy", "--twice-j", "2", "--coeffs", "0,1.414213,0"});
  CHECK(entropy.command == "entropy");
  CHECK(entropy.twice_j == 2);
  CHECK(entropy.coeffs_text == "0,1.414213,0");

  const RunConfig minimize =
      parse_config({"minimize", "--twice-j", "3", "--seed", "42", "--starts", "50"});
  CHECK(minimize.command == "minimize");
  CHECK(minimize.seed == 42);
  CHECK(minimize.num_starts == 50);

  const RunConfig ode = parse_config({"ode", "--twice-j", "2", "--p", "2", "--q", "3", "--scan"});
  CHECK(ode.command == "ode");
  CHECK(ode.scan);
}

TEST_CASE("parse_config: usage errors") {
  CHECK_THROWS_AS(parse_config({"verify-norms", "--twice-j", "2", "--p", "0.5"}), cli::usage_error);
  CHECK_THROWS_AS(parse_config({"verify-norms", "--twice-j", "1", "--p", "2"}), cli::usage_error);
  CHECK_THROWS_AS(parse_config({"entropy", "--twice-j", "0"}), cli::usage_error);
  CHECK_THROWS_AS(parse_config({"entropy", "--bogus-flag", "1"}), cli::usage_error);
  CHECK_THROWS_AS(parse_config({"ode", "--twice-j", "2", "--p", "2", "--q", "1.5"}), cli::usage_error);
  CHECK_THROWS_AS(parse_config({}), cli::usage_error);
}

TEST_CASE("config file: defaults, overrides, unknown keys") {
  const std::string cfg_path = temp_path("cfg");
  {
    std::ofstream out(cfg_path);
    out << "# comment line\n";
    out << "twice-j = 3\n";
    out << "seed = 7\n";
  }
  const RunConfig from_file = parse_config({"minimize", "--config", cfg_path});
  CHECK(from_file.twice_j == 3);
  CHECK(from_file.seed == 7);

  // Explicit flags override the file.
  const RunConfig overridden = parse_config({"minimize", "--config", cfg_path, "--seed", "9"});
  CHECK(overridden.twice_j == 3);
  CHECK(overridden.seed == 9);

  {
    std::ofstream out(cfg_path);
    out << "not-a-real-key = 1\n";
  }
  CHECK_THROWS_AS(parse_config({"minimize", "--config", cfg_path}), cli::usage_error);

  {
    std::ofstream out(cfg_path);
    out << "this line has no equals sign\n";
  }
  CHECK_THROWS_AS(parse_config({"minimize", "--config", cfg_path}), cli::usage_error);
  std::remove(cfg_path.c_str());
}

TEST_CASE("entropy command writes the expected JSON schema") {
  const std::string out = temp_path("entropy");
  RunConfig cfg = parse_config({"entropy", "--twice-j", "2", "--coeffs",
                                "0,1.4142135623730951,0", "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  const std::string text = slurp(out);
  for (const char* key : {"\"twice_j\"", "\"wehrl\"", "\"renyi_values\"", "\"thm2_bound\"",
                          "\"lieb_bound\"", "\"slack_thm2\"", "\"slack_lieb\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
  // Keys are emitted in sorted order.
  CHECK(text.find("\"lieb_bound\"") < text.find("\"renyi_values\""));
  CHECK(text.find("\"renyi_values\"") < text.find("\"slack_lieb\""));
  std::remove(out.c_str());
}

TEST_CASE("entropy command csv format") {
  const std::string out = temp_path("entropy_csv");
  RunConfig cfg = parse_config({"entropy", "--twice-j", "2", "--random", "--seed", "3",
                                "--format", "csv", "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("twice_j,wehrl,thm2_bound,lieb_bound,slack_thm2,slack_lieb\n", 0) == 0);
  std::remove(out.c_str());
}

TEST_CASE("identical configurations give byte-identical output") {
  const std::string out1 = temp_path("rep1");
  const std::string out2 = temp_path("rep2");
  for (const auto& pair : {std::make_pair(out1, out1), std::make_pair(out2, out2)}) {
    RunConfig cfg = parse_config({"minimize", "--twice-j", "2", "--seed", "5", "--starts", "2",
                                  "--max-iters", "40", "--output", pair.first});
    REQUIRE(cli::run(cfg) == 0);
  }
  CHECK(slurp(out1) == slurp(out2));
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("minimize command reproduces the sharp j=1 value") {
  const std::string out = temp_path("min42");
  RunConfig cfg = parse_config({"minimize", "--twice-j", "2", "--seed", "42", "--starts", "8",
                                "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  const std::string text = slurp(out);
  const auto pos = text.find("\"best_value\":");
  REQUIRE(pos != std::string::npos);
  const double best = std::stod(text.substr(pos + 13));
  CHECK(std::abs(best - 2.0 / 3.0) <= 1e-4);
  std::remove(out.c_str());
}

TEST_CASE("verify-norms command: csv report, zero violations, exit 0") {
  const std::string out = temp_path("scan");
  RunConfig cfg = parse_config({"verify-norms", "--twice-j", "2", "--p", "2", "--n-max", "3",
                                "--samples", "100", "--seed", "1", "--format", "csv", "--output",
                                out});
  REQUIRE(cli::run(cfg) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("n,q,max_ratio,violations\n", 0) == 0);
  // Three rows, all with zero violations.
  CHECK(text.find(",0\n") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("carlen command at q = 2 reports the Schur constant") {
  const std::string out = temp_path("carlen");
  RunConfig cfg = parse_config({"carlen", "--twice-j", "2", "--q", "2", "--random", "--seed", "8",
                                "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"lhs\":0.1666666") != std::string::npos);
  CHECK(text.find("\"rule\":[64,128]") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("ode command: shoot csv and scan json") {
  const std::string out = temp_path("ode");
  RunConfig cfg = parse_config({"ode", "--twice-j", "2", "--p", "2", "--q", "3", "--format", "csv",
                                "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  CHECK(slurp(out).rfind("theta,u,du\n", 0) == 0);

  RunConfig scan = parse_config({"ode", "--twice-j", "2", "--p", "2", "--q", "3", "--scan",
                                 "--scan-points", "48", "--output", out});
  REQUIRE(cli::run(scan) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"admissible_u0\":[2.15165741") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("bounds and sweep commands") {
  const std::string out = temp_path("bounds");
  RunConfig cfg = parse_config({"bounds", "--twice-j", "3", "--format", "csv", "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  CHECK(slurp(out).rfind("twice_j,lieb_bound,thm2_bound,gap\n", 0) == 0);

  RunConfig sweep = parse_config({"sweep", "--twice-j-list", "2", "--p", "2", "--q-min", "2.5",
                                  "--q-max", "3.5", "--q-step", "0.5", "--samples", "40", "--seed",
                                  "2", "--output", out});
  REQUIRE(cli::run(sweep) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("twice_j,p,q,proven,max_ratio,violations\n", 0) == 0);
  // q = 3 is on the lattice for j = 1, q = 2.5 and 3.5 are not.
  CHECK(text.find(",3,1,") != std::string::npos);
  CHECK(text.find(",2.5,0,") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("state files round trip through the CLI") {
  const std::string state_path = temp_path("state");
  const SpinState f = random_state(3, 17);
  { std::ofstream(state_path) << io::state_to_json(f); }
  const SpinState back = io::state_from_json_text(slurp(state_path));
  REQUIRE(back.twice_j() == 3);
  for (int k = 0; k <= 3; ++k) REQUIRE(back.coeffs[k] == f.coeffs[k]);

  const std::string out = temp_path("state_out");
  RunConfig cfg = parse_config({"entropy", "--twice-j", "3", "--state-file", state_path,
                                "--output", out});
  REQUIRE(cli::run(cfg) == 0);
  std::remove(state_path.c_str());
  std::remove(out.c_str());
}

TEST_CASE("run maps failures to the exit-code contract") {
  // Missing state source: usage error surfaces as an exception from run.
  RunConfig cfg = parse_config({"entropy", "--twice-j", "2"});
  CHECK_THROWS_AS(cli::run(cfg), cli::usage_error);

  // Unwritable output path: numeric/it failure path (exit 3).
  RunConfig bad_out = parse_config({"bounds", "--twice-j", "2", "--output",
                                    "/nonexistent-dir/report.json"});
  CHECK(cli::run(bad_out) == 3);

  // Carlen with a tolerance the fractional-q residual cannot meet: exit 1.
  RunConfig strict = parse_config({"carlen", "--twice-j", "4", "--q", "2.5", "--random", "--seed",
                                   "12", "--tol", "1e-12", "--output", temp_path("c1")});
  CHECK(cli::run(strict) == 1);
  std::remove(temp_path("c1").c_str());
}
