#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfork/analytic.hpp"
#include "sfork/multifork.hpp"

#ifndef SFORK_CLI_PATH
#error "SFORK_CLI_PATH must be defined"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string &args) {
  static int counter = 0;
  const std::filesystem::path out_path =
      std::filesystem::temp_directory_path() /
      ("sfork_cli_out_" + std::to_string(counter++) + ".txt");
  const std::string command = std::string(SFORK_CLI_PATH) + " " + args + " > " +
                              out_path.string() + " 2>/dev/null";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.out = buffer.str();
  std::filesystem::remove(out_path);
  return result;
}

std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

std::filesystem::path write_temp_trace(const std::string &content,
                                       const std::string &name) {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("analyze baseline values") {
  const CliResult result = run_cli("analyze --dist pareto:2,2 --n 400 --p 0");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0] ==
          std::vector<std::string>{"p", "r", "l", "latency", "cost"});
  CHECK(std::stod(rows[1][3]) == Catch::Approx(70.90).margin(0.01));
  CHECK(std::stod(rows[1][4]) == Catch::Approx(4.0).margin(1e-9));
}

TEST_CASE("simulate output is byte-identical for a fixed seed") {
  const std::string args =
      "simulate --dist sexp:1,1 --n 400 --p 0 --trials 2000 --seed 7";
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("csv round trip preserves nine significant digits") {
  const CliResult result =
      run_cli("analyze --dist pareto:2,2 --n 400 --p 0.25 --r 1 --l 0");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  const sfork::MetricsPair direct = sfork::metrics_general(
      sfork::pareto(2.0, 2.0), sfork::single_fork(0.25, 1, 0), 400);
  CHECK(std::abs(std::stod(rows[1][3]) - direct.latency) <=
        1e-8 * direct.latency);
  CHECK(std::abs(std::stod(rows[1][4]) - direct.cost) <= 1e-8 * direct.cost);
}

TEST_CASE("tradeoff sweep emits one row per grid point") {
  const CliResult result = run_cli(
      "tradeoff --dist pareto:2,2 --n 400 --r 1 --l 0 --grid 0.05:0.95:0.05");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 20);  // header + 19 points
  double min_latency = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    min_latency = std::min(min_latency, std::stod(rows[i][3]));
  }
  CHECK(min_latency < 20.0);  // far below the ~70.9 baseline
}

TEST_CASE("estimate runs on an ingested trace") {
  std::string content = "task_id,schedule_ts,finish_ts\n";
  for (int i = 0; i < 300; ++i) {
    content +=
        "t" + std::to_string(i) + ",0," + std::to_string(1.0 + i * 0.03) + "\n";
  }
  const auto path = write_temp_trace(content, "sfork_trace_ok.csv");
  const CliResult result =
      run_cli("estimate --dist trace:" + path.string() +
              " --n 100 --p 0.2 --r 1 --l 0 --m 50 --seed 5");
  std::filesystem::remove(path);
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][3]) > 0.0);
}

TEST_CASE("analyze on a trace points at the estimator path") {
  const auto path = write_temp_trace(
      "task_id,schedule_ts,finish_ts\na,0,1\nb,0,2\n", "sfork_trace_small.csv");
  const CliResult result =
      run_cli("analyze --dist trace:" + path.string() + " --p 0.5 --r 1 --l 0");
  std::filesystem::remove(path);
  CHECK(result.exit_code == 1);
}

TEST_CASE("exit codes distinguish usage and data errors") {
  CHECK(run_cli("analyze --dist weibull:1,2").exit_code == 1);
  CHECK(run_cli("analyze --dist pareto:2,2 --p 1.5").exit_code == 1);
  CHECK(run_cli("analyze --no-such-flag").exit_code == 1);
  CHECK(run_cli("estimate --dist trace:/does/not/exist.csv --p 0.2").exit_code ==
        2);

  const auto bad_header = write_temp_trace("id,begin,end\na,0,1\n",
                                           "sfork_trace_bad_header.csv");
  CHECK(run_cli("estimate --dist trace:" + bad_header.string() + " --p 0.2")
            .exit_code == 2);
  std::filesystem::remove(bad_header);
}

TEST_CASE("analyze evaluates multi-fork stage lists") {
  const CliResult result =
      run_cli("analyze --dist pareto:2,2 --n 400 --stages 0.25:1:0,0.1:1:0");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0] == std::vector<std::string>{"latency", "cost"});
  const sfork::MetricsPair direct = sfork::multi_fork_metrics(
      sfork::pareto(2.0, 2.0),
      sfork::multi_fork({{0.25, 1, 0}, {0.1, 1, 0}}), 400);
  CHECK(std::abs(std::stod(rows[1][0]) - direct.latency) <=
        1e-8 * direct.latency);
  CHECK(std::abs(std::stod(rows[1][1]) - direct.cost) <= 1e-8 * direct.cost);

  CHECK(run_cli("analyze --dist pareto:2,2 --stages 0.1:1:0,0.5:1:0")
            .exit_code == 1);  // fractions must decrease
}

TEST_CASE("json report carries the command echo and seed") {
  const CliResult result =
      run_cli("analyze --dist pareto:2,2 --n 400 --p 0 --out json --seed 42");
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("\"command\"") != std::string::npos);
  CHECK(result.out.find("\"seed\": 42") != std::string::npos);
  CHECK(result.out.find("\"latency\"") != std::string::npos);
  CHECK(result.out.find("\"wall_time_ms\"") != std::string::npos);
}
