// Command-line front end: analyze (closed forms / multi-fork), simulate
// (Monte-Carlo), estimate (sampling-based), optimize (policy search), and
// tradeoff (p sweeps), over parametric models or ingested traces.
//
// Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
// malformed trace). All values are reproducible from (flags, input files,
// seed); CSV output carries no timing metadata so reruns are byte-identical.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfork/sfork.hpp"

namespace {

using nlohmann::json;
using namespace sfork;

constexpr std::uint64_t kDefaultSeed = 12345;

struct CommonOptions {
  std::string dist_spec = "pareto:2,2";
  std::string trace_unit = "seconds";
  std::string seed_spec = "12345";
  std::string out_format = "csv";
  long n = 400;
  double p = 0.0;
  int r = 0;
  int l = 1;
};

void add_common_flags(CLI::App *cmd, CommonOptions &opt) {
  cmd->add_option("--dist", opt.dist_spec,
                  "pareto:alpha,xm | sexp:delta,lambda | trace:path");
  cmd->add_option("--trace-unit", opt.trace_unit,
                  "trace timestamps: seconds | micros")
      ->check(CLI::IsMember({"seconds", "micros"}));
  cmd->add_option("--n", opt.n, "number of tasks in the job");
  cmd->add_option("--p", opt.p, "straggler fraction");
  cmd->add_option("--r", opt.r, "replicas added per straggler");
  cmd->add_option("--l", opt.l, "0 = relaunch original, 1 = keep it");
  cmd->add_option("--seed", opt.seed_spec, "integer seed, or 'random'");
  cmd->add_option("--out", opt.out_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::uint64_t resolve_seed(const std::string &spec) {
  if (spec == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  try {
    return std::stoull(spec);
  } catch (const std::exception &) {
    throw CLI::ValidationError("--seed", "expected an integer or 'random'");
  }
}

DistributionModel resolve_dist(const CommonOptions &opt,
                               json *trace_report = nullptr) {
  const auto colon = opt.dist_spec.find(':');
  const std::string tag = opt.dist_spec.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : opt.dist_spec.substr(colon + 1);
  const auto two_numbers = [&](const char *what) {
    const auto comma = args.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument(std::string("--dist ") + what +
                                  " needs two comma-separated parameters");
    }
    return std::pair<double, double>{std::stod(args.substr(0, comma)),
                                     std::stod(args.substr(comma + 1))};
  };
  if (tag == "pareto") {
    const auto [alpha, xm] = two_numbers("pareto:alpha,xm");
    return pareto(alpha, xm);
  }
  if (tag == "sexp") {
    const auto [delta, lambda] = two_numbers("sexp:delta,lambda");
    return shifted_exponential(delta, lambda);
  }
  if (tag == "trace") {
    const TimestampUnit unit = opt.trace_unit == "micros"
                                   ? TimestampUnit::microseconds
                                   : TimestampUnit::seconds;
    TraceIngestResult ingest = ingest_trace_file(args, unit);
    if (trace_report) {
      (*trace_report)["accepted_rows"] = ingest.accepted_rows;
      (*trace_report)["rejected_rows"] = ingest.rejected_rows;
      (*trace_report)["rejected_row_numbers"] = ingest.rejected_row_numbers;
    }
    if (ingest.rejected_rows > 0) {
      std::cerr << "trace: skipped " << ingest.rejected_rows
                << " invalid row(s)\n";
    }
    return ingest.model;
  }
  throw std::invalid_argument("unknown distribution tag: " + tag);
}

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string &spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
      step <= 0.0) {
    throw std::invalid_argument("--grid expects start:stop:step with step > 0");
  }
  std::vector<double> grid;
  for (double x = start; x <= stop + 1e-12; x += step) grid.push_back(x);
  if (grid.empty()) throw std::invalid_argument("--grid produced no points");
  return grid;
}

json policy_json(const SingleForkPolicy &pi) {
  return {{"p", pi.p}, {"r", pi.r}, {"l", pi.l}};
}

// RunReport envelope shared by every command (JSON output only; CSV stays
// free of the wall-time metadata).
void emit_json(const std::string &command_echo, const json &config,
               std::uint64_t seed, const json &payload, double wall_ms) {
  const json report = {{"command", command_echo}, {"config", config},
                       {"seed", seed},           {"payload", payload},
                       {"wall_time_ms", wall_ms}};
  std::cout << report.dump(2) << "\n";
}

struct StageSpecList {
  std::string raw;
  std::vector<ForkStage> parse() const {
    std::vector<ForkStage> stages;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      ForkStage s;
      char sep1 = 0, sep2 = 0;
      if (std::sscanf(item.c_str(), "%lf%c%d%c%d", &s.p, &sep1, &s.r, &sep2,
                      &s.l) != 5 ||
          sep1 != ':' || sep2 != ':') {
        throw std::invalid_argument("--stages expects p:r:l[,p:r:l...]");
      }
      stages.push_back(s);
    }
    return stages;
  }
};

int run_analyze(const CommonOptions &opt, const StageSpecList &stages,
                const std::string &echo) {
  const auto t0 = std::chrono::steady_clock::now();
  json trace_report;
  const DistributionModel base = resolve_dist(opt, &trace_report);
  const std::uint64_t seed = resolve_seed(opt.seed_spec);

  json payload;
  MetricsPair metrics;
  if (!stages.raw.empty()) {
    const MultiForkPolicy mf = multi_fork(stages.parse());
    metrics = multi_fork_metrics(base, mf, opt.n);
    json stage_list = json::array();
    for (const auto &s : mf.stages) {
      stage_list.push_back({{"p", s.p}, {"r", s.r}, {"l", s.l}});
    }
    payload["stages"] = stage_list;
  } else {
    const SingleForkPolicy pi = single_fork(opt.p, opt.r, opt.l);
    const StageMetrics sm = stage_metrics(base, pi, opt.n);
    metrics = sm.totals();
    payload["policy"] = policy_json(pi);
    payload["stage_breakdown"] = {
        {"t1", sm.t1}, {"t2", sm.t2}, {"c1", sm.c1}, {"c2", sm.c2}};
  }
  payload["latency"] = metrics.latency;
  payload["cost"] = metrics.cost;
  if (!trace_report.is_null()) payload["trace"] = trace_report;

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  if (opt.out_format == "json") {
    emit_json(echo, {{"n", opt.n}}, seed, payload, wall_ms);
  } else if (!stages.raw.empty()) {
    std::cout << "latency,cost\n"
              << fmt9(metrics.latency) << "," << fmt9(metrics.cost) << "\n";
  } else {
    std::cout << "p,r,l,latency,cost\n"
              << fmt9(opt.p) << "," << opt.r << "," << opt.l << ","
              << fmt9(metrics.latency) << "," << fmt9(metrics.cost) << "\n";
  }
  return 0;
}

int run_simulate(const CommonOptions &opt, long trials, const std::string &echo) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistributionModel base = resolve_dist(opt);
  const std::uint64_t seed = resolve_seed(opt.seed_spec);
  const SingleForkPolicy pi = single_fork(opt.p, opt.r, opt.l);
  const MonteCarloResult mc = monte_carlo(base, pi, opt.n, trials, SplitRng(seed));

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  if (opt.out_format == "json") {
    json payload = {{"policy", policy_json(pi)},
                    {"latency", mc.mean.latency},
                    {"cost", mc.mean.cost},
                    {"trials", mc.trials}};
    if (mc.standard_error) {
      payload["latency_se"] = mc.standard_error->latency;
      payload["cost_se"] = mc.standard_error->cost;
    }
    emit_json(echo, {{"n", opt.n}, {"trials", trials}}, seed, payload, wall_ms);
  } else {
    std::cout << "p,r,l,latency,cost,latency_se,cost_se\n";
    std::cout << fmt9(opt.p) << "," << opt.r << "," << opt.l << ","
              << fmt9(mc.mean.latency) << "," << fmt9(mc.mean.cost);
    if (mc.standard_error) {
      std::cout << "," << fmt9(mc.standard_error->latency) << ","
                << fmt9(mc.standard_error->cost);
    } else {
      std::cout << ",,";
    }
    std::cout << "\n";
  }
  return 0;
}

int run_estimate(const CommonOptions &opt, long m, const std::string &echo) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistributionModel base = resolve_dist(opt);
  const std::uint64_t seed = resolve_seed(opt.seed_spec);
  const SingleForkPolicy pi = single_fork(opt.p, opt.r, opt.l);
  const EstimatedMetrics est = estimate_metrics(base, pi, {opt.n, m, seed});

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  if (opt.out_format == "json") {
    json payload = {{"policy", policy_json(pi)},
                    {"latency", est.latency},
                    {"cost", est.cost},
                    {"repetitions", m}};
    if (est.latency_se) payload["latency_se"] = *est.latency_se;
    if (est.cost_se) payload["cost_se"] = *est.cost_se;
    emit_json(echo, {{"n", opt.n}, {"m", m}}, seed, payload, wall_ms);
  } else {
    std::cout << "p,r,l,latency,cost,latency_se,cost_se\n";
    std::cout << fmt9(opt.p) << "," << opt.r << "," << opt.l << ","
              << fmt9(est.latency) << "," << fmt9(est.cost) << ",";
    if (est.latency_se) std::cout << fmt9(*est.latency_se);
    std::cout << ",";
    if (est.cost_se) std::cout << fmt9(*est.cost_se);
    std::cout << "\n";
  }
  return 0;
}

int run_optimize(const CommonOptions &opt, const SearchConfig &cfg_in,
                 const std::string &echo) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistributionModel base = resolve_dist(opt);
  const std::uint64_t seed = resolve_seed(opt.seed_spec);
  SearchConfig cfg = cfg_in;
  cfg.n = opt.n;
  const SearchResult result = best_single_fork(base, cfg, SplitRng(seed));

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  if (opt.out_format == "json") {
    json trajectory = json::array();
    for (const auto &step : result.trajectory) {
      trajectory.push_back({{"iteration", step.iteration},
                            {"policy", policy_json(step.policy)},
                            {"J", step.j}});
    }
    const json payload = {
        {"best",
         {{"policy", policy_json(result.best.policy)},
          {"latency", result.best.metrics.latency},
          {"cost", result.best.metrics.cost},
          {"J", result.best.j}}},
        {"baseline",
         {{"latency", result.baseline.metrics.latency},
          {"cost", result.baseline.metrics.cost},
          {"J", result.baseline.j}}},
        {"replica_cap_hit", result.replica_cap_hit},
        {"trajectory", trajectory}};
    emit_json(echo,
              {{"n", opt.n},
               {"mu", cfg.mu},
               {"delta_p", cfg.delta_p},
               {"k", cfg.iterations},
               {"m", cfg.repetitions}},
              seed, payload, wall_ms);
  } else {
    std::cout << "tag,iteration,p,r,l,latency,cost,J\n";
    std::cout << "baseline,0," << fmt9(result.baseline.policy.p) << ","
              << result.baseline.policy.r << "," << result.baseline.policy.l
              << "," << fmt9(result.baseline.metrics.latency) << ","
              << fmt9(result.baseline.metrics.cost) << ","
              << fmt9(result.baseline.j) << "\n";
    for (const auto &step : result.trajectory) {
      std::cout << "step," << step.iteration << "," << fmt9(step.policy.p)
                << "," << step.policy.r << "," << step.policy.l << ",,,"
                << fmt9(step.j) << "\n";
    }
    std::cout << "best,," << fmt9(result.best.policy.p) << ","
              << result.best.policy.r << "," << result.best.policy.l << ","
              << fmt9(result.best.metrics.latency) << ","
              << fmt9(result.best.metrics.cost) << "," << fmt9(result.best.j)
              << "\n";
  }
  return 0;
}

int run_tradeoff(const CommonOptions &opt, const std::string &grid_spec,
                 const std::string &method, long m, const std::string &echo) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistributionModel base = resolve_dist(opt);
  const std::uint64_t seed = resolve_seed(opt.seed_spec);
  const std::vector<double> grid = parse_grid(grid_spec);

  json rows = json::array();
  std::ostringstream csv;
  std::size_t failed = 0;
  if (method == "analytic") {
    csv << "p,r,l,latency,cost\n";
    for (const auto &pt : tradeoff_curve(base, opt.r, opt.l, opt.n, grid)) {
      if (!pt.metrics) {
        ++failed;
        std::cerr << "tradeoff: p=" << pt.p << ": " << pt.error << "\n";
        continue;
      }
      csv << fmt9(pt.p) << "," << opt.r << "," << opt.l << ","
          << fmt9(pt.metrics->latency) << "," << fmt9(pt.metrics->cost) << "\n";
      rows.push_back({{"p", pt.p},
                      {"latency", pt.metrics->latency},
                      {"cost", pt.metrics->cost}});
    }
  } else {
    csv << "p,r,l,latency,cost,latency_se,cost_se\n";
    const SplitRng rng(seed);
    std::uint64_t stream = 0;
    for (double p : grid) {
      EstimatedMetrics est;
      try {
        est = estimate_metrics_with(base, SingleForkPolicy{p, opt.r, opt.l},
                                    opt.n, m, rng.split(stream++));
      } catch (const std::exception &e) {
        ++failed;
        std::cerr << "tradeoff: p=" << p << ": " << e.what() << "\n";
        continue;
      }
      csv << fmt9(p) << "," << opt.r << "," << opt.l << "," << fmt9(est.latency)
          << "," << fmt9(est.cost) << ",";
      if (est.latency_se) csv << fmt9(*est.latency_se);
      csv << ",";
      if (est.cost_se) csv << fmt9(*est.cost_se);
      csv << "\n";
      json row = {{"p", p}, {"latency", est.latency}, {"cost", est.cost}};
      if (est.latency_se) row["latency_se"] = *est.latency_se;
      if (est.cost_se) row["cost_se"] = *est.cost_se;
      rows.push_back(row);
    }
  }
  if (failed > 0) {
    std::cerr << "tradeoff: " << failed << " grid point(s) failed\n";
  }

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  if (opt.out_format == "json") {
    emit_json(echo,
              {{"n", opt.n},
               {"r", opt.r},
               {"l", opt.l},
               {"grid", grid_spec},
               {"method", method}},
              seed, {{"points", rows}, {"failed_points", failed}}, wall_ms);
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{
      "Latency/cost analysis, simulation and policy search for single-fork "
      "straggler replication"};
  app.require_subcommand(1);

  std::ostringstream echo_stream;
  for (int i = 0; i < argc; ++i) echo_stream << (i ? " " : "") << argv[i];
  const std::string echo = echo_stream.str();

  CommonOptions analyze_opt, simulate_opt, estimate_opt, optimize_opt,
      tradeoff_opt;
  StageSpecList stages;
  long trials = 10000;
  long estimate_m = 500;
  long tradeoff_m = 500;
  std::string grid_spec = "0.05:0.95:0.05";
  std::string tradeoff_method = "analytic";
  SearchConfig search_cfg;
  search_cfg.repetitions = 500;
  search_cfg.iterations = 25;
  search_cfg.delta_p = 0.002;

  CLI::App *analyze = app.add_subcommand(
      "analyze", "closed-form latency and cost of a policy");
  add_common_flags(analyze, analyze_opt);
  analyze->add_option("--stages", stages.raw,
                      "multi-fork stages as p:r:l[,p:r:l...]");

  CLI::App *simulate =
      app.add_subcommand("simulate", "Monte-Carlo latency and cost");
  add_common_flags(simulate, simulate_opt);
  simulate->add_option("--trials", trials, "independent job realizations");

  CLI::App *estimate =
      app.add_subcommand("estimate", "sampling-based latency/cost estimates");
  add_common_flags(estimate, estimate_opt);
  estimate->add_option("--m", estimate_m, "sampling repetitions");

  CLI::App *optimize =
      app.add_subcommand("optimize", "heuristic search for the best policy");
  add_common_flags(optimize, optimize_opt);
  optimize->add_option("--mu", search_cfg.mu, "cost weight in J = T + mu*C");
  optimize->add_option("--m", search_cfg.repetitions, "sampling repetitions");
  optimize->add_option("--k", search_cfg.iterations, "outer iterations");
  optimize->add_option("--delta-p", search_cfg.delta_p, "gradient step size");
  optimize->add_option("--r-max", search_cfg.r_max, "replica cap");

  CLI::App *tradeoff =
      app.add_subcommand("tradeoff", "latency/cost curve along a p grid");
  add_common_flags(tradeoff, tradeoff_opt);
  tradeoff->add_option("--grid", grid_spec, "p grid as start:stop:step");
  tradeoff->add_option("--method", tradeoff_method, "analytic | estimate")
      ->check(CLI::IsMember({"analytic", "estimate"}));
  tradeoff->add_option("--m", tradeoff_m,
                       "sampling repetitions (estimate method)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) return run_analyze(analyze_opt, stages, echo);
    if (simulate->parsed()) return run_simulate(simulate_opt, trials, echo);
    if (estimate->parsed()) return run_estimate(estimate_opt, estimate_m, echo);
    if (optimize->parsed()) return run_optimize(optimize_opt, search_cfg, echo);
    if (tradeoff->parsed()) {
      return run_tradeoff(tradeoff_opt, grid_spec, tradeoff_method, tradeoff_m,
                          echo);
    }
  } catch (const TraceError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
