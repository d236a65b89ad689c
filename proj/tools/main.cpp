// Command-line front end for the b-matching preference library. Talks to the
// library exclusively through the C interface in bmatch.h; JSON/CSV plumbing
// for its own reports lives here.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bmatch.h"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitPrecondition = 2;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int exit_code, const std::string& message) {
  throw CliError{exit_code, message};
}

[[noreturn]] void fail_status(const std::string& context) {
  fail(kExitPrecondition, context + ": " + bm_last_error());
}

void check(bm_status status, const std::string& context) {
  if (status != BM_OK) fail_status(context);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitPrecondition, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitPrecondition, "cannot write " + path);
  out << text;
  if (!out) fail(kExitPrecondition, "write failed for " + path);
}

struct StringFree {
  void operator()(char* p) const { bm_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringFree>;

struct IdsFree {
  void operator()(uint32_t* p) const { bm_ids_free(p); }
};
using OwnedIds = std::unique_ptr<uint32_t, IdsFree>;

struct InstanceFree {
  void operator()(bm_instance* p) const { bm_instance_free(p); }
};
using OwnedInstance = std::unique_ptr<bm_instance, InstanceFree>;

struct ConfigFree {
  void operator()(bm_config* p) const { bm_config_free(p); }
};
using OwnedConfig = std::unique_ptr<bm_config, ConfigFree>;

struct RunFree {
  void operator()(bm_run* p) const { bm_run_free(p); }
};
using OwnedRun = std::unique_ptr<bm_run, RunFree>;

OwnedInstance load_instance(const std::string& path) {
  const std::string text = slurp(path);
  bm_instance* raw = nullptr;
  check(bm_instance_parse(text.c_str(), &raw), path);
  return OwnedInstance(raw);
}

// Generator flags shared by `generate` and `experiment`.
struct GeneratorFlags {
  std::string variant = "global";
  std::size_t n = 0;
  double density = 1.0;
  int quota = 1;
  std::string quotas;
  std::size_t dimension = 2;
  std::size_t resources = 16;
  double resource_prob = 0.5;

  void attach(CLI::App& app, bool require_n) {
    app.add_option("--variant", variant, "preference class")
        ->check(CLI::IsMember(
            {"global", "symmetric", "complementary", "uniform-random"}))
        ->capture_default_str();
    auto* n_opt =
        app.add_option("--n", n, "number of peers")->check(CLI::NonNegativeNumber);
    if (require_n) n_opt->required();
    app.add_option("--density", density, "acceptance edge probability")
        ->capture_default_str();
    app.add_option("--quota", quota, "quota for every peer")
        ->capture_default_str();
    app.add_option("--quotas", quotas,
                   "comma-separated per-peer quotas (overrides --quota)");
    app.add_option("--dim", dimension, "dimension for the symmetric variant")
        ->capture_default_str();
    app.add_option("--resources", resources,
                   "universe size for the complementary variant")
        ->capture_default_str();
    app.add_option("--resource-prob", resource_prob,
                   "per-resource ownership probability")
        ->capture_default_str();
  }

  OwnedInstance generate(std::uint64_t seed, std::vector<int>& quota_storage) const {
    bm_generator_spec spec;
    bm_generator_spec_init(&spec);
    if (variant == "global") {
      spec.variant = BM_GEN_GLOBAL;
    } else if (variant == "symmetric") {
      spec.variant = BM_GEN_SYMMETRIC;
    } else if (variant == "complementary") {
      spec.variant = BM_GEN_COMPLEMENTARY;
    } else {
      spec.variant = BM_GEN_UNIFORM_RANDOM;
    }
    spec.peer_count = n;
    spec.density = density;
    spec.quota = quota;
    if (!quotas.empty()) {
      quota_storage.clear();
      std::stringstream stream(quotas);
      std::string item;
      while (std::getline(stream, item, ',')) {
        try {
          quota_storage.push_back(std::stoi(item));
        } catch (const std::exception&) {
          fail(kExitPrecondition, "bad quota entry: " + item);
        }
      }
      spec.quotas = quota_storage.data();
      if (quota_storage.size() != n) {
        fail(kExitPrecondition, "--quotas needs exactly --n entries");
      }
    }
    spec.dimension = dimension;
    spec.resource_count = resources;
    spec.resource_probability = resource_prob;
    spec.seed = seed;
    bm_instance* raw = nullptr;
    check(bm_generate(&spec, &raw), "generate");
    return OwnedInstance(raw);
  }
};

bm_strategy parse_strategy(const std::string& name) {
  if (name == "best") return BM_STRATEGY_BEST;
  if (name == "decremental") return BM_STRATEGY_DECREMENTAL;
  return BM_STRATEGY_RANDOM;
}

bm_scheduler parse_scheduler(const std::string& name) {
  return name == "periodic" ? BM_SCHEDULER_PERIODIC : BM_SCHEDULER_POISSON;
}

std::string format_pairs(const uint32_t* flat, std::size_t count) {
  if (count == 0) return "none";
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out += ", ";
    out += "(" + std::to_string(flat[2 * i]) + "," +
           std::to_string(flat[2 * i + 1]) + ")";
  }
  return out;
}

// ---- generate ------------------------------------------------------

int cmd_generate(const GeneratorFlags& flags, std::uint64_t seed,
                 const std::string& output) {
  std::vector<int> quota_storage;
  const OwnedInstance instance = flags.generate(seed, quota_storage);
  OwnedString text;
  {
    char* raw = nullptr;
    check(bm_instance_serialize(instance.get(), &raw), "serialize");
    text.reset(raw);
  }
  const std::string report =
      "n=" + std::to_string(bm_instance_peer_count(instance.get())) +
      " m=" + std::to_string(bm_instance_edge_count(instance.get())) +
      " B=" + std::to_string(bm_instance_quota_sum(instance.get()));
  if (output.empty()) {
    std::cout << text.get();
    std::cerr << report << "\n";
  } else {
    spit(output, text.get());
    std::cout << report << "\n";
  }
  return kExitConverged;
}

// ---- analyze -------------------------------------------------------

int cmd_analyze(const std::string& path, std::size_t guard_peers,
                int guard_quota) {
  const OwnedInstance instance = load_instance(path);

  OwnedIds cycle;
  std::size_t cycle_len = 0;
  {
    uint32_t* raw = nullptr;
    check(bm_find_preference_cycle(instance.get(), &raw, &cycle_len), "analyze");
    cycle.reset(raw);
  }

  std::string stable_part;
  {
    char* raw = nullptr;
    const bm_status status = bm_brute_force_stable_configs(
        instance.get(), guard_peers, guard_quota, &raw);
    if (status == BM_OK) {
      const OwnedString json(raw);
      const auto doc = nlohmann::json::parse(json.get());
      const auto& configs = doc.at("configurations");
      stable_part = std::to_string(configs.size());
      if (configs.size() == 1 && configs[0].at("pairs").empty()) {
        stable_part += " (C_∅)";
      }
    } else if (status == BM_ERR_GUARD) {
      stable_part = "skipped (over oracle guard)";
    } else {
      fail_status("analyze");
    }
  }

  if (cycle_len > 0) {
    std::string arrow;
    for (std::size_t i = 0; i < cycle_len; ++i) {
      if (i > 0) arrow += "→";
      arrow += std::to_string(cycle.get()[i]);
    }
    std::cout << "cycle found: " << arrow
              << "; stable configurations: " << stable_part << "\n";
    return kExitConverged;
  }

  OwnedIds loving;
  std::size_t loving_count = 0;
  {
    uint32_t* raw = nullptr;
    check(bm_loving_pairs(instance.get(), &raw, &loving_count), "analyze");
    loving.reset(raw);
  }
  std::cout << "acyclic; loving pairs: "
            << format_pairs(loving.get(), loving_count)
            << "; stable configurations: " << stable_part << "\n";
  return kExitConverged;
}

// ---- solve ---------------------------------------------------------

int cmd_solve(const std::string& path, const std::string& output,
              const std::string& plan_path) {
  const OwnedInstance instance = load_instance(path);

  bm_config* config_raw = nullptr;
  const bm_status status = bm_stable_configuration(instance.get(), &config_raw);
  if (status == BM_ERR_CYCLIC) {
    fail(kExitPrecondition, bm_last_error());
  }
  check(status, "solve");
  const OwnedConfig config(config_raw);

  OwnedString config_text;
  {
    char* raw = nullptr;
    check(bm_config_serialize(config.get(), &raw), "solve");
    config_text.reset(raw);
  }
  OwnedString plan_text;
  {
    char* raw = nullptr;
    check(bm_optimal_sequence(instance.get(), nullptr, &raw), "solve");
    plan_text.reset(raw);
  }

  const auto plan_doc = nlohmann::json::parse(plan_text.get());
  const std::size_t plan_len = plan_doc.at("actions").size();
  const int bound = bm_instance_quota_sum(instance.get()) / 2;

  if (output.empty()) {
    std::cout << "stable configuration: " << config_text.get();
  } else {
    spit(output, config_text.get());
  }
  if (!plan_path.empty()) spit(plan_path, plan_text.get());
  std::cout << "plan length: " << plan_len << " (bound " << bound << ")\n";
  return kExitConverged;
}

// ---- simulate ------------------------------------------------------

int cmd_simulate(const std::string& path, const std::string& strategy,
                 const std::string& scheduler, std::uint64_t seed,
                 long long max_steps, const std::string& initial_path,
                 const std::string& trace_path, const std::string& stats_path) {
  const OwnedInstance instance = load_instance(path);

  OwnedConfig initial;
  if (!initial_path.empty()) {
    const std::string text = slurp(initial_path);
    bm_config* raw = nullptr;
    check(bm_config_parse(instance.get(), text.c_str(), &raw), initial_path);
    initial.reset(raw);
  }

  bm_sim_params params;
  bm_sim_params_init(&params);
  params.strategy = parse_strategy(strategy);
  params.scheduler = parse_scheduler(scheduler);
  params.seed = seed;
  params.max_steps = max_steps;
  params.record_trace = trace_path.empty() ? 0 : 1;

  bm_run* run_raw = nullptr;
  check(bm_run_simulation(instance.get(), initial.get(), &params, &run_raw),
        "simulate");
  const OwnedRun run(run_raw);

  if (!trace_path.empty()) {
    char* raw = nullptr;
    check(bm_run_trace_jsonl(run.get(), &raw), "trace");
    const OwnedString text(raw);
    spit(trace_path, text.get());
  }
  if (!stats_path.empty()) {
    char* raw = nullptr;
    check(bm_run_stats_json(run.get(), &raw), "stats");
    const OwnedString text(raw);
    spit(stats_path, text.get());
  }

  const bool converged = bm_run_converged(run.get()) != 0;
  std::cout << "converged: " << (converged ? "true" : "false") << "\n";
  std::cout << "initiatives: " << bm_run_total_initiatives(run.get())
            << " (active " << bm_run_active_initiatives(run.get()) << ")\n";
  if (const long long rounds = bm_run_rounds(run.get()); rounds >= 0) {
    std::cout << "rounds: " << rounds << "\n";
  }
  return converged ? kExitConverged : kExitNotConverged;
}

// ---- experiment ----------------------------------------------------

struct TrialRow {
  std::uint64_t seed = 0;
  long long initiatives = 0;
  long long active = 0;
  long long rounds = -1;
  bool converged = false;
};

struct Aggregate {
  double mean = 0.0;
  long long min = 0;
  long long max = 0;
  long long p50 = 0;
  long long p90 = 0;
  long long p99 = 0;
};

Aggregate aggregate(std::vector<long long> values) {
  Aggregate out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  long long sum = 0;
  for (long long v : values) sum += v;
  out.mean = static_cast<double>(sum) / static_cast<double>(values.size());
  out.min = values.front();
  out.max = values.back();
  const auto nearest_rank = [&](double percentile) {
    const auto rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
  };
  out.p50 = nearest_rank(50.0);
  out.p90 = nearest_rank(90.0);
  out.p99 = nearest_rank(99.0);
  return out;
}

nlohmann::ordered_json aggregate_json(const Aggregate& agg) {
  return {{"mean", agg.mean}, {"min", agg.min},   {"max", agg.max},
          {"p50", agg.p50},   {"p90", agg.p90},   {"p99", agg.p99}};
}

std::string format_csv(const std::vector<TrialRow>& rows, bool periodic) {
  std::string csv = "trial,seed,initiatives,active_initiatives,rounds,converged\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TrialRow& row = rows[i];
    csv += std::to_string(i) + "," + std::to_string(row.seed) + "," +
           std::to_string(row.initiatives) + "," + std::to_string(row.active) +
           ",";
    if (periodic) csv += std::to_string(row.rounds);
    csv += row.converged ? ",true" : ",false";
    csv += "\n";
  }
  return csv;
}

// Recomputes the aggregates from the CSV text and compares with the summary
// document; any drift means the two outputs disagree about the same run.
void recheck_from_csv(const std::string& csv, const nlohmann::ordered_json& summary,
                      bool periodic) {
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<long long> initiatives, active, rounds;
  std::size_t converged = 0, total = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    std::vector<std::string> row;
    while (std::getline(fields, field, ',')) row.push_back(field);
    if (row.size() != 6) fail(kExitPrecondition, "recheck: malformed CSV row");
    initiatives.push_back(std::stoll(row[2]));
    active.push_back(std::stoll(row[3]));
    if (periodic) rounds.push_back(std::stoll(row[4]));
    ++total;
    if (row[5] == "true") ++converged;
  }
  const auto close = [](double a, double b) { return std::abs(a - b) < 1e-9; };
  const auto check_block = [&](const char* key, std::vector<long long> values) {
    const Aggregate agg = aggregate(std::move(values));
    const auto& block = summary.at(key);
    if (!close(agg.mean, block.at("mean").get<double>()) ||
        agg.min != block.at("min").get<long long>() ||
        agg.max != block.at("max").get<long long>() ||
        agg.p50 != block.at("p50").get<long long>() ||
        agg.p90 != block.at("p90").get<long long>() ||
        agg.p99 != block.at("p99").get<long long>()) {
      fail(kExitPrecondition,
           std::string("recheck: summary block '") + key +
               "' does not match the CSV rows");
    }
  };
  check_block("initiatives", initiatives);
  check_block("active_initiatives", active);
  if (periodic) check_block("rounds", rounds);
  const double rate =
      total == 0 ? 1.0
                 : static_cast<double>(converged) / static_cast<double>(total);
  if (!close(rate, summary.at("convergence_rate").get<double>())) {
    fail(kExitPrecondition, "recheck: convergence rate does not match");
  }
}

int cmd_experiment(const std::string& instance_path,
                   const GeneratorFlags& flags, const std::string& strategy,
                   const std::string& scheduler, long long trials,
                   std::uint64_t seed, long long max_steps, unsigned jobs,
                   const std::string& csv_path, const std::string& summary_path,
                   bool recheck) {
  OwnedInstance instance;
  std::vector<int> quota_storage;
  if (!instance_path.empty()) {
    instance = load_instance(instance_path);
  } else {
    if (flags.n == 0) {
      fail(kExitPrecondition,
           "experiment needs an instance file or --n generator flags");
    }
    instance = flags.generate(seed, quota_storage);
  }

  bm_sim_params params;
  bm_sim_params_init(&params);
  params.strategy = parse_strategy(strategy);
  params.scheduler = parse_scheduler(scheduler);
  params.max_steps = max_steps;
  const bool periodic = params.scheduler == BM_SCHEDULER_PERIODIC;

  std::vector<TrialRow> rows(static_cast<std::size_t>(trials));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_lock;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size() || failed.load()) break;
      bm_sim_params trial_params = params;
      trial_params.seed = seed + i;
      bm_run* raw = nullptr;
      const bm_status status =
          bm_run_simulation(instance.get(), nullptr, &trial_params, &raw);
      if (status != BM_OK) {
        const std::lock_guard<std::mutex> hold(failure_lock);
        failed.store(true);
        failure_message = std::string("trial ") + std::to_string(i) + ": " +
                          bm_last_error();
        break;
      }
      const OwnedRun run(raw);
      TrialRow& row = rows[i];
      row.seed = seed + i;
      row.initiatives = bm_run_total_initiatives(run.get());
      row.active = bm_run_active_initiatives(run.get());
      row.rounds = bm_run_rounds(run.get());
      row.converged = bm_run_converged(run.get()) != 0;
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failed.load()) fail(kExitPrecondition, failure_message);

  std::vector<long long> initiatives, active, rounds;
  std::size_t converged_count = 0;
  for (const TrialRow& row : rows) {
    initiatives.push_back(row.initiatives);
    active.push_back(row.active);
    if (periodic) rounds.push_back(row.rounds);
    if (row.converged) ++converged_count;
  }

  const auto n = static_cast<double>(bm_instance_peer_count(instance.get()));
  const auto B = static_cast<double>(bm_instance_quota_sum(instance.get()));
  const double poisson_mean_bound = n * B / 4.0;
  const Aggregate agg_initiatives = aggregate(initiatives);
  const double rate = rows.empty() ? 1.0
                                   : static_cast<double>(converged_count) /
                                         static_cast<double>(rows.size());

  nlohmann::ordered_json summary;
  summary["instance"] = {{"peers", bm_instance_peer_count(instance.get())},
                         {"edges", bm_instance_edge_count(instance.get())},
                         {"quota_sum", bm_instance_quota_sum(instance.get())}};
  summary["strategy"] = strategy;
  summary["scheduler"] = scheduler;
  summary["trials"] = trials;
  summary["seed"] = seed;
  summary["convergence_rate"] = rate;
  summary["initiatives"] = aggregate_json(agg_initiatives);
  summary["active_initiatives"] = aggregate_json(aggregate(active));
  if (periodic) {
    summary["rounds"] = aggregate_json(aggregate(rounds));
  } else {
    summary["rounds"] = nullptr;
  }
  summary["bounds"] = {
      {"half_quota_sum", B / 2.0},
      {"poisson_mean", poisson_mean_bound},
      {"poisson_whp", n * B * std::log(n)}};
  summary["mean_initiatives_over_poisson_mean"] =
      poisson_mean_bound > 0.0 ? agg_initiatives.mean / poisson_mean_bound
                               : 0.0;

  const std::string csv = format_csv(rows, periodic);
  if (!csv_path.empty()) spit(csv_path, csv);
  if (!summary_path.empty()) spit(summary_path, summary.dump() + "\n");
  if (recheck) {
    const std::string csv_back = csv_path.empty() ? csv : slurp(csv_path);
    recheck_from_csv(csv_back, summary, periodic);
  }

  std::cout << "trials: " << trials << " converged: " << converged_count
            << " (rate " << rate << ")\n";
  std::cout << "initiatives: mean " << agg_initiatives.mean << " min "
            << agg_initiatives.min << " max " << agg_initiatives.max << "\n";
  if (params.scheduler == BM_SCHEDULER_POISSON && poisson_mean_bound > 0.0) {
    std::cout << "poisson mean bound nB/4: " << poisson_mean_bound
              << " mean/bound: " << agg_initiatives.mean / poisson_mean_bound
              << "\n";
  }
  return converged_count == rows.size() ? kExitConverged : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"b-matching preference instances: generation, analysis, "
               "solving, and initiative dynamics"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "write a random instance");
  GeneratorFlags gen_flags;
  gen_flags.attach(*generate, true);
  std::uint64_t gen_seed = 0;
  std::string gen_output;
  generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  generate->add_option("-o,--output", gen_output, "instance file (stdout if absent)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "report cycles, loving pairs, "
                                                "and stable configurations");
  std::string analyze_path;
  std::size_t guard_peers = 0;
  int guard_quota = 0;
  analyze->add_option("instance", analyze_path, "instance file")->required();
  analyze->add_option("--guard-peers", guard_peers,
                      "raise the exhaustive-search peer limit");
  analyze->add_option("--guard-quota", guard_quota,
                      "raise the exhaustive-search quota-sum limit");

  // solve
  auto* solve = app.add_subcommand(
      "solve", "compute the stable configuration and an initiative plan");
  std::string solve_path, solve_output, solve_plan;
  solve->add_option("instance", solve_path, "instance file")->required();
  solve->add_option("-o,--output", solve_output,
                    "stable configuration file (stdout if absent)");
  solve->add_option("--plan", solve_plan, "initiative plan file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run initiative dynamics once");
  std::string sim_path, sim_strategy = "best", sim_scheduler = "periodic";
  std::string sim_initial, sim_trace, sim_stats;
  std::uint64_t sim_seed = 0;
  long long sim_max_steps = 0;
  simulate->add_option("instance", sim_path, "instance file")->required();
  simulate->add_option("--strategy", sim_strategy, "proposal strategy")
      ->check(CLI::IsMember({"best", "decremental", "random"}))
      ->capture_default_str();
  simulate->add_option("--scheduler", sim_scheduler, "initiative scheduler")
      ->check(CLI::IsMember({"periodic", "poisson"}))
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  simulate->add_option("--max-steps", sim_max_steps,
                       "step guard (0 = 100*n*B default)");
  simulate->add_option("--initial", sim_initial, "starting configuration file");
  simulate->add_option("--trace", sim_trace, "trace output file (JSON lines)");
  simulate->add_option("--stats", sim_stats, "stats output file (JSON)");

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "run seeded trial batches and aggregate statistics");
  GeneratorFlags exp_flags;
  std::string exp_path, exp_strategy = "best", exp_scheduler = "periodic";
  std::string exp_csv, exp_summary;
  long long exp_trials = 100;
  std::uint64_t exp_seed = 0;
  long long exp_max_steps = 0;
  unsigned exp_jobs = 1;
  bool exp_recheck = false;
  experiment->add_option("instance", exp_path,
                         "instance file (omit to generate one)");
  exp_flags.attach(*experiment, false);
  experiment->add_option("--strategy", exp_strategy, "proposal strategy")
      ->check(CLI::IsMember({"best", "decremental", "random"}))
      ->capture_default_str();
  experiment->add_option("--scheduler", exp_scheduler, "initiative scheduler")
      ->check(CLI::IsMember({"periodic", "poisson"}))
      ->capture_default_str();
  experiment->add_option("--trials", exp_trials, "number of trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  experiment->add_option("--seed", exp_seed, "base seed (trial i uses seed+i)")
      ->capture_default_str();
  experiment->add_option("--max-steps", exp_max_steps,
                         "step guard (0 = 100*n*B default)");
  experiment->add_option("--jobs", exp_jobs, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  experiment->add_option("--csv", exp_csv, "per-trial CSV file");
  experiment->add_option("--summary", exp_summary, "summary JSON file");
  experiment->add_flag("--recheck", exp_recheck,
                       "recompute aggregates from the CSV and compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  try {
    if (generate->parsed()) {
      return cmd_generate(gen_flags, gen_seed, gen_output);
    }
    if (analyze->parsed()) {
      return cmd_analyze(analyze_path, guard_peers, guard_quota);
    }
    if (solve->parsed()) {
      return cmd_solve(solve_path, solve_output, solve_plan);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_path, sim_strategy, sim_scheduler, sim_seed,
                          sim_max_steps, sim_initial, sim_trace, sim_stats);
    }
    if (experiment->parsed()) {
      return cmd_experiment(exp_path, exp_flags, exp_strategy, exp_scheduler,
                            exp_trials, exp_seed, exp_max_steps, exp_jobs,
                            exp_csv, exp_summary, exp_recheck);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitPrecondition;
}
