#include "bmatch.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bmatch/analysis.hpp"
#include "bmatch/dynamics.hpp"
#include "bmatch/error.hpp"
#include "bmatch/generator.hpp"
#include "bmatch/instance.hpp"
#include "bmatch/json_io.hpp"
#include "bmatch/solver.hpp"

struct bm_instance {
  bmatch::PreferenceInstance value;
};

struct bm_config {
  bmatch::Configuration value;
};

struct bm_run {
  bmatch::Trace trace;
  bmatch::RunStats stats;
  bool trace_recorded = false;
};

namespace {

thread_local std::string g_last_error;

bm_status map_code(bmatch::ErrorCode code) {
  switch (code) {
    case bmatch::ErrorCode::invalid_argument:
      return BM_ERR_INVALID_ARGUMENT;
    case bmatch::ErrorCode::parse_error:
      return BM_ERR_PARSE;
    case bmatch::ErrorCode::validation:
      return BM_ERR_VALIDATION;
    case bmatch::ErrorCode::cyclic_instance:
      return BM_ERR_CYCLIC;
    case bmatch::ErrorCode::guard_exceeded:
      return BM_ERR_GUARD;
    case bmatch::ErrorCode::generation_failed:
      return BM_ERR_GENERATION;
    case bmatch::ErrorCode::internal_error:
      return BM_ERR_INTERNAL;
  }
  return BM_ERR_INTERNAL;
}

template <class Fn>
bm_status guarded(Fn&& fn) {
  try {
    fn();
    return BM_OK;
  } catch (const bmatch::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BM_ERR_INTERNAL;
  }
}

bm_status invalid(const char* message) {
  g_last_error = message;
  return BM_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

uint32_t* copy_pairs(const std::vector<bmatch::PeerPair>& pairs) {
  uint32_t* flat =
      static_cast<uint32_t*>(std::malloc(std::max<size_t>(1, 2 * pairs.size()) *
                                         sizeof(uint32_t)));
  if (!flat) throw std::bad_alloc();
  for (size_t i = 0; i < pairs.size(); ++i) {
    flat[2 * i] = pairs[i].a;
    flat[2 * i + 1] = pairs[i].b;
  }
  return flat;
}

const bmatch::Configuration& config_or_empty(const bm_config* config) {
  static const bmatch::Configuration empty;
  return config ? config->value : empty;
}

}  // namespace

const char* bm_status_name(bm_status status) {
  switch (status) {
    case BM_OK:
      return "ok";
    case BM_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case BM_ERR_PARSE:
      return "parse error";
    case BM_ERR_VALIDATION:
      return "validation error";
    case BM_ERR_CYCLIC:
      return "cyclic instance";
    case BM_ERR_GUARD:
      return "guard exceeded";
    case BM_ERR_GENERATION:
      return "generation failed";
    case BM_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* bm_last_error(void) { return g_last_error.c_str(); }

void bm_string_free(char* text) { std::free(text); }

void bm_ids_free(uint32_t* ids) { std::free(ids); }

bm_status bm_instance_parse(const char* text, bm_instance** out) {
  if (!text || !out) return invalid("text and out must not be NULL");
  return guarded([&] {
    auto* instance = new bm_instance{bmatch::parse_instance(text)};
    *out = instance;
  });
}

bm_status bm_instance_build(size_t peer_count, const int* quotas,
                            const size_t* list_lens,
                            const uint32_t* lists_flat, bm_instance** out) {
  if (!out || (peer_count > 0 && (!quotas || !list_lens))) {
    return invalid("quotas, list_lens, and out must not be NULL");
  }
  return guarded([&] {
    std::vector<int> quota_vec(quotas, quotas + peer_count);
    std::vector<std::vector<bmatch::PeerId>> lists(peer_count);
    size_t offset = 0;
    for (size_t p = 0; p < peer_count; ++p) {
      if (list_lens[p] > 0 && !lists_flat) {
        throw bmatch::Error(bmatch::ErrorCode::invalid_argument,
                            "lists_flat must not be NULL");
      }
      lists[p].assign(lists_flat + offset, lists_flat + offset + list_lens[p]);
      offset += list_lens[p];
    }
    auto* instance = new bm_instance{
        bmatch::PreferenceInstance::create(std::move(quota_vec),
                                           std::move(lists))};
    *out = instance;
  });
}

bm_status bm_instance_serialize(const bm_instance* instance, char** out) {
  if (!instance || !out) return invalid("instance and out must not be NULL");
  return guarded(
      [&] { *out = copy_string(bmatch::serialize_instance(instance->value)); });
}

void bm_instance_free(bm_instance* instance) { delete instance; }

size_t bm_instance_peer_count(const bm_instance* instance) {
  return instance ? instance->value.peer_count() : 0;
}

size_t bm_instance_edge_count(const bm_instance* instance) {
  return instance ? instance->value.edge_count() : 0;
}

int bm_instance_quota_sum(const bm_instance* instance) {
  return instance ? instance->value.quota_sum() : 0;
}

void bm_generator_spec_init(bm_generator_spec* spec) {
  if (!spec) return;
  spec->variant = BM_GEN_GLOBAL;
  spec->peer_count = 0;
  spec->density = 1.0;
  spec->quota = 1;
  spec->quotas = nullptr;
  spec->dimension = 2;
  spec->resource_count = 16;
  spec->resource_probability = 0.5;
  spec->seed = 0;
}

bm_status bm_generate(const bm_generator_spec* spec, bm_instance** out) {
  if (!spec || !out) return invalid("spec and out must not be NULL");
  return guarded([&] {
    bmatch::GeneratorSpec core;
    switch (spec->variant) {
      case BM_GEN_GLOBAL:
        core.variant = bmatch::GeneratorVariant::global;
        break;
      case BM_GEN_SYMMETRIC:
        core.variant = bmatch::GeneratorVariant::symmetric;
        break;
      case BM_GEN_COMPLEMENTARY:
        core.variant = bmatch::GeneratorVariant::complementary;
        break;
      case BM_GEN_UNIFORM_RANDOM:
        core.variant = bmatch::GeneratorVariant::uniform_random;
        break;
      default:
        throw bmatch::Error(bmatch::ErrorCode::invalid_argument,
                            "unknown generator variant");
    }
    core.peer_count = spec->peer_count;
    core.density = spec->density;
    core.quota = spec->quota;
    if (spec->quotas) {
      core.quotas.assign(spec->quotas, spec->quotas + spec->peer_count);
    }
    core.dimension = spec->dimension;
    core.resource_count = spec->resource_count;
    core.resource_probability = spec->resource_probability;
    core.seed = spec->seed;
    auto* instance = new bm_instance{bmatch::generate(core)};
    *out = instance;
  });
}

bm_status bm_config_create_empty(bm_config** out) {
  if (!out) return invalid("out must not be NULL");
  return guarded([&] { *out = new bm_config{}; });
}

bm_status bm_config_parse(const bm_instance* instance, const char* text,
                          bm_config** out) {
  if (!instance || !text || !out) {
    return invalid("instance, text, and out must not be NULL");
  }
  return guarded([&] {
    *out = new bm_config{bmatch::parse_configuration(instance->value, text)};
  });
}

bm_status bm_config_serialize(const bm_config* config, char** out) {
  if (!config || !out) return invalid("config and out must not be NULL");
  return guarded([&] {
    *out = copy_string(bmatch::serialize_configuration(config->value));
  });
}

void bm_config_free(bm_config* config) { delete config; }

size_t bm_config_pair_count(const bm_config* config) {
  return config ? config->value.size() : 0;
}

bm_status bm_config_pairs(const bm_config* config, uint32_t** flat,
                          size_t* pair_count) {
  if (!config || !flat || !pair_count) {
    return invalid("config, flat, and pair_count must not be NULL");
  }
  return guarded([&] {
    *flat = copy_pairs(config->value.pairs());
    *pair_count = config->value.size();
  });
}

bm_status bm_is_stable(const bm_instance* instance, const bm_config* config,
                       int* stable) {
  if (!instance || !stable) return invalid("instance and stable must not be NULL");
  return guarded([&] {
    *stable = bmatch::is_stable(instance->value, config_or_empty(config)) ? 1 : 0;
  });
}

bm_status bm_blocking_pairs(const bm_instance* instance,
                            const bm_config* config, uint32_t** flat,
                            size_t* pair_count) {
  if (!instance || !flat || !pair_count) {
    return invalid("instance, flat, and pair_count must not be NULL");
  }
  return guarded([&] {
    const auto pairs =
        bmatch::blocking_pairs(instance->value, config_or_empty(config));
    *flat = copy_pairs(pairs);
    *pair_count = pairs.size();
  });
}

bm_status bm_loving_pairs(const bm_instance* instance, uint32_t** flat,
                          size_t* pair_count) {
  if (!instance || !flat || !pair_count) {
    return invalid("instance, flat, and pair_count must not be NULL");
  }
  return guarded([&] {
    const auto pairs = bmatch::loving_pairs(instance->value);
    *flat = copy_pairs(pairs);
    *pair_count = pairs.size();
  });
}

bm_status bm_find_preference_cycle(const bm_instance* instance,
                                   uint32_t** peers, size_t* length) {
  if (!instance || !peers || !length) {
    return invalid("instance, peers, and length must not be NULL");
  }
  return guarded([&] {
    const auto cycle = bmatch::find_preference_cycle(instance->value);
    if (!cycle) {
      *peers = nullptr;
      *length = 0;
      return;
    }
    uint32_t* out = static_cast<uint32_t*>(
        std::malloc(cycle->peers.size() * sizeof(uint32_t)));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, cycle->peers.data(),
                cycle->peers.size() * sizeof(uint32_t));
    *peers = out;
    *length = cycle->peers.size();
  });
}

bm_status bm_brute_force_stable_configs(const bm_instance* instance,
                                        size_t guard_peers,
                                        int guard_quota_sum, char** json) {
  if (!instance || !json) return invalid("instance and json must not be NULL");
  return guarded([&] {
    bmatch::OracleGuard guard;
    if (guard_peers > 0) guard.max_peers = guard_peers;
    if (guard_quota_sum > 0) guard.max_quota_sum = guard_quota_sum;
    const auto configs =
        bmatch::brute_force_stable_configs(instance->value, guard);
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& config : configs) {
      nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
      for (const auto& pair : config.pairs()) {
        pairs.push_back({pair.a, pair.b});
      }
      list.push_back({{"pairs", std::move(pairs)}});
    }
    nlohmann::ordered_json doc;
    doc["configurations"] = std::move(list);
    *json = copy_string(doc.dump() + "\n");
  });
}

bm_status bm_stable_configuration(const bm_instance* instance,
                                  bm_config** out) {
  if (!instance || !out) return invalid("instance and out must not be NULL");
  return guarded([&] {
    *out = new bm_config{bmatch::stable_configuration(instance->value)};
  });
}

bm_status bm_optimal_sequence(const bm_instance* instance,
                              const bm_config* initial, char** json) {
  if (!instance || !json) return invalid("instance and json must not be NULL");
  return guarded([&] {
    const auto plan =
        bmatch::optimal_sequence(instance->value, config_or_empty(initial));
    *json = copy_string(bmatch::serialize_plan(plan));
  });
}

void bm_sim_params_init(bm_sim_params* params) {
  if (!params) return;
  params->strategy = BM_STRATEGY_BEST;
  params->scheduler = BM_SCHEDULER_PERIODIC;
  params->max_steps = 0;
  params->seed = 0;
  params->record_trace = 0;
}

bm_status bm_run_simulation(const bm_instance* instance,
                            const bm_config* initial,
                            const bm_sim_params* params, bm_run** out) {
  if (!instance || !params || !out) {
    return invalid("instance, params, and out must not be NULL");
  }
  return guarded([&] {
    bmatch::StrategyKind kind;
    switch (params->strategy) {
      case BM_STRATEGY_BEST:
        kind = bmatch::StrategyKind::best_mate;
        break;
      case BM_STRATEGY_DECREMENTAL:
        kind = bmatch::StrategyKind::decremental_mate;
        break;
      case BM_STRATEGY_RANDOM:
        kind = bmatch::StrategyKind::random_mate;
        break;
      default:
        throw bmatch::Error(bmatch::ErrorCode::invalid_argument,
                            "unknown strategy");
    }
    bmatch::SchedulerSpec scheduler;
    switch (params->scheduler) {
      case BM_SCHEDULER_PERIODIC:
        scheduler.kind = bmatch::SchedulerKind::periodic;
        break;
      case BM_SCHEDULER_POISSON:
        scheduler.kind = bmatch::SchedulerKind::poisson;
        break;
      default:
        throw bmatch::Error(bmatch::ErrorCode::invalid_argument,
                            "unknown scheduler");
    }
    if (params->max_steps > 0) scheduler.max_steps = params->max_steps;

    bmatch::RunOptions options;
    options.record_events = params->record_trace != 0;
    options.record_configurations = params->record_trace != 0;

    auto [trace, stats] = bmatch::run_simulation(
        instance->value, config_or_empty(initial),
        bmatch::StrategyState::make(kind, instance->value), scheduler,
        params->seed, options);
    auto* run = new bm_run{std::move(trace), std::move(stats),
                           params->record_trace != 0};
    *out = run;
  });
}

void bm_run_free(bm_run* run) { delete run; }

int bm_run_converged(const bm_run* run) {
  return run && run->stats.converged ? 1 : 0;
}

long long bm_run_total_initiatives(const bm_run* run) {
  return run ? run->stats.total_initiatives : 0;
}

long long bm_run_active_initiatives(const bm_run* run) {
  return run ? run->stats.active_initiatives : 0;
}

long long bm_run_rounds(const bm_run* run) {
  return run && run->stats.rounds ? *run->stats.rounds : -1;
}

long long bm_run_steps_to_convergence(const bm_run* run) {
  return run && run->stats.steps_to_convergence
             ? *run->stats.steps_to_convergence
             : -1;
}

bm_status bm_run_final_configuration(const bm_run* run, bm_config** out) {
  if (!run || !out) return invalid("run and out must not be NULL");
  return guarded(
      [&] { *out = new bm_config{run->stats.final_configuration}; });
}

bm_status bm_run_stats_json(const bm_run* run, char** json) {
  if (!run || !json) return invalid("run and json must not be NULL");
  return guarded([&] { *json = copy_string(bmatch::stats_to_json(run->stats)); });
}

bm_status bm_run_trace_jsonl(const bm_run* run, char** jsonl) {
  if (!run || !jsonl) return invalid("run and jsonl must not be NULL");
  return guarded([&] {
    *jsonl = copy_string(run->trace_recorded
                             ? bmatch::trace_to_jsonl(run->trace)
                             : std::string());
  });
}
