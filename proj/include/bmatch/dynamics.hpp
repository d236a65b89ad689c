#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bmatch/instance.hpp"
#include "bmatch/rng.hpp"

namespace bmatch {

enum class StrategyKind {
  best_mate,         // propose to the best non-mate that forms a blocking pair
  decremental_mate,  // circular cursor down the list, first blocking non-mate
  random_mate,       // uniform among blocking non-mates
};

struct StrategyState {
  StrategyKind kind = StrategyKind::best_mate;
  // 1-based list cursor per peer, used by decremental_mate only.
  std::vector<int> cursors;

  static StrategyState make(StrategyKind kind,
                            const PreferenceInstance& instance);
};

enum class SchedulerKind {
  periodic,  // rounds: every peer takes one initiative per round, in a fresh
             // random order each round
  poisson,   // each step activates one peer chosen uniformly at random
};

struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::periodic;
  // Safety stop; defaults to default_max_steps(instance) when absent.
  std::optional<long long> max_steps;
};

struct InitiativeEvent {
  long long step = 0;  // 1-based across the whole run
  PeerId peer = 0;
  // Absent for a passive initiative (no blocking partner available).
  std::optional<PeerId> proposal;
  bool active = false;
  // Peers that lost p or proposal as a mate when the new pair displaced
  // worst mates; sorted, unique.
  std::vector<PeerId> dropped;
};

struct Trace {
  const PreferenceInstance* instance = nullptr;
  Configuration initial;
  std::vector<InitiativeEvent> events;
  // configurations[i] is the state after event i; configurations.front()
  // duplicates initial when recording is on. Empty when recording is off.
  std::vector<Configuration> configurations;
};

struct RunStats {
  long long total_initiatives = 0;
  long long active_initiatives = 0;
  // Rounds started; only meaningful for the periodic scheduler.
  std::optional<long long> rounds;
  bool converged = false;
  Configuration final_configuration;
  // Step index of the last active initiative; absent when the initial
  // configuration was already stable.
  std::optional<long long> steps_to_convergence;
};

struct RunOptions {
  bool record_events = true;
  bool record_configurations = true;
};

long long default_max_steps(const PreferenceInstance& instance);

// The proposal peer p would make from config under the strategy, or empty if
// p has no blocking partner. Advances the decremental cursor as a side
// effect; draws from rng only for random_mate.
std::optional<PeerId> select_proposal(const PreferenceInstance& instance,
                                      const Configuration& config, PeerId p,
                                      StrategyState& state, Rng& rng);

// Adds {p, q} to config, first severing each endpoint's worst mate while
// over quota. Returns the new configuration and the dropped peers.
std::pair<Configuration, std::vector<PeerId>> apply_initiative(
    const PreferenceInstance& instance, const Configuration& config, PeerId p,
    PeerId q);

// Runs initiative dynamics from initial until stable or the step limit.
std::pair<Trace, RunStats> run_simulation(const PreferenceInstance& instance,
                                          const Configuration& initial,
                                          StrategyState strategy,
                                          const SchedulerSpec& scheduler,
                                          std::uint64_t seed,
                                          const RunOptions& options = {});

// First (i, j), i < j, with equal configurations, comparing only indices
// that follow an active event. Requires a trace with recorded
// configurations.
std::optional<std::pair<long long, long long>> detect_configuration_revisit(
    const Trace& trace);

}  // namespace bmatch
