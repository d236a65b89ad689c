#include "bmatch/dynamics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "bmatch/analysis.hpp"
#include "bmatch/error.hpp"

namespace bmatch {

namespace {

struct MateView {
  std::vector<int> load;
  std::vector<int> worst_rank;

  MateView(const PreferenceInstance& instance, const Configuration& config)
      : load(instance.peer_count(), 0), worst_rank(instance.peer_count(), 0) {
    for (const auto& pair : config.pairs()) {
      auto note = [&](PeerId p, PeerId mate) {
        ++load[p];
        worst_rank[p] = std::max(worst_rank[p], instance.rank(p, mate));
      };
      note(pair.a, pair.b);
      note(pair.b, pair.a);
    }
  }

  bool wants(const PreferenceInstance& instance, PeerId p, PeerId q) const {
    if (load[p] < instance.quota(p)) return true;
    return instance.rank(p, q) < worst_rank[p];
  }
};

bool blocks(const PreferenceInstance& instance, const Configuration& config,
            const MateView& view, PeerId p, PeerId q) {
  const PeerPair pair(p, q);
  if (config.contains(pair)) return false;
  return view.wants(instance, p, q) && view.wants(instance, q, p);
}

}  // namespace

StrategyState StrategyState::make(StrategyKind kind,
                                  const PreferenceInstance& instance) {
  StrategyState state;
  state.kind = kind;
  if (kind == StrategyKind::decremental_mate) {
    state.cursors.assign(instance.peer_count(), 1);
  }
  return state;
}

long long default_max_steps(const PreferenceInstance& instance) {
  const long long steps = 100ll *
                          static_cast<long long>(instance.peer_count()) *
                          static_cast<long long>(instance.quota_sum());
  return std::max(1ll, steps);
}

std::optional<PeerId> select_proposal(const PreferenceInstance& instance,
                                      const Configuration& config, PeerId p,
                                      StrategyState& state, Rng& rng) {
  instance.require_peer(p);
  const auto& list = instance.list(p);
  if (list.empty()) return std::nullopt;
  const MateView view(instance, config);

  switch (state.kind) {
    case StrategyKind::best_mate:
      for (PeerId q : list) {
        if (blocks(instance, config, view, p, q)) return q;
      }
      return std::nullopt;

    case StrategyKind::decremental_mate: {
      const std::size_t deg = list.size();
      const std::size_t start =
          static_cast<std::size_t>(state.cursors.at(p) - 1);
      for (std::size_t offset = 0; offset < deg; ++offset) {
        const std::size_t pos = (start + offset) % deg;
        const PeerId q = list[pos];
        if (blocks(instance, config, view, p, q)) {
          state.cursors.at(p) = static_cast<int>((pos + 1) % deg) + 1;
          return q;
        }
      }
      return std::nullopt;
    }

    case StrategyKind::random_mate: {
      std::vector<PeerId> candidates;
      for (PeerId q : list) {
        if (blocks(instance, config, view, p, q)) candidates.push_back(q);
      }
      if (candidates.empty()) return std::nullopt;
      return candidates[rng.uniform_index(candidates.size())];
    }
  }
  throw Error(ErrorCode::internal_error, "unknown strategy kind");
}

std::pair<Configuration, std::vector<PeerId>> apply_initiative(
    const PreferenceInstance& instance, const Configuration& config, PeerId p,
    PeerId q) {
  const PeerPair pair(p, q);
  if (!is_blocking_pair(instance, config, pair)) {
    throw Error(ErrorCode::invalid_argument,
                "initiative (" + std::to_string(p) + ", " + std::to_string(q) +
                    ") is not a blocking pair of the configuration");
  }
  Configuration result = config;
  std::vector<PeerId> dropped;
  for (PeerId e : {pair.a, pair.b}) {
    if (result.count_at(e) < instance.quota(e)) continue;
    // At quota: sever the worst-ranked current mate to make room.
    PeerId worst = 0;
    int worst_rank = 0;
    for (PeerId mate : result.mates(e)) {
      const int r = instance.rank(e, mate);
      if (r > worst_rank) {
        worst_rank = r;
        worst = mate;
      }
    }
    result.erase(PeerPair(e, worst));
    dropped.push_back(worst);
  }
  result.insert(pair);
  std::sort(dropped.begin(), dropped.end());
  dropped.erase(std::unique(dropped.begin(), dropped.end()), dropped.end());
  return {std::move(result), std::move(dropped)};
}

std::pair<Trace, RunStats> run_simulation(const PreferenceInstance& instance,
                                          const Configuration& initial,
                                          StrategyState strategy,
                                          const SchedulerSpec& scheduler,
                                          std::uint64_t seed,
                                          const RunOptions& options) {
  validate_configuration(instance, initial);
  const long long max_steps =
      scheduler.max_steps.value_or(default_max_steps(instance));
  if (max_steps < 1) {
    throw Error(ErrorCode::invalid_argument,
                "max_steps must be >= 1, got " + std::to_string(max_steps));
  }

  Trace trace;
  trace.instance = &instance;
  trace.initial = initial;
  if (options.record_configurations) trace.configurations.push_back(initial);

  RunStats stats;
  Rng rng(seed);
  Configuration current = initial;
  bool stable = is_stable(instance, current);
  const std::size_t n = instance.peer_count();

  auto take_initiative = [&](long long step, PeerId p) {
    const auto proposal = select_proposal(instance, current, p, strategy, rng);
    InitiativeEvent event;
    event.step = step;
    event.peer = p;
    event.active = proposal.has_value();
    event.proposal = proposal;
    ++stats.total_initiatives;
    if (proposal) {
      auto [next, dropped] = apply_initiative(instance, current, p, *proposal);
      current = std::move(next);
      event.dropped = std::move(dropped);
      ++stats.active_initiatives;
      stats.steps_to_convergence = step;
      stable = is_stable(instance, current);
    }
    if (options.record_events) trace.events.push_back(std::move(event));
    if (options.record_configurations) trace.configurations.push_back(current);
  };

  long long step = 0;
  if (scheduler.kind == SchedulerKind::periodic) {
    stats.rounds = 0;
    std::vector<PeerId> order(n);
    std::iota(order.begin(), order.end(), 0);
    while (!stable && step < max_steps) {
      ++*stats.rounds;
      rng.shuffle(order);
      for (PeerId p : order) {
        if (stable || step >= max_steps) break;
        take_initiative(++step, p);
      }
    }
  } else {
    while (!stable && step < max_steps) {
      const PeerId p = static_cast<PeerId>(rng.uniform_index(n));
      take_initiative(++step, p);
    }
  }

  stats.converged = stable;
  if (!stats.converged) stats.steps_to_convergence.reset();
  stats.final_configuration = std::move(current);
  return {std::move(trace), std::move(stats)};
}

std::optional<std::pair<long long, long long>> detect_configuration_revisit(
    const Trace& trace) {
  if (trace.configurations.size() != trace.events.size() + 1) {
    throw Error(ErrorCode::invalid_argument,
                "trace has no recorded configurations to compare");
  }
  std::map<Configuration, long long> first_seen;
  for (std::size_t i = 1; i < trace.configurations.size(); ++i) {
    if (!trace.events[i - 1].active) continue;
    const auto index = static_cast<long long>(i);
    const auto [it, inserted] =
        first_seen.emplace(trace.configurations[i], index);
    if (!inserted) return std::make_pair(it->second, index);
  }
  return std::nullopt;
}

}  // namespace bmatch
