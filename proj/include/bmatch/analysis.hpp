#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bmatch/instance.hpp"

namespace bmatch {

// Peers p_0..p_{k-1}, k >= 3, where each p_i prefers p_{i+1} to p_{i-1}
// (indices mod k).
struct PreferenceCycle {
  std::vector<PeerId> peers;
};

// {p, q} blocks config iff it is an unmatched acceptance edge and each
// endpoint is either under quota or prefers the other to its worst mate.
bool is_blocking_pair(const PreferenceInstance& instance,
                      const Configuration& config, const PeerPair& pair);

// All blocking pairs in ascending (a, b) order.
std::vector<PeerPair> blocking_pairs(const PreferenceInstance& instance,
                                     const Configuration& config);

bool is_stable(const PreferenceInstance& instance, const Configuration& config);

// Pairs that rank each other first, ascending.
std::vector<PeerPair> loving_pairs(const PreferenceInstance& instance);

// Searches the instance for a preference cycle; empty result means the
// instance is acyclic. Prefers short cycles but makes no minimality promise.
std::optional<PreferenceCycle> find_preference_cycle(
    const PreferenceInstance& instance);

// Checks that cycle actually satisfies the cycle condition on instance.
bool cycle_holds(const PreferenceInstance& instance,
                 const PreferenceCycle& cycle);

// Exhaustive search refuses to run past these limits unless raised.
struct OracleGuard {
  std::size_t max_peers = 10;
  int max_quota_sum = 12;
};

// Enumerates every stable configuration by exhaustive search over edge
// subsets. Throws Error(guard_exceeded) when the instance is over the guard.
std::vector<Configuration> brute_force_stable_configs(
    const PreferenceInstance& instance, const OracleGuard& guard = {});

}  // namespace bmatch
