#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "bmatch/analysis.hpp"
#include "bmatch/instance.hpp"
#include "bmatch/rng.hpp"

// Hand-built instances and deliberately naive re-implementations used as
// oracles. The naive code trades speed for obviousness; keep it that way.
namespace fixtures {

// Complete triangle, quota 1, global order 0 > 1 > 2.
inline bmatch::PreferenceInstance triangle() {
  return bmatch::PreferenceInstance::create(
      {1, 1, 1}, {{1, 2}, {0, 2}, {0, 1}});
}

// Complete triangle with quotas {2,1,1}, same global order.
inline bmatch::PreferenceInstance triangle_quota2() {
  return bmatch::PreferenceInstance::create(
      {2, 1, 1}, {{1, 2}, {0, 2}, {0, 1}});
}

// Complete 4-peer instance, quota 1, global order 0 > 1 > 2 > 3.
inline bmatch::PreferenceInstance four_global() {
  return bmatch::PreferenceInstance::create(
      {1, 1, 1, 1}, {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}});
}

// The classic 4-peer instance with no stable configuration: 0, 1, 2 chase
// each other in a circle and 3 is everyone's last choice.
inline bmatch::PreferenceInstance four_cyclic() {
  return bmatch::PreferenceInstance::create(
      {1, 1, 1, 1}, {{1, 2, 3}, {2, 0, 3}, {0, 1, 3}, {0, 1, 2}});
}

// Two isolated peers; a trivial instance.
inline bmatch::PreferenceInstance isolated_pair() {
  return bmatch::PreferenceInstance::create({1, 1}, {{}, {}});
}

inline bmatch::Configuration cfg(
    std::vector<std::pair<bmatch::PeerId, bmatch::PeerId>> pairs) {
  std::vector<bmatch::PeerPair> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) out.emplace_back(a, b);
  return bmatch::Configuration(std::move(out));
}

// Blocking-pair check straight from the definition, written independently
// of the library's MateView bookkeeping.
inline bool naive_blocking(const bmatch::PreferenceInstance& inst,
                           const bmatch::Configuration& config,
                           bmatch::PeerId p, bmatch::PeerId q) {
  if (!inst.accepts(p, q)) return false;
  if (config.contains(bmatch::PeerPair(p, q))) return false;
  const auto side = [&](bmatch::PeerId self, bmatch::PeerId other) {
    std::vector<bmatch::PeerId> mates = config.mates(self);
    if (static_cast<int>(mates.size()) < inst.quota(self)) return true;
    // Beating any mate of a full peer is the same as beating its worst one.
    for (bmatch::PeerId mate : mates) {
      if (inst.rank(self, other) < inst.rank(self, mate)) return true;
    }
    return false;
  };
  return side(p, q) && side(q, p);
}

inline std::vector<bmatch::PeerPair> naive_blocking_pairs(
    const bmatch::PreferenceInstance& inst,
    const bmatch::Configuration& config) {
  std::vector<bmatch::PeerPair> out;
  for (bmatch::PeerId p = 0; p < inst.peer_count(); ++p) {
    for (bmatch::PeerId q = p + 1; q < inst.peer_count(); ++q) {
      if (naive_blocking(inst, config, p, q)) out.emplace_back(p, q);
    }
  }
  return out;
}

inline bool naive_stable(const bmatch::PreferenceInstance& inst,
                         const bmatch::Configuration& config) {
  return naive_blocking_pairs(inst, config).empty();
}

// Exhaustive preference-cycle search over all short sequences of distinct
// peers. Exponential; only for very small instances.
inline std::optional<std::vector<bmatch::PeerId>> naive_find_cycle(
    const bmatch::PreferenceInstance& inst) {
  const std::size_t n = inst.peer_count();
  std::vector<bmatch::PeerId> seq;
  std::vector<bool> used(n, false);

  const auto closes = [&](const std::vector<bmatch::PeerId>& peers) {
    const std::size_t k = peers.size();
    for (std::size_t i = 0; i < k; ++i) {
      const auto next = inst.rank_of(peers[i], peers[(i + 1) % k]);
      const auto prev = inst.rank_of(peers[i], peers[(i + k - 1) % k]);
      if (!next || !prev || *next >= *prev) return false;
    }
    return true;
  };

  std::optional<std::vector<bmatch::PeerId>> found;
  const auto extend = [&](auto&& self) -> void {
    if (found) return;
    if (seq.size() >= 3 && closes(seq)) {
      found = seq;
      return;
    }
    if (seq.size() == n) return;
    for (bmatch::PeerId next = 0; next < n; ++next) {
      if (used[next]) continue;
      // Fixing the smallest peer first avoids re-finding rotations.
      if (!seq.empty() && next < seq.front()) continue;
      seq.push_back(next);
      used[next] = true;
      self(self);
      used[next] = false;
      seq.pop_back();
      if (found) return;
    }
  };
  extend(extend);
  return found;
}

// Random valid configuration: a greedy pass over the shuffled edge list,
// taking each edge with probability 1/2 while quotas allow.
inline bmatch::Configuration random_configuration(
    const bmatch::PreferenceInstance& inst, bmatch::Rng& rng) {
  std::vector<bmatch::PeerPair> edges;
  for (bmatch::PeerId p = 0; p < inst.peer_count(); ++p) {
    for (bmatch::PeerId q : inst.neighbors_sorted(p)) {
      if (q > p) edges.emplace_back(p, q);
    }
  }
  rng.shuffle(edges);
  std::vector<int> load(inst.peer_count(), 0);
  std::vector<bmatch::PeerPair> taken;
  for (const auto& edge : edges) {
    if (load[edge.a] >= inst.quota(edge.a)) continue;
    if (load[edge.b] >= inst.quota(edge.b)) continue;
    if (rng.uniform_real() < 0.5) {
      taken.push_back(edge);
      ++load[edge.a];
      ++load[edge.b];
    }
  }
  return bmatch::Configuration(std::move(taken));
}

}  // namespace fixtures
