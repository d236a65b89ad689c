#include "bmatch/analysis.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>

#include "bmatch/error.hpp"

namespace bmatch {

namespace {

// Per-peer mate load and worst (largest) mate rank for one configuration.
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

  // Whether p would welcome q as a new mate.
  bool wants(const PreferenceInstance& instance, PeerId p, PeerId q) const {
    if (load[p] < instance.quota(p)) return true;
    return instance.rank(p, q) < worst_rank[p];
  }
};

}  // namespace

bool is_blocking_pair(const PreferenceInstance& instance,
                      const Configuration& config, const PeerPair& pair) {
  instance.require_peer(pair.a);
  instance.require_peer(pair.b);
  if (!instance.accepts(pair.a, pair.b)) return false;
  if (config.contains(pair)) return false;
  const MateView view(instance, config);
  return view.wants(instance, pair.a, pair.b) &&
         view.wants(instance, pair.b, pair.a);
}

std::vector<PeerPair> blocking_pairs(const PreferenceInstance& instance,
                                     const Configuration& config) {
  const MateView view(instance, config);
  std::vector<PeerPair> result;
  for (PeerId p = 0; p < instance.peer_count(); ++p) {
    for (PeerId q : instance.neighbors_sorted(p)) {
      if (q <= p) continue;
      const PeerPair pair(p, q);
      if (config.contains(pair)) continue;
      if (view.wants(instance, p, q) && view.wants(instance, q, p)) {
        result.push_back(pair);
      }
    }
  }
  return result;
}

bool is_stable(const PreferenceInstance& instance,
               const Configuration& config) {
  const MateView view(instance, config);
  for (PeerId p = 0; p < instance.peer_count(); ++p) {
    for (PeerId q : instance.neighbors_sorted(p)) {
      if (q <= p) continue;
      if (config.contains(PeerPair(p, q))) continue;
      if (view.wants(instance, p, q) && view.wants(instance, q, p)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<PeerPair> loving_pairs(const PreferenceInstance& instance) {
  std::vector<PeerPair> result;
  for (PeerId p = 0; p < instance.peer_count(); ++p) {
    const auto& list = instance.list(p);
    if (list.empty()) continue;
    const PeerId q = list.front();
    if (q > p && instance.list(q).front() == p) {
      result.emplace_back(p, q);
    }
  }
  return result;
}

bool cycle_holds(const PreferenceInstance& instance,
                 const PreferenceCycle& cycle) {
  const auto& peers = cycle.peers;
  const std::size_t k = peers.size();
  if (k < 3) return false;
  std::vector<PeerId> sorted = peers;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return false;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const PeerId prev = peers[(i + k - 1) % k];
    const PeerId next = peers[(i + 1) % k];
    const auto rank_next = instance.rank_of(peers[i], next);
    const auto rank_prev = instance.rank_of(peers[i], prev);
    if (!rank_next || !rank_prev || *rank_next >= *rank_prev) return false;
  }
  return true;
}

namespace {

// Directed transition graph over arcs of the acceptance relation: there is
// an edge from arc (p, q) to arc (q, r) exactly when q prefers r to p. A
// closed walk here is equivalent to a preference cycle on peers: projecting
// the arcs of a cycle to their first endpoints gives the peer sequence, and
// any repeats in that sequence can be cut out (see shorten_cycle).
struct TransitionGraph {
  const PreferenceInstance& instance;
  std::vector<std::size_t> offset;  // offset[p] = first arc id of peer p
  std::vector<PeerId> arc_from;
  std::vector<PeerId> arc_to;
  // Rank of the arc's source within its target's list; the arc (p, q) has
  // children (q, r) for the first back_rank - 1 entries r of L(q).
  std::vector<int> back_rank;

  explicit TransitionGraph(const PreferenceInstance& inst) : instance(inst) {
    const std::size_t n = inst.peer_count();
    offset.assign(n + 1, 0);
    for (std::size_t p = 0; p < n; ++p) {
      offset[p + 1] = offset[p] + inst.degree(static_cast<PeerId>(p));
    }
    const std::size_t arcs = offset[n];
    arc_from.resize(arcs);
    arc_to.resize(arcs);
    back_rank.resize(arcs);
    for (PeerId p = 0; p < n; ++p) {
      const auto& list = inst.list(p);
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::size_t t = offset[p] + i;
        arc_from[t] = p;
        arc_to[t] = list[i];
        back_rank[t] = inst.rank(list[i], p);
      }
    }
  }

  std::size_t arc_count() const { return arc_from.size(); }
  std::size_t child_count(std::size_t t) const {
    return static_cast<std::size_t>(back_rank[t] - 1);
  }
  std::size_t child(std::size_t t, std::size_t i) const {
    return offset[arc_to[t]] + i;
  }
};

// Cuts repeated first endpoints out of a transition-graph cycle so the
// projection becomes a sequence of distinct peers. When peer x appears at
// two positions with successors y_i and y_j, the incoming arc of whichever
// occurrence has the less preferred successor also reaches the other
// occurrence, so one of the two segments between them closes into a shorter
// cycle on its own.
std::vector<std::size_t> shorten_cycle(const TransitionGraph& graph,
                                       std::vector<std::size_t> arcs) {
  for (;;) {
    const std::size_t k = arcs.size();
    std::ptrdiff_t dup_i = -1, dup_j = -1;
    {
      std::vector<std::pair<PeerId, std::size_t>> seen;
      seen.reserve(k);
      for (std::size_t i = 0; i < k; ++i) {
        seen.emplace_back(graph.arc_from[arcs[i]], i);
      }
      std::sort(seen.begin(), seen.end());
      for (std::size_t i = 0; i + 1 < k; ++i) {
        if (seen[i].first == seen[i + 1].first) {
          dup_i = static_cast<std::ptrdiff_t>(
              std::min(seen[i].second, seen[i + 1].second));
          dup_j = static_cast<std::ptrdiff_t>(
              std::max(seen[i].second, seen[i + 1].second));
          break;
        }
      }
    }
    if (dup_i < 0) return arcs;

    const std::size_t i = static_cast<std::size_t>(dup_i);
    const std::size_t j = static_cast<std::size_t>(dup_j);
    const PeerId x = graph.arc_from[arcs[i]];
    const PeerId yi = graph.arc_to[arcs[i]];
    const PeerId yj = graph.arc_to[arcs[j]];
    std::vector<std::size_t> next;
    if (graph.instance.prefers(x, yi, yj)) {
      // Predecessor of position j accepts arc i's target as well; keep the
      // segment [i, j).
      next.assign(arcs.begin() + i, arcs.begin() + j);
    } else {
      // Keep the complement segment [j, k) + [0, i).
      next.assign(arcs.begin() + j, arcs.end());
      next.insert(next.end(), arcs.begin(), arcs.begin() + i);
    }
    arcs = std::move(next);
  }
}

}  // namespace

std::optional<PreferenceCycle> find_preference_cycle(
    const PreferenceInstance& instance) {
  const TransitionGraph graph(instance);
  const std::size_t arcs = graph.arc_count();
  // 0 = unvisited, 1 = on the current path, 2 = done.
  std::vector<unsigned char> color(arcs, 0);
  std::vector<std::size_t> next_child(arcs, 0);
  std::vector<std::size_t> path;
  std::vector<std::size_t> pos_in_path(arcs, 0);

  for (std::size_t root = 0; root < arcs; ++root) {
    if (color[root] != 0) continue;
    path.push_back(root);
    color[root] = 1;
    pos_in_path[root] = 0;
    next_child[root] = 0;
    while (!path.empty()) {
      const std::size_t t = path.back();
      if (next_child[t] < graph.child_count(t)) {
        const std::size_t c = graph.child(t, next_child[t]++);
        if (color[c] == 0) {
          color[c] = 1;
          pos_in_path[c] = path.size();
          next_child[c] = 0;
          path.push_back(c);
        } else if (color[c] == 1) {
          // Closed walk found: arcs from c's position to the path top.
          std::vector<std::size_t> cycle(path.begin() + pos_in_path[c],
                                         path.end());
          cycle = shorten_cycle(graph, std::move(cycle));
          PreferenceCycle result;
          result.peers.reserve(cycle.size());
          for (std::size_t arc : cycle) {
            result.peers.push_back(graph.arc_from[arc]);
          }
          // Canonical rotation: smallest peer first.
          const auto min_it =
              std::min_element(result.peers.begin(), result.peers.end());
          std::rotate(result.peers.begin(), min_it, result.peers.end());
          if (!cycle_holds(instance, result)) {
            throw Error(ErrorCode::internal_error,
                        "cycle extraction produced an invalid cycle");
          }
          return result;
        }
      } else {
        color[t] = 2;
        path.pop_back();
      }
    }
  }
  return std::nullopt;
}

std::vector<Configuration> brute_force_stable_configs(
    const PreferenceInstance& instance, const OracleGuard& guard) {
  if (instance.peer_count() > guard.max_peers ||
      instance.quota_sum() > guard.max_quota_sum) {
    throw Error(ErrorCode::guard_exceeded,
                "instance exceeds exhaustive-search guard (" +
                    std::to_string(instance.peer_count()) + " peers, quota sum " +
                    std::to_string(instance.quota_sum()) + "; guard allows " +
                    std::to_string(guard.max_peers) + " / " +
                    std::to_string(guard.max_quota_sum) + ")");
  }

  struct Edge {
    PeerId a, b;
    int rank_ab, rank_ba;
  };
  std::vector<Edge> edges;
  for (PeerId p = 0; p < instance.peer_count(); ++p) {
    for (PeerId q : instance.neighbors_sorted(p)) {
      if (q > p) {
        edges.push_back({p, q, instance.rank(p, q), instance.rank(q, p)});
      }
    }
  }

  const std::size_t n = instance.peer_count();
  std::vector<int> load(n, 0);
  std::vector<char> chosen(edges.size(), 0);
  std::vector<int> worst(n, 0);
  std::vector<Configuration> found;

  auto stable_leaf = [&]() {
    std::fill(worst.begin(), worst.end(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!chosen[e]) continue;
      worst[edges[e].a] = std::max(worst[edges[e].a], edges[e].rank_ab);
      worst[edges[e].b] = std::max(worst[edges[e].b], edges[e].rank_ba);
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (chosen[e]) continue;
      const Edge& edge = edges[e];
      const bool a_wants =
          load[edge.a] < instance.quota(edge.a) || edge.rank_ab < worst[edge.a];
      const bool b_wants =
          load[edge.b] < instance.quota(edge.b) || edge.rank_ba < worst[edge.b];
      if (a_wants && b_wants) return false;
    }
    return true;
  };

  auto search = [&](auto&& self, std::size_t e) -> void {
    if (e == edges.size()) {
      if (stable_leaf()) {
        std::vector<PeerPair> pairs;
        for (std::size_t i = 0; i < edges.size(); ++i) {
          if (chosen[i]) pairs.emplace_back(edges[i].a, edges[i].b);
        }
        found.emplace_back(std::move(pairs));
      }
      return;
    }
    const Edge& edge = edges[e];
    if (load[edge.a] < instance.quota(edge.a) &&
        load[edge.b] < instance.quota(edge.b)) {
      chosen[e] = 1;
      ++load[edge.a];
      ++load[edge.b];
      self(self, e + 1);
      --load[edge.a];
      --load[edge.b];
      chosen[e] = 0;
    }
    self(self, e + 1);
  };
  search(search, 0);

  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace bmatch
