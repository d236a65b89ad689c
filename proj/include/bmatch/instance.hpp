#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace bmatch {

using PeerId = std::uint32_t;

// Unordered pair of distinct peers, stored with a < b.
struct PeerPair {
  PeerId a;
  PeerId b;

  PeerPair(PeerId x, PeerId y);

  bool contains(PeerId p) const { return p == a || p == b; }

  // The endpoint that is not p. Requires contains(p).
  PeerId other(PeerId p) const { return p == a ? b : a; }

  auto operator<=>(const PeerPair&) const = default;
};

// A b-matching preference instance: peers 0..n-1, each with a quota and a
// strictly ordered preference list over a subset of the other peers.
// Acceptance is mutual by construction: q appears in p's list iff p appears
// in q's list.
class PreferenceInstance {
 public:
  // quotas[p] is the quota of peer p; lists[p] its preference list, best
  // first. Throws Error on malformed input (bad ids, self-entries,
  // duplicates, non-mutual acceptance, quota < 1).
  static PreferenceInstance create(std::vector<int> quotas,
                                   std::vector<std::vector<PeerId>> lists);

  // Same validation, but from keyed maps; ids must be exactly 0..n-1.
  static PreferenceInstance from_maps(
      const std::map<PeerId, int>& quotas,
      const std::map<PeerId, std::vector<PeerId>>& lists);

  std::size_t peer_count() const { return quotas_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  int quota_sum() const { return quota_sum_; }

  int quota(PeerId p) const;
  const std::vector<PeerId>& list(PeerId p) const;
  std::size_t degree(PeerId p) const { return list(p).size(); }
  const std::vector<PeerId>& neighbors_sorted(PeerId p) const;

  bool valid_peer(PeerId p) const { return p < quotas_.size(); }
  void require_peer(PeerId p) const;

  // Whether {p, q} is an edge of the acceptance graph.
  bool accepts(PeerId p, PeerId q) const;

  // 1-based position of q in p's list; empty if q is not acceptable to p.
  std::optional<int> rank_of(PeerId p, PeerId q) const;

  // Like rank_of but requires acceptance.
  int rank(PeerId p, PeerId q) const;

  // Whether p ranks q strictly above r. Requires both acceptable to p.
  bool prefers(PeerId p, PeerId q, PeerId r) const;

  // No edges at all.
  bool trivial() const { return edge_count_ == 0; }

  bool operator==(const PreferenceInstance&) const = default;

 private:
  PreferenceInstance() = default;
  void index();

  std::vector<int> quotas_;
  std::vector<std::vector<PeerId>> lists_;
  // Parallel to lists_: neighbors in ascending id order, and ranks_by_id
  // aligned with sorted_neighbors_ for O(log) rank lookup.
  std::vector<std::vector<PeerId>> sorted_neighbors_;
  std::vector<std::vector<int>> sorted_ranks_;
  std::size_t edge_count_ = 0;
  int quota_sum_ = 0;
};

// A set of matched pairs. Kept sorted and duplicate-free; quota feasibility
// is checked against a specific instance by validate_configuration.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<PeerPair> pairs);

  const std::vector<PeerPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  bool contains(const PeerPair& pair) const;
  // Returns false if the pair was already present / absent.
  bool insert(const PeerPair& pair);
  bool erase(const PeerPair& pair);

  // Number of pairs involving p (p's mates under this configuration).
  int count_at(PeerId p) const;
  std::vector<PeerId> mates(PeerId p) const;

  auto operator<=>(const Configuration&) const = default;

 private:
  std::vector<PeerPair> pairs_;
};

// Throws Error unless every pair is an acceptance edge and every peer is
// within quota.
void validate_configuration(const PreferenceInstance& instance,
                            const Configuration& config);

}  // namespace bmatch
