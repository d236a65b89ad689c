#include "bmatch/instance.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>

#include "bmatch/error.hpp"

namespace bmatch {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace

PeerPair::PeerPair(PeerId x, PeerId y) : a(std::min(x, y)), b(std::max(x, y)) {
  if (x == y) {
    fail(ErrorCode::invalid_argument,
         "pair endpoints must differ, got (" + std::to_string(x) + ", " +
             std::to_string(y) + ")");
  }
}

PreferenceInstance PreferenceInstance::create(
    std::vector<int> quotas, std::vector<std::vector<PeerId>> lists) {
  if (quotas.size() != lists.size()) {
    fail(ErrorCode::invalid_argument,
         "quota count " + std::to_string(quotas.size()) +
             " does not match list count " + std::to_string(lists.size()));
  }
  const std::size_t n = quotas.size();
  for (std::size_t p = 0; p < n; ++p) {
    if (quotas[p] < 1) {
      fail(ErrorCode::validation, "peer " + std::to_string(p) +
                                      " has quota " +
                                      std::to_string(quotas[p]) + ", need >= 1");
    }
    std::unordered_set<PeerId> seen;
    for (PeerId q : lists[p]) {
      if (q >= n) {
        fail(ErrorCode::validation, "peer " + std::to_string(p) +
                                        " lists unknown peer " +
                                        std::to_string(q));
      }
      if (q == p) {
        fail(ErrorCode::validation,
             "peer " + std::to_string(p) + " lists itself");
      }
      if (!seen.insert(q).second) {
        fail(ErrorCode::validation, "peer " + std::to_string(p) +
                                        " lists peer " + std::to_string(q) +
                                        " twice");
      }
    }
  }
  // Mutual acceptance: membership must be symmetric.
  std::vector<std::unordered_set<PeerId>> membership(n);
  for (std::size_t p = 0; p < n; ++p) {
    membership[p].insert(lists[p].begin(), lists[p].end());
  }
  for (std::size_t p = 0; p < n; ++p) {
    for (PeerId q : lists[p]) {
      if (!membership[q].count(static_cast<PeerId>(p))) {
        fail(ErrorCode::validation,
             "peer " + std::to_string(p) + " lists peer " + std::to_string(q) +
                 " but not vice versa");
      }
    }
  }

  PreferenceInstance instance;
  instance.quotas_ = std::move(quotas);
  instance.lists_ = std::move(lists);
  instance.index();
  return instance;
}

PreferenceInstance PreferenceInstance::from_maps(
    const std::map<PeerId, int>& quotas,
    const std::map<PeerId, std::vector<PeerId>>& lists) {
  const std::size_t n = quotas.size();
  std::vector<int> quota_vec(n);
  std::vector<std::vector<PeerId>> list_vec(n);
  PeerId expected = 0;
  for (const auto& [id, quota] : quotas) {
    if (id != expected) {
      fail(ErrorCode::validation,
           "peer ids must be exactly 0..n-1, missing " +
               std::to_string(expected));
    }
    quota_vec[id] = quota;
    ++expected;
  }
  for (const auto& [id, list] : lists) {
    if (id >= n) {
      fail(ErrorCode::validation,
           "preference list for unknown peer " + std::to_string(id));
    }
    list_vec[id] = list;
  }
  return create(std::move(quota_vec), std::move(list_vec));
}

void PreferenceInstance::index() {
  const std::size_t n = quotas_.size();
  sorted_neighbors_.assign(n, {});
  sorted_ranks_.assign(n, {});
  edge_count_ = 0;
  quota_sum_ = 0;
  for (std::size_t p = 0; p < n; ++p) {
    quota_sum_ += quotas_[p];
    const auto& list = lists_[p];
    std::vector<std::pair<PeerId, int>> by_id;
    by_id.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      by_id.emplace_back(list[i], static_cast<int>(i) + 1);
    }
    std::sort(by_id.begin(), by_id.end());
    sorted_neighbors_[p].reserve(by_id.size());
    sorted_ranks_[p].reserve(by_id.size());
    for (const auto& [q, r] : by_id) {
      sorted_neighbors_[p].push_back(q);
      sorted_ranks_[p].push_back(r);
    }
    edge_count_ += list.size();
  }
  edge_count_ /= 2;
}

int PreferenceInstance::quota(PeerId p) const {
  require_peer(p);
  return quotas_[p];
}

const std::vector<PeerId>& PreferenceInstance::list(PeerId p) const {
  require_peer(p);
  return lists_[p];
}

const std::vector<PeerId>& PreferenceInstance::neighbors_sorted(PeerId p) const {
  require_peer(p);
  return sorted_neighbors_[p];
}

void PreferenceInstance::require_peer(PeerId p) const {
  if (!valid_peer(p)) {
    fail(ErrorCode::invalid_argument,
         "peer id " + std::to_string(p) + " out of range, have " +
             std::to_string(quotas_.size()) + " peers");
  }
}

bool PreferenceInstance::accepts(PeerId p, PeerId q) const {
  return rank_of(p, q).has_value();
}

std::optional<int> PreferenceInstance::rank_of(PeerId p, PeerId q) const {
  require_peer(p);
  require_peer(q);
  const auto& neighbors = sorted_neighbors_[p];
  const auto it = std::lower_bound(neighbors.begin(), neighbors.end(), q);
  if (it == neighbors.end() || *it != q) return std::nullopt;
  return sorted_ranks_[p][static_cast<std::size_t>(it - neighbors.begin())];
}

int PreferenceInstance::rank(PeerId p, PeerId q) const {
  const auto r = rank_of(p, q);
  if (!r) {
    fail(ErrorCode::invalid_argument,
         "peer " + std::to_string(p) + " does not accept peer " +
             std::to_string(q));
  }
  return *r;
}

bool PreferenceInstance::prefers(PeerId p, PeerId q, PeerId r) const {
  return rank(p, q) < rank(p, r);
}

Configuration::Configuration(std::vector<PeerPair> pairs)
    : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool Configuration::contains(const PeerPair& pair) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), pair);
}

bool Configuration::insert(const PeerPair& pair) {
  const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), pair);
  if (it != pairs_.end() && *it == pair) return false;
  pairs_.insert(it, pair);
  return true;
}

bool Configuration::erase(const PeerPair& pair) {
  const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), pair);
  if (it == pairs_.end() || *it != pair) return false;
  pairs_.erase(it);
  return true;
}

int Configuration::count_at(PeerId p) const {
  int count = 0;
  for (const auto& pair : pairs_) {
    if (pair.contains(p)) ++count;
  }
  return count;
}

std::vector<PeerId> Configuration::mates(PeerId p) const {
  std::vector<PeerId> result;
  for (const auto& pair : pairs_) {
    if (pair.contains(p)) result.push_back(pair.other(p));
  }
  return result;
}

void validate_configuration(const PreferenceInstance& instance,
                            const Configuration& config) {
  std::vector<int> load(instance.peer_count(), 0);
  for (const auto& pair : config.pairs()) {
    instance.require_peer(pair.a);
    instance.require_peer(pair.b);
    if (!instance.accepts(pair.a, pair.b)) {
      throw Error(ErrorCode::validation,
                  "pair (" + std::to_string(pair.a) + ", " +
                      std::to_string(pair.b) +
                      ") is not an acceptance edge");
    }
    ++load[pair.a];
    ++load[pair.b];
  }
  for (PeerId p = 0; p < instance.peer_count(); ++p) {
    if (load[p] > instance.quota(p)) {
      throw Error(ErrorCode::validation,
                  "peer " + std::to_string(p) + " has " +
                      std::to_string(load[p]) + " mates but quota " +
                      std::to_string(instance.quota(p)));
    }
  }
}

}  // namespace bmatch
