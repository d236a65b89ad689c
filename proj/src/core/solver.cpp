#include "bmatch/solver.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <utility>

#include "bmatch/dynamics.hpp"

namespace bmatch {

namespace {

std::string cycle_text(const PreferenceCycle& cycle) {
  std::string text = "instance has a preference cycle:";
  for (PeerId p : cycle.peers) text += " " + std::to_string(p);
  return text;
}

// Loving-pair peeling over the shrinking residual. Heads advance lazily past
// fixed partners and dead peers; the candidate set holds every pair that was
// mutual-first at some point, revalidated when popped, so the
// lexicographically smallest valid loving pair is always fixed next.
class PeelEngine {
 public:
  explicit PeelEngine(const PreferenceInstance& instance)
      : instance_(instance),
        eff_quota_(instance.peer_count()),
        head_(instance.peer_count(), 0),
        fixed_partners_(instance.peer_count()) {
    for (PeerId p = 0; p < instance.peer_count(); ++p) {
      eff_quota_[p] = instance.quota(p);
    }
  }

  Configuration run(const std::function<void(PeerId, PeerId)>& on_fix) {
    for (PeerId p = 0; p < instance_.peer_count(); ++p) consider(p);
    while (!candidates_.empty()) {
      const PeerPair pair = *candidates_.begin();
      candidates_.erase(candidates_.begin());
      if (!mutual_first(pair)) continue;  // stale candidate
      fix(pair, on_fix);
    }
    // Theorem territory: an acyclic residual with any surviving entry has a
    // loving pair, so running out of candidates means the residual is
    // trivial. Anything else is a bug, not an input condition.
    for (PeerId p = 0; p < instance_.peer_count(); ++p) {
      if (eff_quota_[p] > 0 && head_target(p)) {
        throw Error(ErrorCode::internal_error,
                    "loving-pair peeling stalled on a non-trivial residual");
      }
    }
    return fixed_;
  }

 private:
  bool dead(PeerId p) const { return eff_quota_[p] == 0; }

  bool is_fixed_partner(PeerId p, PeerId q) const {
    const auto& partners = fixed_partners_[p];
    return std::find(partners.begin(), partners.end(), q) != partners.end();
  }

  // First entry of p's list that is neither dead nor already fixed with p.
  std::optional<PeerId> head_target(PeerId p) {
    const auto& list = instance_.list(p);
    while (head_[p] < list.size()) {
      const PeerId q = list[head_[p]];
      if (!dead(q) && !is_fixed_partner(p, q)) return q;
      ++head_[p];
    }
    return std::nullopt;
  }

  void consider(PeerId p) {
    if (dead(p)) return;
    const auto target = head_target(p);
    if (!target) return;
    if (head_target(*target) == p) candidates_.insert(PeerPair(p, *target));
  }

  bool mutual_first(const PeerPair& pair) {
    if (dead(pair.a) || dead(pair.b)) return false;
    return head_target(pair.a) == pair.b && head_target(pair.b) == pair.a;
  }

  void fix(const PeerPair& pair, const std::function<void(PeerId, PeerId)>& on_fix) {
    fixed_.insert(pair);
    if (on_fix) on_fix(pair.a, pair.b);
    fixed_partners_[pair.a].push_back(pair.b);
    fixed_partners_[pair.b].push_back(pair.a);
    --eff_quota_[pair.a];
    --eff_quota_[pair.b];
    for (PeerId e : {pair.a, pair.b}) {
      if (dead(e)) {
        // Every neighbor whose head rested on e must move on.
        for (PeerId r : instance_.list(e)) {
          if (!dead(r)) consider(r);
        }
      } else {
        consider(e);
      }
    }
  }

  const PreferenceInstance& instance_;
  std::vector<int> eff_quota_;
  std::vector<std::size_t> head_;
  std::vector<std::vector<PeerId>> fixed_partners_;
  std::set<PeerPair> candidates_;
  Configuration fixed_;
};

void require_acyclic(const PreferenceInstance& instance) {
  if (auto cycle = find_preference_cycle(instance)) {
    throw CyclicInstanceError(std::move(*cycle));
  }
}

}  // namespace

CyclicInstanceError::CyclicInstanceError(PreferenceCycle cycle)
    : Error(ErrorCode::cyclic_instance, cycle_text(cycle)),
      cycle_(std::move(cycle)) {}

ResidualInstance::ResidualInstance(const PreferenceInstance& base,
                                   Configuration fixed)
    : base_(&base), fixed_(std::move(fixed)) {
  validate_configuration(base, fixed_);
  const std::size_t n = base.peer_count();
  effective_quotas_.resize(n);
  for (PeerId p = 0; p < n; ++p) {
    effective_quotas_[p] = base.quota(p) - fixed_.count_at(p);
  }
  effective_lists_.resize(n);
  for (PeerId p = 0; p < n; ++p) {
    if (effective_quotas_[p] == 0) continue;
    for (PeerId q : base.list(p)) {
      if (effective_quotas_[q] == 0) continue;
      if (fixed_.contains(PeerPair(p, q))) continue;
      effective_lists_[p].push_back(q);
    }
  }
}

int ResidualInstance::effective_quota(PeerId p) const {
  base_->require_peer(p);
  return effective_quotas_[p];
}

const std::vector<PeerId>& ResidualInstance::effective_list(PeerId p) const {
  base_->require_peer(p);
  return effective_lists_[p];
}

bool ResidualInstance::trivial() const {
  return std::all_of(effective_lists_.begin(), effective_lists_.end(),
                     [](const auto& list) { return list.empty(); });
}

PreferenceInstance ResidualInstance::as_instance() const {
  std::vector<int> quotas(effective_quotas_.size());
  for (std::size_t p = 0; p < quotas.size(); ++p) {
    quotas[p] = std::max(1, effective_quotas_[p]);
  }
  return PreferenceInstance::create(std::move(quotas), effective_lists_);
}

ResidualInstance residual_instance(const PreferenceInstance& instance,
                                   const Configuration& fixed) {
  return ResidualInstance(instance, fixed);
}

Configuration stable_configuration(const PreferenceInstance& instance) {
  require_acyclic(instance);
  PeelEngine engine(instance);
  return engine.run(nullptr);
}

InitiativePlan optimal_sequence(const PreferenceInstance& instance,
                                const Configuration& initial) {
  require_acyclic(instance);
  validate_configuration(instance, initial);

  InitiativePlan plan;
  Configuration current = initial;
  PeelEngine engine(instance);
  const Configuration target = engine.run([&](PeerId a, PeerId b) {
    const PeerPair pair(a, b);
    if (current.contains(pair)) return;  // inherited from the start, free
    plan.actions.emplace_back(a, b);
    current = apply_initiative(instance, current, a, b).first;
  });

  if (current != target) {
    throw Error(ErrorCode::internal_error,
                "replaying the initiative plan missed the stable configuration");
  }
  return plan;
}

}  // namespace bmatch
