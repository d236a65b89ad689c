#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bmatch/analysis.hpp"
#include "bmatch/error.hpp"
#include "bmatch/instance.hpp"

namespace bmatch {

// Raised by the solver entry points when the instance has a preference
// cycle; carries one witness cycle.
class CyclicInstanceError : public Error {
 public:
  explicit CyclicInstanceError(PreferenceCycle cycle);
  const PreferenceCycle& cycle() const { return cycle_; }

 private:
  PreferenceCycle cycle_;
};

// The instance that remains once some pairs are fixed forever: each fixed
// pair consumes one unit of quota at both endpoints, fixed partners leave
// each other's lists, and peers with no capacity left vanish from all lists.
class ResidualInstance {
 public:
  ResidualInstance(const PreferenceInstance& base, Configuration fixed);

  const PreferenceInstance& base() const { return *base_; }
  const Configuration& fixed_pairs() const { return fixed_; }

  int effective_quota(PeerId p) const;
  const std::vector<PeerId>& effective_list(PeerId p) const;
  bool trivial() const;

  // Materializes the residual as a standalone instance over the same ids.
  // Peers with no residual capacity keep quota max(1, effective) and an
  // empty list so ids stay dense.
  PreferenceInstance as_instance() const;

 private:
  const PreferenceInstance* base_;
  Configuration fixed_;
  std::vector<int> effective_quotas_;
  std::vector<std::vector<PeerId>> effective_lists_;
};

ResidualInstance residual_instance(const PreferenceInstance& instance,
                                   const Configuration& fixed);

// The unique stable configuration of an acyclic instance, found by
// repeatedly fixing pairs that rank each other first in the residual.
// Throws CyclicInstanceError when a preference cycle is detected.
Configuration stable_configuration(const PreferenceInstance& instance);

// An initiative sequence: actions[i] = (actor, proposal).
struct InitiativePlan {
  std::vector<std::pair<PeerId, PeerId>> actions;
};

// A shortest-style plan from initial to the unique stable configuration of
// an acyclic instance; at most floor(quota_sum / 2) actions, each a blocking
// pair of the configuration it is applied to. Throws CyclicInstanceError on
// cyclic instances.
InitiativePlan optimal_sequence(const PreferenceInstance& instance,
                                const Configuration& initial);

}  // namespace bmatch
