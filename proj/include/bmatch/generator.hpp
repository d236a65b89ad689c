#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bmatch/instance.hpp"

namespace bmatch {

enum class GeneratorVariant {
  global,         // shared intrinsic marks, higher is better
  symmetric,      // points in space, closer is better, distances symmetric
  complementary,  // resource sets, more complementary is better
  uniform_random, // independent uniform shuffles, no structure guarantee
};

struct GeneratorSpec {
  GeneratorVariant variant = GeneratorVariant::global;
  std::size_t peer_count = 0;
  // Probability that a given peer pair becomes an acceptance edge.
  double density = 1.0;
  // Used when quotas is empty; otherwise quotas wins and must have size
  // peer_count.
  int quota = 1;
  std::vector<int> quotas;
  std::uint64_t seed = 0;

  // Optional fixed variant data; drawn from the seed when absent.
  std::optional<std::vector<double>> marks;           // global
  std::size_t dimension = 2;                          // symmetric
  std::optional<std::vector<std::vector<double>>> coordinates;
  std::size_t resource_count = 16;                    // complementary
  double resource_probability = 0.5;
  std::optional<std::vector<std::vector<bool>>> resources;
};

// Builds an instance from the spec. The global and symmetric variants are
// acyclic by construction; the complementary variant is checked after the
// fact and throws Error(generation_failed) if a preference cycle slips
// through. uniform_random may produce anything.
PreferenceInstance generate(const GeneratorSpec& spec);

}  // namespace bmatch
