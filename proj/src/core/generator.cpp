#include "bmatch/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>

#include "bmatch/analysis.hpp"
#include "bmatch/error.hpp"
#include "bmatch/rng.hpp"

namespace bmatch {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

void check_spec(const GeneratorSpec& spec) {
  if (spec.density < 0.0 || spec.density > 1.0) {
    fail(ErrorCode::invalid_argument,
         "density must lie in [0, 1], got " + std::to_string(spec.density));
  }
  if (spec.quotas.empty()) {
    if (spec.quota < 1) {
      fail(ErrorCode::invalid_argument, "quota must be >= 1, got " +
                                            std::to_string(spec.quota));
    }
  } else {
    if (spec.quotas.size() != spec.peer_count) {
      fail(ErrorCode::invalid_argument,
           "per-peer quota list has " + std::to_string(spec.quotas.size()) +
               " entries for " + std::to_string(spec.peer_count) + " peers");
    }
    for (std::size_t p = 0; p < spec.quotas.size(); ++p) {
      if (spec.quotas[p] < 1) {
        fail(ErrorCode::invalid_argument,
             "quota must be >= 1, got " + std::to_string(spec.quotas[p]) +
                 " for peer " + std::to_string(p));
      }
    }
  }
  if (spec.variant == GeneratorVariant::global && spec.marks &&
      spec.marks->size() != spec.peer_count) {
    fail(ErrorCode::invalid_argument, "marks list does not match peer count");
  }
  if (spec.variant == GeneratorVariant::symmetric) {
    if (spec.dimension < 1) {
      fail(ErrorCode::invalid_argument, "dimension must be >= 1");
    }
    if (spec.coordinates) {
      if (spec.coordinates->size() != spec.peer_count) {
        fail(ErrorCode::invalid_argument,
             "coordinate list does not match peer count");
      }
      for (const auto& point : *spec.coordinates) {
        if (point.size() != spec.dimension) {
          fail(ErrorCode::invalid_argument,
               "coordinate point does not match dimension");
        }
      }
    }
  }
  if (spec.variant == GeneratorVariant::complementary) {
    if (spec.resource_probability < 0.0 || spec.resource_probability > 1.0) {
      fail(ErrorCode::invalid_argument,
           "resource probability must lie in [0, 1]");
    }
    if (spec.resources) {
      if (spec.resources->size() != spec.peer_count) {
        fail(ErrorCode::invalid_argument,
             "resource list does not match peer count");
      }
      for (const auto& held : *spec.resources) {
        if (held.size() != spec.resource_count) {
          fail(ErrorCode::invalid_argument,
               "resource set does not match resource count");
        }
      }
    }
  }
}

std::vector<double> draw_distinct_marks(std::size_t n, Rng& rng) {
  std::vector<double> marks(n);
  std::unordered_set<double> used;
  for (std::size_t p = 0; p < n; ++p) {
    double mark = rng.uniform_real();
    while (!used.insert(mark).second) mark = rng.uniform_real();
    marks[p] = mark;
  }
  return marks;
}

double squared_distance(const std::vector<double>& x,
                        const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

PreferenceInstance generate(const GeneratorSpec& spec) {
  check_spec(spec);
  const std::size_t n = spec.peer_count;
  Rng rng(spec.seed);

  // Variant data is drawn before the edge coin flips so that a fixed seed
  // pins down the whole instance regardless of density.
  std::vector<double> marks;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<bool>> resources;
  switch (spec.variant) {
    case GeneratorVariant::global:
      marks = spec.marks ? *spec.marks : draw_distinct_marks(n, rng);
      break;
    case GeneratorVariant::symmetric:
      if (spec.coordinates) {
        points = *spec.coordinates;
      } else {
        points.assign(n, std::vector<double>(spec.dimension));
        for (auto& point : points) {
          for (auto& c : point) c = rng.uniform_real();
        }
      }
      break;
    case GeneratorVariant::complementary:
      if (spec.resources) {
        resources = *spec.resources;
      } else {
        resources.assign(n, std::vector<bool>(spec.resource_count));
        for (auto& held : resources) {
          for (std::size_t r = 0; r < spec.resource_count; ++r) {
            held[r] = rng.uniform_real() < spec.resource_probability;
          }
        }
      }
      break;
    case GeneratorVariant::uniform_random:
      break;
  }

  // One coin per unordered pair, drawn even at density 1 so the stream
  // stays aligned across densities.
  std::vector<std::vector<PeerId>> neighbors(n);
  for (PeerId p = 0; p < n; ++p) {
    for (PeerId q = p + 1; q < n; ++q) {
      if (rng.uniform_real() < spec.density) {
        neighbors[p].push_back(q);
        neighbors[q].push_back(p);
      }
    }
  }

  std::vector<std::vector<PeerId>> lists(n);
  for (PeerId p = 0; p < n; ++p) {
    auto& list = lists[p];
    list = neighbors[p];  // ascending ids; the id tie-break falls out of a
                          // stable sort
    switch (spec.variant) {
      case GeneratorVariant::global:
        std::stable_sort(list.begin(), list.end(), [&](PeerId x, PeerId y) {
          return marks[x] > marks[y];
        });
        break;
      case GeneratorVariant::symmetric:
        std::stable_sort(list.begin(), list.end(), [&](PeerId x, PeerId y) {
          const double dx = squared_distance(points[p], points[x]);
          const double dy = squared_distance(points[p], points[y]);
          if (dx != dy) return dx < dy;
          // Symmetric tie-break: order by the unordered pair identifier.
          const auto key = [p](PeerId v) {
            return std::make_pair(std::min<PeerId>(p, v),
                                  std::max<PeerId>(p, v));
          };
          return key(x) < key(y);
        });
        break;
      case GeneratorVariant::complementary: {
        const auto score = [&](PeerId q) {
          int s = 0;
          for (std::size_t r = 0; r < spec.resource_count; ++r) {
            if (resources[q][r] && !resources[p][r]) ++s;
          }
          return s;
        };
        std::vector<int> scores(n, 0);
        for (PeerId q : list) scores[q] = score(q);
        std::stable_sort(list.begin(), list.end(), [&](PeerId x, PeerId y) {
          return scores[x] > scores[y];
        });
        break;
      }
      case GeneratorVariant::uniform_random:
        rng.shuffle(list);
        break;
    }
  }

  std::vector<int> quotas =
      spec.quotas.empty() ? std::vector<int>(n, spec.quota) : spec.quotas;
  auto instance = PreferenceInstance::create(std::move(quotas),
                                             std::move(lists));

  // The paper's three classes are acyclic by design; global and symmetric
  // provably so under the tie-breaks above. Complementary acyclicity has no
  // published proof, so rather than trusting it we check and refuse to hand
  // out a cyclic instance.
  if (spec.variant == GeneratorVariant::complementary) {
    if (const auto cycle = find_preference_cycle(instance)) {
      std::string text = "complementary generation produced a preference cycle:";
      for (PeerId p : cycle->peers) text += " " + std::to_string(p);
      fail(ErrorCode::generation_failed, text);
    }
  }
  return instance;
}

}  // namespace bmatch
