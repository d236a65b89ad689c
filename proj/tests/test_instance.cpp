#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bmatch/error.hpp"
#include "bmatch/generator.hpp"
#include "bmatch/instance.hpp"
#include "bmatch/json_io.hpp"
#include "bmatch/rng.hpp"
#include "support/fixtures.hpp"

using namespace bmatch;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::internal_error;
}

}  // namespace

TEST_CASE("peer pair normalizes and rejects loops") {
  const PeerPair pair(4, 1);
  CHECK(pair.a == 1);
  CHECK(pair.b == 4);
  CHECK(pair.contains(4));
  CHECK(pair.other(1) == 4);
  CHECK(PeerPair(1, 4) == pair);
  CHECK_THROWS_AS(PeerPair(3, 3), Error);
}

TEST_CASE("triangle instance exposes quotas, ranks, and counters") {
  const auto inst = fixtures::triangle();
  CHECK(inst.peer_count() == 3);
  CHECK(inst.edge_count() == 3);
  CHECK(inst.quota_sum() == 3);
  CHECK(inst.quota(1) == 1);
  CHECK(inst.degree(0) == 2);
  CHECK(inst.rank(0, 1) == 1);
  CHECK(inst.rank(0, 2) == 2);
  CHECK(inst.rank(2, 0) == 1);
  CHECK(inst.accepts(1, 2));
  CHECK(inst.prefers(0, 1, 2));
  CHECK_FALSE(inst.prefers(0, 2, 1));
  CHECK_FALSE(inst.trivial());
  CHECK(inst == fixtures::triangle());
}

TEST_CASE("rank_of is empty off the acceptance graph") {
  const auto inst = fixtures::isolated_pair();
  CHECK(inst.trivial());
  CHECK_FALSE(inst.rank_of(0, 1).has_value());
  CHECK_THROWS_AS(inst.rank(0, 1), Error);
  CHECK_THROWS_AS(inst.quota(5), Error);
}

TEST_CASE("construction rejects malformed inputs") {
  CHECK(code_of([] {
          PreferenceInstance::create({1, 1}, {{1}, {}});
        }) == ErrorCode::validation);  // asymmetric
  CHECK(code_of([] {
          PreferenceInstance::create({1, 1}, {{1, 1}, {0}});
        }) == ErrorCode::validation);  // duplicate entry
  CHECK(code_of([] {
          PreferenceInstance::create({1, 1}, {{0}, {}});
        }) == ErrorCode::validation);  // self in own list
  CHECK(code_of([] {
          PreferenceInstance::create({0, 1}, {{}, {}});
        }) == ErrorCode::validation);  // non-positive quota
  CHECK(code_of([] {
          PreferenceInstance::create({1, 1}, {{7}, {}});
        }) == ErrorCode::validation);  // unknown id
  CHECK(code_of([] {
          PreferenceInstance::create({1, 1, 1}, {{}, {}});
        }) == ErrorCode::invalid_argument);  // size mismatch
}

TEST_CASE("from_maps requires dense ids") {
  const std::map<PeerId, std::vector<PeerId>> lists = {{0, {2}}, {2, {0}}};
  const std::map<PeerId, int> quotas = {{0, 1}, {2, 1}};
  CHECK(code_of([&] { PreferenceInstance::from_maps(quotas, lists); }) ==
        ErrorCode::validation);
}

TEST_CASE("configuration keeps sorted unique pairs") {
  Configuration config({PeerPair(2, 3), PeerPair(0, 1), PeerPair(3, 2)});
  CHECK(config.size() == 2);
  CHECK(config.pairs()[0] == PeerPair(0, 1));
  CHECK(config.contains(PeerPair(2, 3)));
  CHECK_FALSE(config.insert(PeerPair(0, 1)));
  CHECK(config.insert(PeerPair(1, 2)));
  CHECK(config.erase(PeerPair(0, 1)));
  CHECK_FALSE(config.erase(PeerPair(0, 1)));
  CHECK(config.count_at(2) == 2);
  CHECK(config.mates(2) == std::vector<PeerId>{1, 3});
  CHECK(Configuration{} < config);
}

TEST_CASE("configuration validation enforces edges and quotas") {
  const auto inst = fixtures::triangle();
  validate_configuration(inst, fixtures::cfg({{0, 1}}));
  validate_configuration(inst, Configuration{});
  CHECK(code_of([&] {
          validate_configuration(inst, fixtures::cfg({{0, 1}, {0, 2}}));
        }) == ErrorCode::validation);  // quota 1 exceeded at 0
  const auto sparse = fixtures::isolated_pair();
  CHECK(code_of([&] {
          validate_configuration(sparse, fixtures::cfg({{0, 1}}));
        }) == ErrorCode::validation);  // not an edge
}

TEST_CASE("instance serialization round-trips canonically") {
  const auto inst = fixtures::triangle();
  const std::string text = serialize_instance(inst);
  CHECK(text ==
        "{\"peers\":[{\"id\":0,\"quota\":1,\"prefs\":[1,2]},"
        "{\"id\":1,\"quota\":1,\"prefs\":[0,2]},"
        "{\"id\":2,\"quota\":1,\"prefs\":[0,1]}]}\n");
  const auto parsed = parse_instance(text);
  CHECK(parsed == inst);
  CHECK(serialize_instance(parsed) == text);
}

TEST_CASE("serialization covers empty and isolated peers") {
  const auto empty = PreferenceInstance::create({}, {});
  CHECK(serialize_instance(empty) == "{\"peers\":[]}\n");
  CHECK(parse_instance(serialize_instance(empty)) == empty);

  const auto lonely = PreferenceInstance::create({2, 1, 1}, {{}, {2}, {1}});
  const auto roundtrip = parse_instance(serialize_instance(lonely));
  CHECK(roundtrip == lonely);
  CHECK(roundtrip.degree(0) == 0);
  CHECK(roundtrip.quota(0) == 2);
}

TEST_CASE("parsing accepts peers listed out of id order") {
  const std::string text =
      "{\"peers\":[{\"id\":1,\"quota\":1,\"prefs\":[0]},"
      "{\"id\":0,\"quota\":1,\"prefs\":[1]}]}";
  const auto inst = parse_instance(text);
  CHECK(inst.peer_count() == 2);
  CHECK(inst.rank(0, 1) == 1);
}

TEST_CASE("parse errors name the problem") {
  const auto code_and_message = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const Error& e) {
      return std::pair<ErrorCode, std::string>(e.code(), e.what());
    }
    FAIL("expected an Error");
    return std::pair<ErrorCode, std::string>(ErrorCode::internal_error, "");
  };

  CHECK(code_and_message("not json").first == ErrorCode::parse_error);
  CHECK(code_and_message("{}").first == ErrorCode::parse_error);
  CHECK(code_and_message("{\"peers\":[{\"id\":0}]}") ==
        std::pair<ErrorCode, std::string>(ErrorCode::parse_error,
                                          "peer 0 missing \"quota\""));
  CHECK(code_and_message(
            "{\"peers\":[{\"id\":0,\"quota\":1,\"prefs\":[99]}]}")
            .first == ErrorCode::validation);
  CHECK(code_and_message(
            "{\"peers\":[{\"id\":-1,\"quota\":1,\"prefs\":[]}]}")
            .first == ErrorCode::parse_error);
  CHECK(code_and_message(
            "{\"peers\":[{\"id\":0,\"quota\":1,\"prefs\":[]},"
            "{\"id\":0,\"quota\":1,\"prefs\":[]}]}")
            .first == ErrorCode::parse_error);
  // Missing dense id 1 out of 0..2.
  CHECK(code_and_message(
            "{\"peers\":[{\"id\":0,\"quota\":1,\"prefs\":[]},"
            "{\"id\":2,\"quota\":1,\"prefs\":[]}]}")
            .first == ErrorCode::validation);
}

TEST_CASE("configuration serialization round-trips") {
  const auto inst = fixtures::four_global();
  const auto config = fixtures::cfg({{2, 3}, {0, 1}});
  const std::string text = serialize_configuration(config);
  CHECK(text == "{\"pairs\":[[0,1],[2,3]]}\n");
  CHECK(parse_configuration(inst, text) == config);
  CHECK(parse_configuration(inst, "{\"pairs\":[]}") == Configuration{});
  CHECK_THROWS_AS(parse_configuration(inst, "{\"pairs\":[[0,1],[1,0]]}"),
                  Error);  // duplicate
  CHECK_THROWS_AS(parse_configuration(inst, "{\"pairs\":[[0,0]]}"), Error);
  CHECK_THROWS_AS(parse_configuration(inst, "{\"pairs\":[[0,1],[0,2]]}"),
                  Error);  // quota
}

TEST_CASE("global generation follows descending marks") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::global;
  spec.peer_count = 3;
  spec.quota = 1;
  spec.marks = std::vector<double>{3.0, 2.0, 1.0};
  const auto inst = generate(spec);
  CHECK(inst == fixtures::triangle());
}

TEST_CASE("symmetric generation follows ascending distance") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::symmetric;
  spec.peer_count = 3;
  spec.dimension = 1;
  spec.coordinates = std::vector<std::vector<double>>{{0.0}, {1.0}, {3.0}};
  const auto inst = generate(spec);
  CHECK(inst.list(0) == std::vector<PeerId>{1, 2});
  CHECK(inst.list(1) == std::vector<PeerId>{0, 2});
  CHECK(inst.list(2) == std::vector<PeerId>{1, 0});
}

TEST_CASE("complementary generation counts missing resources") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::complementary;
  spec.peer_count = 3;
  spec.resource_count = 2;
  spec.resources = std::vector<std::vector<bool>>{
      {true, false}, {false, true}, {true, true}};
  const auto inst = generate(spec);
  CHECK(inst.list(0) == std::vector<PeerId>{1, 2});
  CHECK(inst.list(1) == std::vector<PeerId>{0, 2});
  CHECK(inst.list(2) == std::vector<PeerId>{0, 1});  // all scores 0, id order
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::uniform_random;
  spec.peer_count = 12;
  spec.density = 0.7;
  spec.quota = 2;
  spec.seed = 11;
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a == b);
  spec.seed = 12;
  const auto c = generate(spec);
  CHECK(a != c);
}

TEST_CASE("generated instances satisfy list invariants at any density") {
  for (const auto variant :
       {GeneratorVariant::global, GeneratorVariant::symmetric,
        GeneratorVariant::complementary, GeneratorVariant::uniform_random}) {
    for (const double density : {0.0, 0.4, 1.0}) {
      GeneratorSpec spec;
      spec.variant = variant;
      spec.peer_count = 9;
      spec.density = density;
      spec.quota = 2;
      spec.seed = 500 + static_cast<int>(variant);
      const auto inst = generate(spec);  // create() enforces the invariants
      CHECK(inst.peer_count() == 9);
      if (density == 0.0) CHECK(inst.edge_count() == 0);
      if (density == 1.0) CHECK(inst.edge_count() == 9 * 8 / 2);
    }
  }
}

TEST_CASE("global preferences agree across observers") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::global;
  spec.peer_count = 10;
  spec.density = 0.6;
  spec.seed = 77;
  const auto inst = generate(spec);
  // Whenever two peers both rank the same q, r, they order them alike.
  for (PeerId p = 0; p < inst.peer_count(); ++p) {
    for (PeerId o = 0; o < inst.peer_count(); ++o) {
      for (PeerId q = 0; q < inst.peer_count(); ++q) {
        for (PeerId r = q + 1; r < inst.peer_count(); ++r) {
          if (!inst.accepts(p, q) || !inst.accepts(p, r)) continue;
          if (!inst.accepts(o, q) || !inst.accepts(o, r)) continue;
          CHECK(inst.prefers(p, q, r) == inst.prefers(o, q, r));
        }
      }
    }
  }
}

TEST_CASE("per-peer quotas are honored") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::global;
  spec.peer_count = 4;
  spec.quotas = {3, 1, 2, 1};
  spec.seed = 5;
  const auto inst = generate(spec);
  CHECK(inst.quota(0) == 3);
  CHECK(inst.quota(2) == 2);
  CHECK(inst.quota_sum() == 7);
}

TEST_CASE("generator rejects bad specs") {
  GeneratorSpec spec;
  spec.peer_count = 3;
  spec.quota = 0;
  CHECK(code_of([&] { generate(spec); }) == ErrorCode::invalid_argument);
  spec.quota = 1;
  spec.density = 1.5;
  CHECK(code_of([&] { generate(spec); }) == ErrorCode::invalid_argument);
  spec.density = 1.0;
  spec.quotas = {1, 1};
  CHECK(code_of([&] { generate(spec); }) == ErrorCode::invalid_argument);
}

TEST_CASE("degenerate sizes are valid") {
  GeneratorSpec spec;
  spec.peer_count = 0;
  CHECK(generate(spec).peer_count() == 0);
  spec.peer_count = 1;
  const auto one = generate(spec);
  CHECK(one.peer_count() == 1);
  CHECK(one.trivial());
}

TEST_CASE("rng produces bounded uniform draws and fair shuffles") {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.uniform_index(7) < 7);
    const double x = rng.uniform_real();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  std::vector<int> values{1, 2, 3, 4, 5};
  rng.shuffle(values);
  std::vector<int> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5});

  Rng a(4), b(4);
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());
}
