#include <numeric>
#include <random>

#include "cwac/conjsynth.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwac;

namespace {

// Least N with p*n representable for all n >= N, by a reachability table.
Count brute_threshold(const std::vector<Count>& heights, Count p) {
  const Count limit = 4000;
  std::vector<bool> ok(static_cast<std::size_t>(limit + 1), false);
  ok[0] = true;
  for (Count s = 1; s <= limit; ++s)
    for (Count h : heights)
      if (h <= s && ok[static_cast<std::size_t>(s - h)]) ok[static_cast<std::size_t>(s)] = true;
  Count n = limit / p;
  while (n >= 1 && ok[static_cast<std::size_t>(n * p)]) --n;
  return n + 1;
}

DiagramPtr shared(const char* name) { return std::make_shared<const BratteliDiagram>(builtin_diagram(name)); }

}  // namespace

TEST_CASE("semigroup threshold examples") {
  CHECK(semigroup_threshold({2, 3}, 1) == 2);
  CHECK(semigroup_threshold({6, 10, 15}, 1) == 30);
  CHECK(semigroup_threshold({4, 6}, 2) == 2);
  CHECK(semigroup_threshold({5}, 5) == 1);
}

TEST_CASE("semigroup threshold matches a reachability table") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<Count> h(1, 30), k(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Count> heights(static_cast<std::size_t>(k(rng)));
    for (auto& x : heights) x = h(rng);
    Count p = 0;
    for (Count x : heights) p = std::gcd(p, x);
    CHECK(semigroup_threshold(heights, p) == brute_threshold(heights, p));
  }
}

TEST_CASE("height decomposition prefers the tallest tower") {
  CHECK(height_decomposition(7, {2, 3}) == std::vector<Count>{2, 1});
  CHECK(height_decomposition(12, {2, 3}) == std::vector<Count>{0, 4});
  CHECK_FALSE(height_decomposition(1, {2, 3}).has_value());
  auto d = height_decomposition(8, {2, 3}, {1, 0}, 1);
  REQUIRE(d.has_value());
  CHECK((*d)[0] * 2 + (*d)[1] * 3 == 8);
  CHECK((*d)[0] % 2 == 1);
  CHECK(height_decomposition(6, {2, 4}, {1, 1}, 0) == std::vector<Count>{1, 1});
  CHECK_FALSE(height_decomposition(4, {2}, {1}, 1).has_value());
}

TEST_CASE("tower matching covers every P floor once") {
  MatchingPlan plan = tower_matching({7, 5}, {2, 3}, {{2, 1}, {1, 1}});
  CHECK(plan.b == std::vector<Count>{3, 2});
  CHECK(plan.p_cells() == 12);
  CHECK(plan.q_cells() == 12);
  std::string why;
  CHECK_MESSAGE(verify_matching(plan, &why), why);
  CHECK_THROWS_AS(tower_matching({7, 5}, {2, 3}, {{1, 1}, {1, 1}}), ContractError);
  CHECK_THROWS_AS(tower_matching({6}, {2, 3}, {{3, 0}}), ContractError);
}

TEST_CASE("synthesized maps satisfy the height equation and conjugate exactly") {
  const std::pair<const char*, const char*> pairs[] = {{"dyadic", "dyadic"}, {"odometer6", "triadic"}, {"odometer6", "dyadic"}};
  for (const auto& [xn, yn] : pairs) {
    DiagramPtr x = shared(xn), y = shared(yn);
    for (int level = 1; level <= 3; ++level) {
      auto target = lumped_cells(*y, level);
      SynthesisResult r = synthesize_conjugator(x, y, target, SynthesisOptions{});
      REQUIRE(r.verdict == Verdict::yes);
      REQUIRE(r.map);
      const MatchingPlan& plan = r.map->plan;
      Count lhs = 0, rhs = 0;
      for (Count h : plan.p_heights) lhs += h;
      for (std::size_t w = 0; w < plan.q_heights.size(); ++w) rhs += plan.b[w] * plan.q_heights[w];
      CHECK(lhs == rhs);
      for (Count bw : plan.b) CHECK(bw > 0);
      CHECK(verify_matching(plan));
      CHECK(verify_approx_conjugacy(*r.map, target).all_pass());
      CHECK(verify_approx_conjugacy(*r.map, lumped_target(*r.map), "Q").all_pass());
      for (const auto& c : level_cells(*x, r.map->x_level)) {
        auto back = map_backward(*r.map, map_forward(*r.map, c));
        REQUIRE(back.has_value());
        CHECK(same_set(*x, *back, c));
      }
      PartitionMap again = partition_map_from_json(to_json(*r.map), x, y);
      CHECK(to_json(again) == to_json(*r.map));
    }
  }
}

TEST_CASE("segment towers partition X") {
  DiagramPtr x = shared("fibonacci");
  PartitionMap m = identity_map(x, 3);
  Count total = 0;
  for (const auto& s : segment_towers(m)) total += s.height;
  CHECK(total == kr_partition(*x, 3).cell_count);
  CHECK(verify_approx_conjugacy(m, lumped_cells(*x, 3)).all_pass());
}

TEST_CASE("synthesis refuses when the gcd of Y heights misses PS(X)") {
  DiagramPtr tri = shared("triadic"), dy = shared("dyadic");
  SynthesisResult r = synthesize_conjugator(tri, dy, lumped_cells(*dy, 2), SynthesisOptions{});
  CHECK(r.verdict == Verdict::no);
  CHECK(r.p == 2);
  CHECK_FALSE(r.map.has_value());
  CHECK(r.spectrum_check.no());

  DiagramPtr six = shared("odometer6");
  SynthesisResult s = synthesize_conjugator(dy, six, lumped_cells(*six, 1), SynthesisOptions{});
  CHECK(s.verdict == Verdict::no);
  CHECK(s.p == 3);
}
