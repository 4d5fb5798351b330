#include <random>

#include "cwac/fullgroup.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwac;

namespace {

struct Pair {
  ClopenSet u, v;
};

// Equal-class pairs: U and V are unions of cells with the same per-tower counts.
Pair random_equal_pair(const BratteliDiagram& d, int level, std::mt19937_64& rng) {
  KRPartition p = kr_partition(d, level);
  std::vector<Cell> a, b;
  for (int t = 0; t < p.tower_count(); ++t) {
    std::vector<Count> floors(static_cast<std::size_t>(p.heights[t]));
    for (Count k = 0; k < p.heights[t]; ++k) floors[k] = k + 1;
    const Count take = std::uniform_int_distribution<Count>(0, p.heights[t])(rng);
    std::shuffle(floors.begin(), floors.end(), rng);
    for (Count k = 0; k < take; ++k) a.push_back({t, floors[k]});
    std::shuffle(floors.begin(), floors.end(), rng);
    for (Count k = 0; k < take; ++k) b.push_back({t, floors[k]});
  }
  return {ClopenSet::of_cells(d, level, a), ClopenSet::of_cells(d, level, b)};
}

std::vector<FullGroupElement> sample_elements(const BratteliDiagram& d, std::mt19937_64& rng) {
  std::vector<FullGroupElement> out{identity_element(d, 0), constant_power(d, 0, 1), constant_power(d, 1, -3)};
  for (int level = 1; level <= 3; ++level) {
    Pair pr = random_equal_pair(d, level, rng);
    out.push_back(hopf_exchange(d, pr.u, pr.v, 40));
  }
  return out;
}

}  // namespace

TEST_CASE("full group axioms on sample elements") {
  std::mt19937_64 rng(31);
  for (const char* name : {"dyadic", "fibonacci"}) {
    BratteliDiagram d = builtin_diagram(name);
    auto elems = sample_elements(d, rng);
    auto cells = level_cells(d, 3);
    for (const auto& g : elems) {
      CHECK(is_bijective(d, g));
      CHECK(simplify(d, compose(d, g, invert(d, g))).is_identity());
      CHECK(simplify(d, compose(d, invert(d, g), g)).is_identity());
      CHECK(simplify(d, compose(d, g, identity_element(d, 2))).powers == simplify(d, g).powers);
      for (const auto& h : elems) {
        FullGroupElement gh = compose(d, g, h);
        for (const auto& c : cells) CHECK(same_set(d, apply(d, gh, c), apply(d, g, apply(d, h, c))));
        for (const auto& k : elems) {
          FullGroupElement left = compose(d, compose(d, g, h), k), right = compose(d, g, compose(d, h, k));
          CHECK(simplify(d, left).powers == simplify(d, right).powers);
        }
      }
    }
  }
}

TEST_CASE("refine and simplify keep the power function") {
  BratteliDiagram d = builtin_diagram("fibonacci");
  FullGroupElement g = constant_power(d, 0, 2);
  FullGroupElement fine = refine(d, g, 4);
  CHECK(fine.level == 4);
  CHECK(std::all_of(fine.powers.begin(), fine.powers.end(), [](Count x) { return x == 2; }));
  FullGroupElement back = simplify(d, fine);
  CHECK(back.level == 0);
  CHECK(to_json(full_group_from_json(to_json(fine, d), d), d) == to_json(fine, d));
}

TEST_CASE("hopf exchange maps U onto V, fixes the rest, and stays within the tower heights") {
  std::mt19937_64 rng(37);
  for (const char* name : {"dyadic", "triadic", "fibonacci"}) {
    BratteliDiagram d = builtin_diagram(name);
    for (int trial = 0; trial < 12; ++trial) {
      const int level = 1 + trial % 3;
      Pair pr = random_equal_pair(d, level, rng);
      FullGroupElement g = hopf_exchange(d, pr.u, pr.v, 40);
      CHECK(same_set(d, apply(d, g, pr.u), pr.v));
      CHECK(is_bijective(d, g));
      ClopenSet moved = set_union(d, pr.u, pr.v);
      for (const auto& c : level_cells(d, g.level))
        if (disjoint(d, c, moved)) CHECK(same_set(d, apply(d, g, c), c));
      const auto h = kr_partition(d, g.level).heights;
      CHECK(g.max_abs_power() <= *std::max_element(h.begin(), h.end()));
      oracle::PointwiseImage img = oracle::apply_powers(d, g.level, g.powers, g.level + 6, level);
      REQUIRE(img.resolved);
      CHECK(oracle::is_permutation(d, img));
      CHECK(oracle::maps_onto(d, img, pr.u, pr.v));
    }
  }
}

TEST_CASE("hopf exchange refuses sets of different classes") {
  BratteliDiagram d = builtin_diagram("fibonacci");
  ClopenSet u = ClopenSet::of_cells(d, 2, {Cell{0, 1}}), v = ClopenSet::of_cells(d, 2, {Cell{0, 1}, Cell{1, 1}});
  CHECK_THROWS_AS(hopf_exchange(d, u, v, 40), ContractError);
  FullGroupElement into = hopf_exchange_into(d, u, v, 40);
  CHECK(subset(d, apply(d, into, u), v));
  CHECK(is_bijective(d, into));
}

TEST_CASE("key conjugator for a conjugate of alpha") {
  std::mt19937_64 rng(41);
  for (const char* name : {"dyadic", "fibonacci"}) {
    BratteliDiagram d = builtin_diagram(name);
    Pair pr = random_equal_pair(d, 2, rng);
    FullGroupElement gamma = hopf_exchange(d, pr.u, pr.v, 40), gamma_inv = invert(d, gamma);
    auto partition = lumped_cells(d, 2);
    std::vector<ClopenSet> target;
    for (const auto& s : partition) target.push_back(apply(d, gamma, vershik_action(d, apply(d, gamma_inv, s), 1)));
    FullGroupElement sigma = lemma_key_conjugator(d, partition, target, 40);
    CHECK(key_conjugator_failures(d, sigma, partition, target).empty());
    CHECK(is_bijective(d, sigma));
  }
}
