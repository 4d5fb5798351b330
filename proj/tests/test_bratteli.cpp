#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace cwac;

TEST_CASE("validation of the builtin diagrams") {
  ValidationReport dy = validate_diagram(builtin_diagram("dyadic"), 5);
  CHECK(dy.ok());
  CHECK(dy.positivity_window == 1);
  ValidationReport fib = validate_diagram(builtin_diagram("fibonacci"), 6);
  CHECK(fib.ok());
  CHECK(fib.positivity_window == 2);
}

TEST_CASE("tower heights") {
  CHECK(kr_partition(builtin_diagram("dyadic"), 3).heights == std::vector<Count>{8});
  CHECK(kr_partition(builtin_diagram("fibonacci"), 4).heights == std::vector<Count>{5, 3});
}

TEST_CASE("heights agree with towers walked by the reference successor") {
  for (const char* name : {"dyadic", "triadic", "fibonacci", "odometer6"}) {
    BratteliDiagram d = builtin_diagram(name);
    for (int n = 0; n <= 4; ++n) CHECK(kr_partition(d, n).heights == oracle::towers(d, n).heights());
  }
}

TEST_CASE("successor_path matches the reference on every depth-5 path") {
  BratteliDiagram d = builtin_diagram("fibonacci");
  oracle::Towers t = oracle::towers(d, 5);
  for (const auto& [path, index] : t.cell) {
    auto mine = successor_path(d, PathPrefix{path});
    auto ref = oracle::next_path(d, path);
    REQUIRE(mine.has_value() == ref.has_value());
    if (mine) CHECK(mine->edges == *ref);
    CHECK(cell_of_path(d, PathPrefix{path}) == kr_partition(d, 5).cell(index));
  }
}

TEST_CASE("roof cell of the dyadic odometer goes to the base") {
  BratteliDiagram d = builtin_diagram("dyadic");
  ClopenSet roof = ClopenSet::of_cells(d, 1, {Cell{0, 2}});
  ClopenSet image = vershik_action(d, roof, 1);
  CHECK(same_set(d, image, ClopenSet::of_cells(d, 1, {Cell{0, 1}})));
}

TEST_CASE("alpha then alpha inverse is the identity on every level-3 cell") {
  for (const char* name : {"dyadic", "fibonacci"}) {
    BratteliDiagram d = builtin_diagram(name);
    for (const ClopenSet& c : level_cells(d, 3)) CHECK(same_set(d, vershik_action(d, vershik_action(d, c, 1), -1), c));
  }
}

TEST_CASE("alpha permutes the lumped cells and shifts floors") {
  BratteliDiagram d = builtin_diagram("fibonacci");
  for (int n = 1; n <= 4; ++n) {
    KRPartition p = kr_partition(d, n);
    for (Count i = 0; i < p.cell_count; ++i) {
      if (p.is_roof(i)) continue;
      Cell c = p.cell(i);
      CHECK(same_set(d, vershik_action(d, ClopenSet::of_cells(d, n, {c}), 1), ClopenSet::of_cells(d, n, {Cell{c.tower, c.floor + 1}})));
    }
    auto lumped = lumped_cells(d, n);
    CHECK(is_partition(d, lumped));
  }
}

TEST_CASE("mass conservation under refinement") {
  BratteliDiagram d = builtin_diagram("fibonacci");
  for (int n = 0; n <= 4; ++n) {
    ClopenSet whole = ClopenSet::whole(d, n);
    for (int m = n; m <= n + 3; ++m) CHECK(refine(d, whole, m).size() == kr_partition(d, m).cell_count);
  }
}

TEST_CASE("telescoping") {
  BratteliDiagram dy = builtin_diagram("dyadic");
  BratteliDiagram every2 = telescope(dy, LevelSelection{{0}, 2});
  CHECK(every2.transition(0).edges().size() == 4);
  for (int n = 0; n <= 3; ++n) CHECK(kr_partition(every2, n).heights == std::vector<Count>{Count{1} << (2 * n)});

  BratteliDiagram fib = builtin_diagram("fibonacci");
  BratteliDiagram t = telescope(fib, LevelSelection{{0, 1, 3}, 0});
  IntMatrix expected(2, 2);
  expected(0, 0) = 2, expected(0, 1) = 1, expected(1, 0) = 1, expected(1, 1) = 1;
  CHECK(t.incidence(1, 2) == expected);
  CHECK(kr_partition(t, 2).heights == kr_partition(fib, 3).heights);
}

TEST_CASE("dividing a tower keeps a tower partition") {
  BratteliDiagram d = builtin_diagram("fibonacci");
  TowerPartition p = tower_partition(d, 2);
  auto base = refine(d, p.towers[0][0], 3);
  std::vector<ClopenSet> parts;
  for (Count i : base.indices()) {
    ClopenSet one = ClopenSet::empty(d, 3);
    one.members[static_cast<std::size_t>(i)] = true;
    parts.push_back(one);
  }
  TowerPartition q = divide_tower(d, p, 0, parts);
  std::string why;
  CHECK_MESSAGE(is_tower_partition(d, q, &why), why);
  CHECK(q.tower_count() == p.tower_count() + static_cast<int>(parts.size()) - 1);
  Count total = 0;
  for (int v = 0; v < q.tower_count(); ++v)
    for (const auto& f : q.towers[v]) total += refine(d, f, 3).size();
  CHECK(total == refine(d, ClopenSet::whole(d, 2), 3).size());
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_diagram("bratteli 1\nfinite 1\nT 1 1 1\n0 0 x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_WITH_AS(parse_diagram("bratteli 1\nfinite 1\nT 1 1 2\n0 0 1\n0 0 1\n"),
                       doctest::Contains("not 1..indegree"), ParseError);
}

TEST_CASE("serialization round trip") {
  for (const char* name : {"dyadic", "triadic", "fibonacci"}) {
    BratteliDiagram d = builtin_diagram(name);
    CHECK(parse_diagram(serialize_diagram(d)) == d);
  }
}

TEST_CASE("finite diagrams refuse to extrapolate") {
  BratteliDiagram d = parse_diagram("bratteli 1\nfinite 2\nT 1 1 2\n0 0 1\n0 0 2\nT 1 1 2\n0 0 1\n0 0 2\n");
  CHECK(kr_partition(d, 2).heights == std::vector<Count>{4});
  CHECK_THROWS_AS(kr_partition(d, 3), DepthError);
}
