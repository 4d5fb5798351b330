#include <random>

#include "cwac/circle.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwac;

namespace {

Rational r(Count n, Count d) { return Rational(n, d); }

IsomT random_isom(std::mt19937_64& rng) {
  std::uniform_int_distribution<Count> den(1, 12), flip(0, 1);
  const Count q = den(rng);
  return make_isom(r(std::uniform_int_distribution<Count>(0, q - 1)(rng), q), static_cast<int>(flip(rng)));
}

DiagramPtr shared(const char* name) { return std::make_shared<const BratteliDiagram>(builtin_diagram(name)); }

CircleCocycle load_cocycle(const std::string& file, const BratteliDiagram& d) {
  return parse_circle_cocycle(read_text_file(std::string(CWAC_DATA_DIR) + "/" + file), d);
}

}  // namespace

TEST_CASE("composition of a reflection with a rotation") {
  IsomT a = make_isom(r(1, 4), 1), b = make_isom(r(1, 3));
  CHECK(compose(a, b) == make_isom(r(11, 12), 1));
  for (Count k = 0; k < 12; ++k) CHECK(act(compose(a, b), r(k, 12)) == act(a, act(b, r(k, 12))));
}

TEST_CASE("isometries against the affine model") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 300; ++trial) {
    IsomT a = random_isom(rng), b = random_isom(rng);
    oracle::Affine ab = oracle::after(oracle::affine(a), oracle::affine(b));
    IsomT c = compose(a, b);
    CHECK(c.flip == (ab.s < 0 ? 1 : 0));
    CHECK(c.flip == (a.flip ^ b.flip));
    CHECK(make_isom(ab.r, ab.s < 0 ? 1 : 0) == c);
    CHECK(compose(a, inverse(a)) == make_isom(r(0, 1)));
    CHECK(isometry_distance(a, b) == oracle::sup_distance(oracle::affine(a), oracle::affine(b)));
    CHECK(isometry_distance(a, b) == isometry_distance(b, a));
    CHECK(a.rot >= 0);
    CHECK(a.rot < 1);
  }
}

TEST_CASE("minimal lift") {
  CHECK(minimal_lift(r(1, 2)) == r(1, 2));
  CHECK(minimal_lift(r(3, 4)) == r(-1, 4));
  CHECK(minimal_lift(r(0, 1)) == r(0, 1));
  CHECK(minimal_lift(r(5, 4)) == r(1, 4));
}

TEST_CASE("orientation of the sample cocycles") {
  BratteliDiagram dy = builtin_diagram("dyadic"), tri = builtin_diagram("triadic");
  CHECK(orientation_class(dy, load_cocycle("dyadic_rot.cocycle", dy), 30).yes());
  CHECK(orientation_class(dy, load_cocycle("dyadic_reflect.cocycle", dy), 30).yes());
  CircleCocycle tri_reflect = rotation_cocycle(0, {r(1, 3)});
  tri_reflect.values[0].flip = 1;
  CHECK(orientation_class(tri, tri_reflect, 30).no());
  CHECK_THROWS_AS(straighten(tri, tri_reflect, 30), ContractError);
}

TEST_CASE("straightening conjugates to rotations") {
  for (const auto& [name, file] : {std::pair{"dyadic", "dyadic_reflect.cocycle"}, std::pair{"fibonacci", "fibonacci_reflect.cocycle"},
                                   std::pair{"fibonacci", "fibonacci_indicator.cocycle"}}) {
    BratteliDiagram d = builtin_diagram(name);
    CircleCocycle phi = load_cocycle(file, d);
    if (!orientation_class(d, phi, 30).yes()) continue;
    Straightening s = straighten(d, phi, 30);
    CHECK(straightening_failures(d, phi, s).empty());
    CHECK(is_rotation_cocycle(s.xi));
    for (const IsomT& p : s.psi.values) CHECK(compose(p, p) == make_isom(r(0, 1)));
    CHECK(check_mod_transfer(d, orientation_function(phi), s.f, 2));
  }
}

TEST_CASE("eta on a single tower of height 4") {
  DiagramPtr d = shared("dyadic");
  PartitionMap m = identity_map(d, 2);
  CircleCocycle xi = rotation_cocycle(2, std::vector<Rational>(4, r(0, 1)));
  CircleCocycle zeta = rotation_cocycle(2, std::vector<Rational>(4, r(1, 8)));
  EtaFunction e = eta_construction(m, xi, zeta, r(1, 3));
  REQUIRE(e.lifts.size() == 1);
  CHECK(e.lifts[0].kappa == r(1, 2));
  CHECK(e.lifts[0].kappa_lift == r(1, 2));
  CHECK(e.sup_deviation == r(1, 8));
  CHECK_THROWS_AS(eta_construction(m, xi, zeta, r(1, 4)), ContractError);

  EtaFunction zero = eta_construction(m, zeta, zeta, r(1, 3));
  CHECK(zero.sup_deviation == r(0, 1));
  for (const Rational& v : zero.values) CHECK(v == r(0, 1));
}

TEST_CASE("omega with sigma the identity and phi = psi is exact") {
  DiagramPtr d = shared("fibonacci");
  BratteliDiagram fib = builtin_diagram("fibonacci");
  CircleCocycle phi = load_cocycle("fibonacci_indicator.cocycle", fib);
  PartitionMap m = identity_map(d, phi.level);
  OmegaResult w = omega_construction(m, phi, phi);
  CHECK(w.sup_deviation == r(0, 1));
  CHECK(w.within_bounds());
  auto dev = skew_deviation(m, phi, phi, w.omega);
  CHECK(std::all_of(dev.begin(), dev.end(), [](const Rational& x) { return x == 0; }));
}

TEST_CASE("combina thresholds against the reference") {
  Combina c = combina({2, 3}, {1, 0});
  CHECK(c.threshold == 8);
  CHECK(c.threshold == oracle::combina_threshold({2, 3}, {1, 0}));
  CHECK(c.case_tag != 0);
  Combina none = combina({2, 4}, {0, 0});
  CHECK(none.case_tag == 0);
  for (Count a = 1; a <= 7; ++a)
    for (Count b = a; b <= 7; ++b)
      for (Count ca = 0; ca <= 1; ++ca)
        for (Count cb = 0; cb <= 1; ++cb) {
          Combina k = combina({a, b}, {ca, cb});
          CHECK((k.case_tag != 0) == oracle::combina_hypothesis({a, b}, {ca, cb}));
          if (k.case_tag == 0) continue;
          CHECK(k.threshold == oracle::combina_threshold({a, b}, {ca, cb}));
          for (Count n = k.threshold; n < k.threshold + 20; ++n)
            for (Count chi = 0; chi <= 1; ++chi) {
              auto l = k.solve(n, chi);
              REQUIRE(l.has_value());
              CHECK((*l)[0] >= 0);
              CHECK((*l)[1] >= 0);
              CHECK((*l)[0] * a + (*l)[1] * b == n * k.q);
              CHECK(mod_floor((*l)[0] * ca + (*l)[1] * cb, 2) == chi);
            }
        }
}

TEST_CASE("weak approximate conjugacy of rotation skew products over the dyadic odometer") {
  DiagramPtr dy = shared("dyadic"), tri = shared("triadic");
  CircleCocycle phi = load_cocycle("dyadic_rot.cocycle", *dy), psi = load_cocycle("triadic_rot.cocycle", *tri);
  CHECK(decide_wacXT(dy, phi, dy, phi, 16, 30).verdict == Verdict::yes);
  CHECK(decide_wacXT(dy, phi, tri, psi, 16, 30).verdict == Verdict::no);
  CHECK(decide_wacXT_symmetric(dy, phi, dy, phi, 16, 30).verdict == Verdict::yes);
}

TEST_CASE("orbit follows the cocycle") {
  BratteliDiagram d = builtin_diagram("dyadic");
  CircleCocycle phi = load_cocycle("dyadic_rot.cocycle", d);
  PathPrefix start{std::vector<int>(8, 0)};
  auto orbit = skew_orbit(d, start, r(0, 1), phi, 10);
  REQUIRE(orbit.size() >= 10);
  for (std::size_t i = 0; i + 1 < orbit.size(); ++i) {
    const int level = orbit[i].level;
    CircleCocycle fine = refine(d, phi, level);
    CHECK(orbit[i + 1].t == act(fine.values[static_cast<std::size_t>(orbit[i].cell.floor - 1)], orbit[i].t));
    if (orbit[i + 1].level == level) CHECK(orbit[i + 1].cell.floor == orbit[i].cell.floor + 1);
  }
}
