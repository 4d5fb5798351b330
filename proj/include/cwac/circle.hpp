#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwac/conjsynth.hpp"
#include "cwac/extension.hpp"

namespace cwac {

/// t -> rot + (-1)^flip t on T = R/Z; rot is kept in [0,1).
struct IsomT {
  Rational rot{0};
  int flip = 0;
  bool operator==(const IsomT&) const = default;
};

IsomT make_isom(const Rational& rot, int flip = 0);
IsomT compose(const IsomT& a, const IsomT& b);  // a o b
IsomT inverse(const IsomT& a);
Rational act(const IsomT& a, const Rational& t);
/// sup_t |a(t) - b(t)|: the rotation gap when flips agree, 1/2 otherwise.
Rational isometry_distance(const IsomT& a, const IsomT& b);
std::string to_string(const IsomT& a);

using CircleCocycle = CellFunction<IsomT>;

CellFunction<Count> orientation_function(const CircleCocycle& phi);
bool is_rotation_cocycle(const CircleCocycle& phi);
CircleCocycle rotation_cocycle(int level, const std::vector<Rational>& rotations);

// Cocycle files: "cocycle circle" or "cocycle zm <m>", then one record per cell:
//   circle: level v k num den flip      zm: level v k value
// '#' starts a comment. Every cell of the level must appear exactly once.
CircleCocycle parse_circle_cocycle(const std::string& text, const BratteliDiagram& d);
ZmCocycle parse_zm_cocycle(const std::string& text, const BratteliDiagram& d);
std::string serialize_cocycle(const CircleCocycle& phi, const BratteliDiagram& d);
std::string serialize_cocycle(const ZmCocycle& c, const BratteliDiagram& d);
// Reads the header to tell the two kinds apart.
std::string cocycle_kind(const std::string& text);
std::string read_text_file(const std::string& path);

Json to_json(const IsomT& a);
Json to_json(const CircleCocycle& phi);

/// Orientation preserving iff [o(phi)] = 0 in K0/2K0; yes carries the transfer f.
TriState orientation_class(const BratteliDiagram& d, const CircleCocycle& phi, int bound);

struct Straightening {
  CellFunction<Count> f;  // o(phi) = f - f o alpha (mod 2)
  CircleCocycle psi;      // identity where f = 0, the reflection where f = 1
  CircleCocycle xi;       // psi_{alpha(x)} phi_x psi_x^{-1} = R_{xi(x)}
};

/// Throws ContractError when the class is nonzero and UnknownError when undecided.
Straightening straighten(const BratteliDiagram& d, const CircleCocycle& phi, int bound);
/// Cells where psi_{alpha(x)} phi_x psi_x^{-1} is not the rotation by xi(x).
std::vector<Count> straightening_failures(const BratteliDiagram& d, const CircleCocycle& phi, const Straightening& s);

/// Value of f on alpha^power(cell), nullopt when f is not constant there.
std::optional<IsomT> value_along(const BratteliDiagram& d, const CircleCocycle& f, const ClopenSet& cell, Count power);

struct SegmentLift {
  int x_tower = 0;
  Count start = 1;
  Count height = 0;
  Rational kappa{0};       // tower sum of zeta sigma - xi, taken mod 1 in [0,1)
  Rational kappa_lift{0};  // representative in (-1/2, 1/2]
};

struct EtaFunction {
  int level = 0;
  std::vector<Rational> values;  // per X cell, in [0,1)
  std::vector<SegmentLift> lifts;
  std::vector<Rational> deviation;  // |(xi - zeta sigma) - (eta - eta o alpha)| per cell
  Rational sup_deviation{0};
};

/// Minimal lift of t in (-1/2, 1/2].
Rational minimal_lift(const Rational& t);

/// Needs h * epsilon > 1 for every segment; a violation is refused naming the segment.
EtaFunction eta_construction(const PartitionMap& m, const CircleCocycle& xi, const CircleCocycle& zeta,
                             const Rational& epsilon);

struct OmegaResult {
  CircleCocycle omega;  // at the map's x_level
  std::vector<Rational> kappa;
  std::vector<Rational> kappa_lift;
  std::vector<std::vector<Count>> chi;  // chi[v][j], j = 0..h(v)-1
  std::vector<Rational> deviation;      // per X cell
  Rational sup_deviation{0};
  std::vector<bool> tower_within_bound;  // deviation < 1/h(v) on every cell of tower v
  bool within_bounds() const;
};

/// Refuses (ContractError) when the parity hypothesis fails, listing every
/// offending X tower with both sides of the parity equation.
OmegaResult omega_construction(const PartitionMap& m, const CircleCocycle& phi, const CircleCocycle& psi);

/// Per-cell sup_t |psi_{sigma(x)} omega_x(t) - omega_{alpha(x)} phi_x(t)|.
std::vector<Rational> skew_deviation(const PartitionMap& m, const CircleCocycle& phi, const CircleCocycle& psi,
                                     const CircleCocycle& omega);

/// Coin problem with parity.
struct Combina {
  std::vector<Count> m;
  std::vector<Count> chi;
  Count q = 1;
  int case_tag = 0;    // 1 or 2 per the hypothesis met, 0 for none
  Count threshold = 0;  // N; 0 when case_tag is 0

  /// l with sum l_i m_i = n q and sum l_i chi_i = chi (mod 2), or nullopt.
  std::optional<std::vector<Count>> solve(Count n, Count chi_target) const;
};

Combina combina(const std::vector<Count>& m, const std::vector<Count>& chi);

struct WacDecision {
  Verdict verdict = Verdict::unknown;
  std::vector<std::string> conditions;  // subset of {"a", "b", "c"}
  Json certificates = Json::object();
  std::string note;
};

/// Weak approximate conjugacy of the skew products alpha x phi and beta x psi,
/// checked through the containment of periodic spectra and conditions (a)-(c).
WacDecision decide_wacXT(DiagramPtr x, const CircleCocycle& phi, DiagramPtr y, const CircleCocycle& psi, Count p_max,
                         int bound);

/// Two-sided version: conditions "1" (equal spectra, both orientation preserving) or
/// "2" (equal spectra, equal extension spectra, neither orientation preserving).
WacDecision decide_wacXT_symmetric(DiagramPtr x, const CircleCocycle& phi, DiagramPtr y, const CircleCocycle& psi,
                                   Count p_max, int bound);

struct OrbitStep {
  Cell cell;
  int level = 0;
  Rational t{0};
};

/// (x, t) -> (alpha x, phi_x(t)) for `steps` steps from the cell of the path prefix.
std::vector<OrbitStep> skew_orbit(const BratteliDiagram& d, const PathPrefix& x, const Rational& t,
                                  const CircleCocycle& phi, int steps);

}  // namespace cwac
