#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwac/kzero.hpp"

namespace cwac {

/// Least N >= 1 such that p*n is a nonnegative combination of `heights` for every n >= N.
/// p must be the gcd of the heights.
Count semigroup_threshold(const std::vector<Count>& heights, Count p);

/// h = sum_w a_w heights[w], maximizing the count of the tallest tower first
/// (ties: lower index first), then the next tallest, and so on.
std::optional<std::vector<Count>> height_decomposition(Count h, const std::vector<Count>& heights);

/// Same order of preference, restricted to sum_w a_w parities[w] = parity mod 2.
std::optional<std::vector<Count>> height_decomposition(Count h, const std::vector<Count>& heights,
                                                       const std::vector<Count>& parities, Count parity);

struct Segment {
  int w = 0;
  Count copy = 0;   // copy index of tower w, numbered across all P towers
  Count start = 1;  // first P floor covered
};

struct MatchingPlan {
  std::vector<Count> p_heights;
  std::vector<Count> q_heights;
  std::vector<std::vector<Count>> a;  // a[v][w]
  std::vector<Count> b;               // b[w] = sum_v a[v][w]
  std::vector<std::vector<Segment>> segments;  // per P tower, bottom to top

  Count p_cells() const;
  Count q_cells() const;  // cells of the divided partition Q'
};

/// Packs a[v][w] copies of each Q tower end to end into P tower v, in w order.
/// Throws ContractError when the height equation fails or some b_w is zero.
MatchingPlan tower_matching(const std::vector<Count>& p_heights, const std::vector<Count>& q_heights,
                            const std::vector<std::vector<Count>>& a);

/// Re-derives pi cell by cell and checks bijectivity and consecutiveness.
bool verify_matching(const MatchingPlan& plan, std::string* why = nullptr);

/// sigma: X -> Y, known on the cells of X at x_level: each goes onto one floor of Q'.
struct PartitionMap {
  DiagramPtr x;
  DiagramPtr y;
  int x_level = 0;
  int y_level = 0;
  TowerPartition q_prime;
  std::vector<int> q_tower_source;                   // Q' tower -> tower of Y at y_level
  std::vector<std::pair<int, Count>> cell_to_floor;  // X cell -> (Q' tower, floor)
  MatchingPlan plan;

  const ClopenSet& floor_of(Count x_cell) const;
};

PartitionMap identity_map(DiagramPtr d, int level);

/// sigma(U) for U a union of X cells at x_level or coarser.
ClopenSet map_forward(const PartitionMap& m, const ClopenSet& u);
/// sigma^{-1}(V); nullopt when some floor of Q' meets V only partially.
std::optional<ClopenSet> map_backward(const PartitionMap& m, const ClopenSet& v);

/// The segments of sigma as a Kakutani-Rohlin partition of X: one tower per Q' tower.
struct SegmentTower {
  int x_tower = 0;
  Count start = 1;
  Count height = 0;
  int q_tower = 0;
};
std::vector<SegmentTower> segment_towers(const PartitionMap& m);

struct SynthesisOptions {
  int bound = 40;
  int min_x_level = 0;
  int min_y_level = 0;
  Count min_q_height = 1;
  // When both are set, a[v][w] also satisfies sum_w a[v][w] y_parity_w = x_parity_v (mod 2),
  // tower parities taken from these cell functions.
  std::optional<CellFunction<Count>> x_parity;
  std::optional<CellFunction<Count>> y_parity;
};

struct SynthesisResult {
  Verdict verdict = Verdict::unknown;  // yes: map present; no: p, the least failing divisor of the gcd, is not in PS(X)
  std::optional<PartitionMap> map;
  Count p = 1;
  int y_level = 0;
  Count threshold = 1;
  TriState spectrum_check;  // divisibility of [1_X] by p
  std::string note;
};

SynthesisResult synthesize_conjugator(DiagramPtr x, DiagramPtr y, const std::vector<ClopenSet>& target,
                                      const SynthesisOptions& options);

struct ConjugacyCheck {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct ConjugacyReport {
  std::vector<ConjugacyCheck> checks;
  bool all_pass() const;
  std::vector<std::string> failing() const;
};

/// For each U: sigma alpha sigma^{-1}(U) == beta(U), exactly.
ConjugacyReport verify_approx_conjugacy(const PartitionMap& m, const std::vector<ClopenSet>& sets,
                                        const std::string& prefix = "U");

/// Cells of the lumped partition of Y at the map's y_level.
std::vector<ClopenSet> lumped_target(const PartitionMap& m);

Json to_json(const MatchingPlan& plan);
Json to_json(const PartitionMap& m);
PartitionMap partition_map_from_json(const Json& j, DiagramPtr x, DiagramPtr y);

}  // namespace cwac
