#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwac/kzero.hpp"

namespace cwac {

/// c: X -> Z_m, constant on the cells of values.level.
struct ZmCocycle {
  Count m = 2;
  CellFunction<Count> values;
};

/// The Z_m skew product alpha x c, seen through towers (v, j) over X(v,1) x {j}.
/// Tower (v, j) has floors X(v,k) x {j + s_k(v)}, with s_k the partial sums of c.
class SkewDirectedSystem {
 public:
  SkewDirectedSystem(DiagramPtr base, ZmCocycle c, int start_level);

  const BratteliDiagram& base() const { return *base_; }
  DiagramPtr base_ptr() const { return base_; }
  const ZmCocycle& cocycle() const { return c_; }
  Count m() const { return c_.m; }
  // First level at which c is constant on the union of roof cells.
  int start_level() const { return start_; }
  // Value of c on the roof cells from start_level on.
  Count roof_value() const { return roof_value_; }

  int tower_count(int level) const { return base_->vertex_count(level) * static_cast<int>(c_.m); }
  int tower_index(int v, Count j) const { return v * static_cast<int>(c_.m) + static_cast<int>(mod_floor(j, c_.m)); }

  // Full tower sums S(v) mod m.
  std::vector<Count> tower_sums(int level) const;
  // s_k(v) mod m for k = 1..h(v) (s_1 = 0); materializes c at `level`.
  std::vector<std::vector<Count>> partial_sums(int level) const;

  /// rows: towers of level+1, cols: towers of level.
  IntMatrix incidence(int level) const;
  /// One column per fiber i: towers whose roof lies in fiber i minus towers whose base does.
  IntMatrix relations(int level) const;
  /// Fiber shift gamma as a permutation of towers: (v, j) -> (v, j+1).
  IntMatrix gamma(int level) const;
  /// pi^*: e_v -> sum_j e_(v,j).
  std::vector<Count> pi_star(const K0Element& a) const;
  IntMatrix pi_star_matrix(int level) const;
  /// Class of the constant function 1 (tower heights).
  std::vector<Count> unit(int level) const;

  TriState minimality;  // yes: k[c] is outside mK0 for every 0 < k < m

 private:
  DiagramPtr base_;
  ZmCocycle c_;
  int start_ = 0;
  Count roof_value_ = 0;
};

/// Throws DepthError when c is not constant on the roof set within `bound` levels.
SkewDirectedSystem build_extension(DiagramPtr d, const ZmCocycle& c, int bound);

/// Pointwise check, on the cells of `level` times Z_m, of f0 - f0 o gamma^{-1} = 1_U - 1_U o (alpha x c)^{-1},
/// U = X x {0}, f0(x,k) = 1 iff 0 <= k < c(alpha^{-1} x).
struct F0Check {
  int level = 0;
  Count cells_checked = 0;
  std::vector<std::string> mismatches;
  bool pass() const { return mismatches.empty(); }
};
F0Check check_f0_identity(const SkewDirectedSystem& ext, int level);
/// Tower sums of f0 at `level`.
std::vector<Count> f0_class(const SkewDirectedSystem& ext, int level);

struct TorsionLevel {
  int level = 0;
  QuotientStructure quotient;  // Ker(id - gamma^*) / pi^*(K0) at this level
  bool f0_in_kernel = false;
  Count f0_order = 0;          // 0 when no multiple up to the torsion order lands in pi^* + relations
};

struct TorsionReport {
  Verdict verdict = Verdict::unknown;  // yes: stable cyclic of order m generated by f0
  bool hypothesis_minimal = false;
  std::vector<TorsionLevel> levels;
  F0Check f0_identity;
  std::string note;
};

TorsionReport torsion_check(const SkewDirectedSystem& ext, int level, int bound);

/// Decides p | [1] in the extension directed system; stationary diagrams are decided by cycle detection.
TriState extension_divisible(const SkewDirectedSystem& ext, Count p, int bound);

struct ExtensionSpectrum {
  Verdict verdict = Verdict::unknown;
  std::vector<Count> base;     // PS(alpha) up to p_max
  std::vector<Count> direct;   // PS(alpha x c) from the extension towers
  std::vector<Count> formula;  // PS(alpha x c) from the mod-2 test against [f]
  std::string branch;          // "equal" or "doubled"
  std::optional<int> n;        // 2^{n-1} in PS(alpha), 2^n not
  bool agree = false;
  bool contains_base = false;
  Json certificates = Json::object();
  std::string note;
};

/// m = 2 only.
ExtensionSpectrum ps_extension(const SkewDirectedSystem& ext, Count p_max, int bound);

Json to_json(const ZmCocycle& c);

}  // namespace cwac
