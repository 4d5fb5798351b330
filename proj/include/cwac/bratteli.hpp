#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cwac/intmat.hpp"
#include "cwac/numeric.hpp"

namespace cwac {

// Extra levels an operation may descend to resolve the Vershik map near the
// roof (or base) set. Process-wide; defaults to 8.
int refine_budget();
void set_refine_budget(int levels);

// Cell algebras larger than this are refused instead of being materialized.
inline constexpr Count kMaxCells = Count{1} << 22;

// Stationary diagrams are unbounded in principle; heights overflow long before this.
inline constexpr int kStationaryLevelCap = 62;

struct Edge {
  int source = 0;
  int range = 0;
  int rank = 1;  // 1-based order among edges sharing `range`
  bool operator==(const Edge&) const = default;
};

// Edges between level n (sources) and level n+1 (ranges).
class Transition {
 public:
  Transition() = default;
  /// Throws StructuralError naming the vertex when ranks at some range vertex
  /// are not exactly 1..indegree.
  Transition(int source_count, int range_count, std::vector<Edge> edges);

  int source_count() const noexcept { return source_count_; }
  int range_count() const noexcept { return range_count_; }
  // Sorted by (range, rank).
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  // Sources of the edges into w, in rank order.
  const std::vector<int>& sources_into(int w) const { return into_.at(w); }
  // Index into edges() of the first edge into w.
  int first_edge_into(int w) const { return first_.at(w); }
  int out_degree(int u) const;

  // rows: ranges, cols: sources
  IntMatrix incidence() const;

  bool operator==(const Transition& o) const {
    return source_count_ == o.source_count_ && range_count_ == o.range_count_ && edges_ == o.edges_;
  }

 private:
  int source_count_ = 0;
  int range_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> into_;
  std::vector<int> first_;
};

/// An ordered Bratteli diagram. Non-stationary diagrams are a finite list of
/// transitions; stationary ones repeat `period` forever after `head`.
class BratteliDiagram {
 public:
  BratteliDiagram(std::vector<Transition> head, std::vector<Transition> period = {});

  bool stationary() const noexcept { return !period_.empty(); }
  // Number of materialized transitions; nullopt for stationary diagrams.
  std::optional<int> depth() const;
  int max_level() const;

  const std::vector<Transition>& head() const noexcept { return head_; }
  const std::vector<Transition>& period() const noexcept { return period_; }

  /// Transition from level n to n+1; DepthError past the materialized depth.
  const Transition& transition(int n) const;
  // Index identifying the transition pattern used at level n (n itself inside the head).
  int phase(int n) const;
  int vertex_count(int n) const;
  std::vector<Count> heights(int n) const;
  IntMatrix incidence(int from, int to) const;

  bool operator==(const BratteliDiagram&) const = default;

 private:
  std::vector<Transition> head_;
  std::vector<Transition> period_;
};

using DiagramPtr = std::shared_ptr<const BratteliDiagram>;

BratteliDiagram dyadic_odometer();
BratteliDiagram odometer(int base);
// Incidence [[1,1],[1,0]] at every level; edge orders alternate between two
// patterns so the diagram is properly ordered.
BratteliDiagram fibonacci_diagram();
/// Named builtin: "dyadic", "triadic", "odometer<k>", "fibonacci".
BratteliDiagram builtin_diagram(const std::string& name);

std::string serialize_diagram(const BratteliDiagram& d);
BratteliDiagram parse_diagram(const std::string& text);
BratteliDiagram load_diagram(const std::string& path);

// ---------------------------------------------------------------------------

struct Cell {
  int tower = 0;
  Count floor = 1;  // 1-based
  bool operator==(const Cell&) const = default;
};

/// Towers of level n: heights h(v) and the cell indexing (v,k) -> offset(v)+k-1.
struct KRPartition {
  int level = 0;
  std::vector<Count> heights;
  std::vector<Count> offsets;
  Count cell_count = 0;
  bool lumped = false;

  int tower_count() const { return static_cast<int>(heights.size()); }
  Count index(int v, Count k) const { return offsets[v] + k - 1; }
  Cell cell(Count index) const;
  bool is_roof(Count index) const;
  bool is_base(Count index) const;
};

KRPartition kr_partition(const BratteliDiagram& d, int n, bool lumped = false);

/// Union of cells of one level's partition.
struct ClopenSet {
  int level = 0;
  std::vector<bool> members;

  static ClopenSet empty(const BratteliDiagram& d, int level);
  static ClopenSet whole(const BratteliDiagram& d, int level);
  static ClopenSet of_cells(const BratteliDiagram& d, int level, const std::vector<Cell>& cells);

  bool contains(Count index) const { return members[static_cast<std::size_t>(index)]; }
  Count size() const;
  bool is_empty() const { return size() == 0; }
  std::vector<Count> indices() const;
};

// Cells of the lumped partition: every non-roof cell, plus the whole roof set.
std::vector<ClopenSet> lumped_cells(const BratteliDiagram& d, int n);
std::vector<ClopenSet> level_cells(const BratteliDiagram& d, int n);

/// parent[i] = index at level n of the level-n cell containing cell i of level n+1.
std::vector<Count> parent_map(const BratteliDiagram& d, int n);

ClopenSet refine(const BratteliDiagram& d, const ClopenSet& s, int level);
/// Coarsest representation at a level in [min_level, s.level].
ClopenSet coarsen(const BratteliDiagram& d, const ClopenSet& s, int min_level = 0);
bool same_set(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b);
ClopenSet set_union(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b);
ClopenSet set_intersection(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b);
ClopenSet set_difference(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b);
bool disjoint(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b);
bool subset(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b);
/// Number of member cells in each tower of s.level.
std::vector<Count> tower_counts(const BratteliDiagram& d, const ClopenSet& s);
/// Whether the sets are pairwise disjoint and cover the space.
bool is_partition(const BratteliDiagram& d, const std::vector<ClopenSet>& sets);

/// alpha^power(S), exact. Refines past S.level until roof (base) membership is
/// all-or-nothing; throws DepthError when that needs more than refine_budget()
/// levels or exceeds the materialized depth.
ClopenSet vershik_action(const BratteliDiagram& d, const ClopenSet& s, Count power);

/// A cell-constant function, values indexed like KRPartition cells.
template <class T>
struct CellFunction {
  int level = 0;
  std::vector<T> values;

  const T& at(Count index) const { return values[static_cast<std::size_t>(index)]; }
};

template <class T>
CellFunction<T> refine(const BratteliDiagram& d, const CellFunction<T>& f, int level) {
  if (level < f.level) throw ArgumentError("cannot refine a cell function to a coarser level");
  CellFunction<T> cur = f;
  for (int n = f.level; n < level; ++n) {
    auto parent = parent_map(d, n);
    CellFunction<T> next{n + 1, {}};
    next.values.reserve(parent.size());
    for (Count p : parent) next.values.push_back(cur.values[static_cast<std::size_t>(p)]);
    cur = std::move(next);
  }
  return cur;
}

template <class T>
CellFunction<T> constant_function(const BratteliDiagram& d, int level, const T& value) {
  return {level, std::vector<T>(static_cast<std::size_t>(kr_partition(d, level).cell_count), value)};
}

// ---------------------------------------------------------------------------

/// A finite path from the top: edges[i] indexes transition(i).edges().
struct PathPrefix {
  std::vector<int> edges;
  int length() const { return static_cast<int>(edges.size()); }
  bool operator==(const PathPrefix&) const = default;
};

Cell cell_of_path(const BratteliDiagram& d, const PathPrefix& p, int top_vertex = 0);
PathPrefix path_of_cell(const BratteliDiagram& d, int level, const Cell& c);
/// Vershik successor at the same depth; nullopt on the all-maximal path.
std::optional<PathPrefix> successor_path(const BratteliDiagram& d, const PathPrefix& p);

// ---------------------------------------------------------------------------

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string witness;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::optional<int> positivity_window;  // nullopt: not found up to depth
  int depth_checked = 0;
  bool ok() const;
};

/// Scans structural invariants up to `depth` (clamped to the materialized depth).
ValidationReport validate_diagram(const BratteliDiagram& d, int depth);

/// Kept levels: `prefix` (strictly increasing, starting at 0), then, when
/// step > 0, prefix.back()+step, +2*step, ... (stationary diagrams only).
struct LevelSelection {
  std::vector<int> prefix;
  int step = 0;
};

BratteliDiagram telescope(const BratteliDiagram& d, const LevelSelection& selection);

// ---------------------------------------------------------------------------

/// A Kakutani-Rohlin partition whose floors are arbitrary clopen sets.
struct TowerPartition {
  std::vector<std::vector<ClopenSet>> towers;
  int tower_count() const { return static_cast<int>(towers.size()); }
  Count height(int v) const { return static_cast<Count>(towers[v].size()); }
  Count floor_count() const;
};

TowerPartition tower_partition(const BratteliDiagram& d, int n);
/// Floors partition X and alpha moves each floor onto the next one.
bool is_tower_partition(const BratteliDiagram& d, const TowerPartition& p, std::string* why = nullptr);
/// Replaces tower v by one tower per part, floors alpha^{k-1}(part).
TowerPartition divide_tower(const BratteliDiagram& d, const TowerPartition& p, int v,
                            const std::vector<ClopenSet>& parts);

}  // namespace cwac
