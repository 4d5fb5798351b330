#include "cwac/bratteli.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <sstream>

namespace cwac {

namespace {
std::atomic<int> g_refine_budget{8};

std::string vertex_name(int level, int v) {
  return "level " + std::to_string(level) + " vertex " + std::to_string(v);
}
}  // namespace

int refine_budget() { return g_refine_budget.load(); }

void set_refine_budget(int levels) {
  if (levels < 0) throw ArgumentError("refinement budget must be nonnegative");
  g_refine_budget.store(levels);
}

// ---------------------------------------------------------------------------
// Transition

Transition::Transition(int source_count, int range_count, std::vector<Edge> edges)
    : source_count_(source_count), range_count_(range_count), edges_(std::move(edges)) {
  if (source_count <= 0 || range_count <= 0) throw StructuralError("transition needs vertices on both levels");
  for (const Edge& e : edges_) {
    if (e.source < 0 || e.source >= source_count) throw StructuralError("edge source " + std::to_string(e.source) + " out of range");
    if (e.range < 0 || e.range >= range_count) throw StructuralError("edge range " + std::to_string(e.range) + " out of range");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.range, a.rank) < std::tie(b.range, b.rank); });
  into_.assign(range_count, {});
  first_.assign(range_count, static_cast<int>(edges_.size()));
  for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
    const Edge& e = edges_[i];
    auto& list = into_[e.range];
    if (list.empty()) first_[e.range] = i;
    if (e.rank != static_cast<int>(list.size()) + 1)
      throw StructuralError("edge ranks into range vertex " + std::to_string(e.range) +
                            " are not 1..indegree (found rank " + std::to_string(e.rank) + ")");
    list.push_back(e.source);
  }
}

int Transition::out_degree(int u) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [u](const Edge& e) { return e.source == u; }));
}

IntMatrix Transition::incidence() const {
  IntMatrix m(range_count_, source_count_);
  for (const Edge& e : edges_) m(e.range, e.source) += 1;
  return m;
}

// ---------------------------------------------------------------------------
// BratteliDiagram

BratteliDiagram::BratteliDiagram(std::vector<Transition> head, std::vector<Transition> period)
    : head_(std::move(head)), period_(std::move(period)) {
  if (head_.empty() && period_.empty()) throw StructuralError("diagram has no transitions");
  std::vector<const Transition*> chain;
  for (auto& t : head_) chain.push_back(&t);
  for (auto& t : period_) chain.push_back(&t);
  if (!period_.empty()) chain.push_back(&period_.front());
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (chain[i]->range_count() != chain[i + 1]->source_count())
      throw StructuralError("vertex count mismatch between consecutive transitions at level " + std::to_string(i + 1));
}

std::optional<int> BratteliDiagram::depth() const {
  if (stationary()) return std::nullopt;
  return static_cast<int>(head_.size());
}

int BratteliDiagram::max_level() const {
  return stationary() ? kStationaryLevelCap : static_cast<int>(head_.size());
}

const Transition& BratteliDiagram::transition(int n) const {
  if (n < 0) throw ArgumentError("negative level");
  const int h = static_cast<int>(head_.size());
  if (n < h) return head_[n];
  if (!stationary() || n >= kStationaryLevelCap)
    throw DepthError("level " + std::to_string(n + 1) + " exceeds the materialized depth " + std::to_string(max_level()));
  return period_[(n - h) % period_.size()];
}

int BratteliDiagram::phase(int n) const {
  const int h = static_cast<int>(head_.size());
  if (n < h || !stationary()) return n;
  return h + (n - h) % static_cast<int>(period_.size());
}

int BratteliDiagram::vertex_count(int n) const {
  if (n == 0) return head_.empty() ? period_.front().source_count() : head_.front().source_count();
  return transition(n - 1).range_count();
}

std::vector<Count> BratteliDiagram::heights(int n) const {
  if (n > max_level()) throw DepthError("level " + std::to_string(n) + " exceeds the materialized depth");
  std::vector<Count> h(vertex_count(0), 1);
  for (int i = 0; i < n; ++i) {
    const Transition& t = transition(i);
    std::vector<Count> next(t.range_count(), 0);
    for (int w = 0; w < t.range_count(); ++w)
      for (int u : t.sources_into(w)) next[w] = checked_add(next[w], h[u]);
    h = std::move(next);
  }
  return h;
}

IntMatrix BratteliDiagram::incidence(int from, int to) const {
  if (to < from) throw ArgumentError("incidence requested backwards");
  IntMatrix m = IntMatrix::identity(vertex_count(from));
  for (int n = from; n < to; ++n) m = transition(n).incidence() * m;
  return m;
}

BratteliDiagram dyadic_odometer() { return odometer(2); }

BratteliDiagram odometer(int base) {
  if (base < 1) throw ArgumentError("odometer base must be positive");
  std::vector<Edge> edges;
  for (int r = 1; r <= base; ++r) edges.push_back({0, 0, r});
  return BratteliDiagram({}, {Transition(1, 1, edges)});
}

BratteliDiagram fibonacci_diagram() {
  Transition root(1, 2, {{0, 0, 1}, {0, 1, 1}});
  // a=0 receives from a and b, b=1 receives from a.
  Transition even(2, 2, {{0, 0, 1}, {1, 0, 2}, {0, 1, 1}});
  Transition odd(2, 2, {{1, 0, 1}, {0, 0, 2}, {0, 1, 1}});
  return BratteliDiagram({root}, {even, odd});
}

BratteliDiagram builtin_diagram(const std::string& name) {
  if (name == "dyadic") return dyadic_odometer();
  if (name == "triadic") return odometer(3);
  if (name == "fibonacci") return fibonacci_diagram();
  if (name.rfind("odometer", 0) == 0 && name.size() > 8) {
    int base = 0;
    try {
      base = std::stoi(name.substr(8));
    } catch (const std::exception&) {
      throw ArgumentError("bad builtin diagram name: " + name);
    }
    return odometer(base);
  }
  throw ArgumentError("unknown builtin diagram: " + name);
}

// ---------------------------------------------------------------------------
// Partitions and clopen sets

Cell KRPartition::cell(Count index) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), index);
  int v = static_cast<int>(it - offsets.begin()) - 1;
  return {v, index - offsets[v] + 1};
}

bool KRPartition::is_roof(Count index) const {
  Cell c = cell(index);
  return c.floor == heights[c.tower];
}

bool KRPartition::is_base(Count index) const { return cell(index).floor == 1; }

KRPartition kr_partition(const BratteliDiagram& d, int n, bool lumped) {
  if (n < 0) throw ArgumentError("negative level");
  KRPartition p;
  p.level = n;
  p.lumped = lumped;
  p.heights = d.heights(n);
  p.offsets.reserve(p.heights.size());
  for (Count h : p.heights) {
    p.offsets.push_back(p.cell_count);
    p.cell_count = checked_add(p.cell_count, h);
  }
  if (p.cell_count > kMaxCells)
    throw DepthError("cell algebra at level " + std::to_string(n) + " has " + std::to_string(p.cell_count) + " cells");
  return p;
}

ClopenSet ClopenSet::empty(const BratteliDiagram& d, int level) {
  return {level, std::vector<bool>(static_cast<std::size_t>(kr_partition(d, level).cell_count), false)};
}

ClopenSet ClopenSet::whole(const BratteliDiagram& d, int level) {
  return {level, std::vector<bool>(static_cast<std::size_t>(kr_partition(d, level).cell_count), true)};
}

ClopenSet ClopenSet::of_cells(const BratteliDiagram& d, int level, const std::vector<Cell>& cells) {
  KRPartition p = kr_partition(d, level);
  ClopenSet s{level, std::vector<bool>(static_cast<std::size_t>(p.cell_count), false)};
  for (const Cell& c : cells) {
    if (c.tower < 0 || c.tower >= p.tower_count() || c.floor < 1 || c.floor > p.heights[c.tower])
      throw ArgumentError("cell (" + std::to_string(c.tower) + "," + std::to_string(c.floor) + ") outside level " +
                          std::to_string(level));
    s.members[static_cast<std::size_t>(p.index(c.tower, c.floor))] = true;
  }
  return s;
}

Count ClopenSet::size() const { return static_cast<Count>(std::count(members.begin(), members.end(), true)); }

std::vector<Count> ClopenSet::indices() const {
  std::vector<Count> out;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i]) out.push_back(static_cast<Count>(i));
  return out;
}

std::vector<ClopenSet> level_cells(const BratteliDiagram& d, int n) {
  KRPartition p = kr_partition(d, n);
  std::vector<ClopenSet> out;
  for (Count i = 0; i < p.cell_count; ++i) {
    ClopenSet s{n, std::vector<bool>(static_cast<std::size_t>(p.cell_count), false)};
    s.members[static_cast<std::size_t>(i)] = true;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ClopenSet> lumped_cells(const BratteliDiagram& d, int n) {
  KRPartition p = kr_partition(d, n, true);
  std::vector<ClopenSet> out;
  ClopenSet roof{n, std::vector<bool>(static_cast<std::size_t>(p.cell_count), false)};
  for (Count i = 0; i < p.cell_count; ++i) {
    if (p.is_roof(i)) {
      roof.members[static_cast<std::size_t>(i)] = true;
      continue;
    }
    ClopenSet s{n, std::vector<bool>(static_cast<std::size_t>(p.cell_count), false)};
    s.members[static_cast<std::size_t>(i)] = true;
    out.push_back(std::move(s));
  }
  out.push_back(std::move(roof));
  return out;
}

std::vector<Count> parent_map(const BratteliDiagram& d, int n) {
  KRPartition fine = kr_partition(d, n + 1);
  KRPartition coarse = kr_partition(d, n);
  const Transition& t = d.transition(n);
  std::vector<Count> parent(static_cast<std::size_t>(fine.cell_count));
  for (int w = 0; w < t.range_count(); ++w) {
    Count acc = fine.offsets[w];
    for (int u : t.sources_into(w)) {
      for (Count k = 0; k < coarse.heights[u]; ++k) parent[static_cast<std::size_t>(acc + k)] = coarse.offsets[u] + k;
      acc += coarse.heights[u];
    }
  }
  return parent;
}

ClopenSet refine(const BratteliDiagram& d, const ClopenSet& s, int level) {
  if (level < s.level) throw ArgumentError("cannot refine a clopen set to a coarser level");
  ClopenSet cur = s;
  for (int n = s.level; n < level; ++n) {
    auto parent = parent_map(d, n);
    ClopenSet next{n + 1, std::vector<bool>(parent.size())};
    for (std::size_t i = 0; i < parent.size(); ++i) next.members[i] = cur.members[static_cast<std::size_t>(parent[i])];
    cur = std::move(next);
  }
  return cur;
}

ClopenSet coarsen(const BratteliDiagram& d, const ClopenSet& s, int min_level) {
  ClopenSet cur = s;
  while (cur.level > min_level) {
    auto parent = parent_map(d, cur.level - 1);
    KRPartition coarse = kr_partition(d, cur.level - 1);
    std::vector<int> state(static_cast<std::size_t>(coarse.cell_count), -1);
    bool ok = true;
    for (std::size_t i = 0; i < parent.size() && ok; ++i) {
      int& st = state[static_cast<std::size_t>(parent[i])];
      int v = cur.members[i] ? 1 : 0;
      if (st < 0) st = v;
      else if (st != v) ok = false;
    }
    if (!ok) break;
    ClopenSet next{cur.level - 1, std::vector<bool>(state.size())};
    for (std::size_t i = 0; i < state.size(); ++i) next.members[i] = state[i] == 1;
    cur = std::move(next);
  }
  return cur;
}

namespace {
template <class Op>
ClopenSet combine(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b, Op op) {
  int level = std::max(a.level, b.level);
  ClopenSet ra = refine(d, a, level), rb = refine(d, b, level);
  for (std::size_t i = 0; i < ra.members.size(); ++i) ra.members[i] = op(ra.members[i], rb.members[i]);
  return ra;
}
}  // namespace

bool same_set(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b) {
  int level = std::max(a.level, b.level);
  return refine(d, a, level).members == refine(d, b, level).members;
}

ClopenSet set_union(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b) {
  return combine(d, a, b, [](bool x, bool y) { return x || y; });
}

ClopenSet set_intersection(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b) {
  return combine(d, a, b, [](bool x, bool y) { return x && y; });
}

ClopenSet set_difference(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b) {
  return combine(d, a, b, [](bool x, bool y) { return x && !y; });
}

bool disjoint(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b) {
  return set_intersection(d, a, b).is_empty();
}

bool subset(const BratteliDiagram& d, const ClopenSet& a, const ClopenSet& b) {
  return set_difference(d, a, b).is_empty();
}

std::vector<Count> tower_counts(const BratteliDiagram& d, const ClopenSet& s) {
  KRPartition p = kr_partition(d, s.level);
  std::vector<Count> out(p.heights.size(), 0);
  for (Count i = 0; i < p.cell_count; ++i)
    if (s.contains(i)) ++out[p.cell(i).tower];
  return out;
}

bool is_partition(const BratteliDiagram& d, const std::vector<ClopenSet>& sets) {
  if (sets.empty()) return false;
  int level = 0;
  for (const auto& s : sets) level = std::max(level, s.level);
  Count cells = kr_partition(d, level).cell_count;
  std::vector<int> cover(static_cast<std::size_t>(cells), 0);
  for (const auto& s : sets) {
    ClopenSet r = refine(d, s, level);
    for (std::size_t i = 0; i < cover.size(); ++i) cover[i] += r.members[i];
  }
  return std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; });
}

// ---------------------------------------------------------------------------
// Vershik map

namespace {

ClopenSet vershik_step(const BratteliDiagram& d, const ClopenSet& s, bool forward) {
  const int last = std::min(d.max_level(), s.level + refine_budget());
  for (int m = s.level; m <= last; ++m) {
    ClopenSet t = refine(d, s, m);
    KRPartition p = kr_partition(d, m);
    int edge_in = 0;
    for (int v = 0; v < p.tower_count(); ++v) {
      Count idx = forward ? p.index(v, p.heights[v]) : p.index(v, 1);
      edge_in += t.contains(idx);
    }
    if (edge_in != 0 && edge_in != p.tower_count()) continue;

    ClopenSet out{m, std::vector<bool>(t.members.size(), false)};
    for (Count i = 0; i < p.cell_count; ++i) {
      if (!t.contains(i)) continue;
      Cell c = p.cell(i);
      if (forward && c.floor < p.heights[c.tower]) out.members[static_cast<std::size_t>(i + 1)] = true;
      if (!forward && c.floor > 1) out.members[static_cast<std::size_t>(i - 1)] = true;
    }
    if (edge_in == p.tower_count()) {
      for (int v = 0; v < p.tower_count(); ++v)
        out.members[static_cast<std::size_t>(forward ? p.index(v, 1) : p.index(v, p.heights[v]))] = true;
    }
    return out;
  }
  throw DepthError("Vershik image of a level-" + std::to_string(s.level) + " set is not cell-exact within " +
                   std::to_string(last - s.level) + " refinement levels");
}

}  // namespace

ClopenSet vershik_action(const BratteliDiagram& d, const ClopenSet& s, Count power) {
  ClopenSet cur = s;
  const bool forward = power > 0;
  for (Count i = 0; i < (power < 0 ? -power : power); ++i) cur = coarsen(d, vershik_step(d, cur, forward), s.level);
  return cur;
}

// ---------------------------------------------------------------------------
// Paths

Cell cell_of_path(const BratteliDiagram& d, const PathPrefix& p, int top_vertex) {
  int vertex = top_vertex;
  Count floor = 1;
  std::vector<Count> h(d.vertex_count(0), 1);
  if (!p.edges.empty()) {
    const Transition& t0 = d.transition(0);
    if (p.edges[0] < 0 || p.edges[0] >= static_cast<int>(t0.edges().size())) throw ArgumentError("edge index out of range");
    vertex = t0.edges()[p.edges[0]].source;
  }
  for (int i = 0; i < p.length(); ++i) {
    const Transition& t = d.transition(i);
    int ei = p.edges[i];
    if (ei < 0 || ei >= static_cast<int>(t.edges().size())) throw ArgumentError("edge index out of range");
    const Edge& e = t.edges()[ei];
    if (e.source != vertex) throw ArgumentError("path edges do not compose at level " + std::to_string(i));
    Count offset = 0;
    const auto& srcs = t.sources_into(e.range);
    for (int r = 1; r < e.rank; ++r) offset += h[srcs[r - 1]];
    floor += offset;
    vertex = e.range;
    std::vector<Count> next(t.range_count(), 0);
    for (int w = 0; w < t.range_count(); ++w)
      for (int u : t.sources_into(w)) next[w] = checked_add(next[w], h[u]);
    h = std::move(next);
  }
  return {vertex, floor};
}

PathPrefix path_of_cell(const BratteliDiagram& d, int level, const Cell& c) {
  std::vector<std::vector<Count>> hs;
  for (int n = 0; n <= level; ++n) hs.push_back(d.heights(n));
  if (c.tower < 0 || c.tower >= static_cast<int>(hs[level].size()) || c.floor < 1 || c.floor > hs[level][c.tower])
    throw ArgumentError("cell outside level");
  PathPrefix p;
  p.edges.assign(level, 0);
  int w = c.tower;
  Count k = c.floor;
  for (int n = level; n > 0; --n) {
    const Transition& t = d.transition(n - 1);
    const auto& srcs = t.sources_into(w);
    Count acc = 0;
    for (int r = 0; r < static_cast<int>(srcs.size()); ++r) {
      Count hu = hs[n - 1][srcs[r]];
      if (k <= acc + hu) {
        p.edges[n - 1] = t.first_edge_into(w) + r;
        k -= acc;
        w = srcs[r];
        break;
      }
      acc += hu;
    }
  }
  return p;
}

std::optional<PathPrefix> successor_path(const BratteliDiagram& d, const PathPrefix& p) {
  for (int i = 0; i < p.length(); ++i) {
    const Transition& t = d.transition(i);
    const Edge& e = t.edges()[p.edges[i]];
    if (e.rank == static_cast<int>(t.sources_into(e.range).size())) continue;
    PathPrefix q = p;
    q.edges[i] = p.edges[i] + 1;  // next rank, same range (edges sorted by range, rank)
    int vertex = t.edges()[q.edges[i]].source;
    for (int j = i - 1; j >= 0; --j) {
      const Transition& tj = d.transition(j);
      q.edges[j] = tj.first_edge_into(vertex);
      vertex = tj.edges()[q.edges[j]].source;
    }
    return q;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

namespace {

// Source of the maximal (or minimal) edge into each range vertex.
std::vector<int> extreme_sources(const Transition& t, bool maximal) {
  std::vector<int> out(t.range_count(), -1);
  for (int w = 0; w < t.range_count(); ++w) {
    const auto& s = t.sources_into(w);
    if (!s.empty()) out[w] = maximal ? s.back() : s.front();
  }
  return out;
}

ValidationCheck extreme_path_check(const BratteliDiagram& d, int depth, bool maximal) {
  ValidationCheck c{maximal ? "unique maximal path" : "unique minimal path", false, ""};
  if (d.stationary()) {
    // Infinite extreme paths correspond to periodic points of the composed
    // extreme-source map over one period.
    const int start = static_cast<int>(d.head().size());
    const int period = static_cast<int>(d.period().size());
    const int n = d.vertex_count(start);
    std::vector<int> f(n);
    for (int v = 0; v < n; ++v) {
      int x = v;
      for (int i = period - 1; i >= 0; --i) {
        x = extreme_sources(d.transition(start + i), maximal)[x];
        if (x < 0) break;
      }
      f[v] = x;
    }
    int periodic = 0;
    for (int v = 0; v < n; ++v) {
      int x = v;
      bool reach = false;
      for (int it = 0; it < n && x >= 0; ++it) {
        x = f[x];
        if (x == v) {
          reach = true;
          break;
        }
      }
      periodic += reach;
    }
    c.pass = periodic == 1;
    c.witness = std::to_string(periodic) + " infinite " + (maximal ? "maximal" : "minimal") +
                " path(s) (periodic points of the period map)";
    return c;
  }
  // Finite diagrams: all extreme chains from the deepest level must agree on a prefix.
  std::vector<std::vector<int>> chains;
  for (int v = 0; v < d.vertex_count(depth); ++v) {
    std::vector<int> chain(depth + 1, -1);
    chain[depth] = v;
    for (int n = depth; n > 0 && chain[n] >= 0; --n) chain[n - 1] = extreme_sources(d.transition(n - 1), maximal)[chain[n]];
    chains.push_back(chain);
  }
  int agree = -1;
  for (int n = 0; n <= depth; ++n) {
    std::set<int> vs;
    for (auto& ch : chains) vs.insert(ch[n]);
    if (vs.size() == 1 && *vs.begin() >= 0) agree = n;
    else break;
  }
  c.pass = depth == 0 || agree >= 1;
  c.witness = "extreme paths from level " + std::to_string(depth) + " agree down to level " + std::to_string(agree);
  return c;
}

}  // namespace

ValidationReport validate_diagram(const BratteliDiagram& d, int depth) {
  ValidationReport r;
  depth = std::min(depth, d.max_level());
  r.depth_checked = depth;

  ValidationCheck in{"every vertex below the top has an incoming edge", true, ""};
  ValidationCheck out{"every vertex above the bottom has an outgoing edge", true, ""};
  for (int n = 0; n < depth; ++n) {
    const Transition& t = d.transition(n);
    for (int w = 0; w < t.range_count() && in.pass; ++w)
      if (t.sources_into(w).empty()) in = {in.name, false, vertex_name(n + 1, w) + " has in-degree 0"};
    for (int u = 0; u < t.source_count() && out.pass; ++u)
      if (t.out_degree(u) == 0) out = {out.name, false, vertex_name(n, u) + " has out-degree 0"};
  }
  r.checks.push_back(in);
  r.checks.push_back(out);
  r.checks.push_back({"edge ranks form 1..indegree", true, "enforced at construction"});
  if (in.pass && out.pass) {
    r.checks.push_back(extreme_path_check(d, depth, true));
    r.checks.push_back(extreme_path_check(d, depth, false));
  }

  // Positivity window: smallest k with every k-step incidence strictly positive.
  const int starts = d.stationary() ? static_cast<int>(d.head().size() + d.period().size()) : depth;
  for (int k = 1; k <= depth && !r.positivity_window; ++k) {
    bool all = true;
    int checked = 0;
    for (int n = 0; n < starts && all; ++n) {
      if (!d.stationary() && n + k > depth) break;
      all = d.incidence(n, n + k).strictly_positive();
      ++checked;
    }
    if (all && checked > 0) r.positivity_window = k;
  }
  r.checks.push_back({"strict positivity window", r.positivity_window.has_value(),
                      r.positivity_window ? "window " + std::to_string(*r.positivity_window)
                                          : "not found up to depth " + std::to_string(depth)});
  return r;
}

// ---------------------------------------------------------------------------
// Telescoping

namespace {

Transition compose_levels(const BratteliDiagram& d, int from, int to) {
  if (to == from + 1) return d.transition(from);
  // Paths from level `from` into each vertex, in Vershik (reverse lexicographic) order.
  std::vector<std::vector<int>> starts(d.vertex_count(from));
  for (int v = 0; v < d.vertex_count(from); ++v) starts[v] = {v};
  for (int n = from; n < to; ++n) {
    const Transition& t = d.transition(n);
    std::vector<std::vector<int>> next(t.range_count());
    for (int w = 0; w < t.range_count(); ++w) {
      for (int u : t.sources_into(w)) next[w].insert(next[w].end(), starts[u].begin(), starts[u].end());
      if (next[w].size() > 1'000'000) throw DepthError("composed transition too large");
    }
    starts = std::move(next);
  }
  std::vector<Edge> edges;
  for (int w = 0; w < static_cast<int>(starts.size()); ++w)
    for (std::size_t r = 0; r < starts[w].size(); ++r) edges.push_back({starts[w][r], w, static_cast<int>(r) + 1});
  return Transition(d.vertex_count(from), d.vertex_count(to), std::move(edges));
}

}  // namespace

BratteliDiagram telescope(const BratteliDiagram& d, const LevelSelection& sel) {
  if (sel.prefix.empty()) throw ArgumentError("empty level selection");
  if (sel.prefix.front() != 0) throw ArgumentError("level selection must start at the top level");
  for (std::size_t i = 1; i < sel.prefix.size(); ++i)
    if (sel.prefix[i] <= sel.prefix[i - 1]) throw ArgumentError("level selection must be strictly increasing");
  if (sel.step < 0) throw ArgumentError("negative selection step");

  std::vector<Transition> head;
  for (std::size_t i = 0; i + 1 < sel.prefix.size(); ++i) head.push_back(compose_levels(d, sel.prefix[i], sel.prefix[i + 1]));
  if (sel.step == 0) {
    if (head.empty()) throw ArgumentError("selection keeps a single level");
    return BratteliDiagram(std::move(head));
  }
  if (!d.stationary()) throw ArgumentError("periodic selection needs a stationary diagram");
  int level = sel.prefix.back();
  const int h = static_cast<int>(d.head().size());
  while (level < h) {
    head.push_back(compose_levels(d, level, level + sel.step));
    level += sel.step;
  }
  const int p = static_cast<int>(d.period().size());
  const int count = p / std::gcd(p, sel.step);
  std::vector<Transition> period;
  for (int i = 0; i < count; ++i) {
    period.push_back(compose_levels(d, level, level + sel.step));
    level += sel.step;
  }
  return BratteliDiagram(std::move(head), std::move(period));
}

// ---------------------------------------------------------------------------
// Tower partitions

Count TowerPartition::floor_count() const {
  Count n = 0;
  for (auto& t : towers) n += static_cast<Count>(t.size());
  return n;
}

TowerPartition tower_partition(const BratteliDiagram& d, int n) {
  KRPartition p = kr_partition(d, n);
  TowerPartition out;
  for (int v = 0; v < p.tower_count(); ++v) {
    std::vector<ClopenSet> floors;
    for (Count k = 1; k <= p.heights[v]; ++k) floors.push_back(ClopenSet::of_cells(d, n, {{v, k}}));
    out.towers.push_back(std::move(floors));
  }
  return out;
}

bool is_tower_partition(const BratteliDiagram& d, const TowerPartition& p, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::vector<ClopenSet> all;
  for (auto& t : p.towers) {
    if (t.empty()) return fail("empty tower");
    for (auto& f : t) {
      if (f.is_empty()) return fail("empty floor");
      all.push_back(f);
    }
  }
  if (!is_partition(d, all)) return fail("floors do not partition the space");
  ClopenSet roofs = ClopenSet::empty(d, 0), bases = ClopenSet::empty(d, 0);
  for (int v = 0; v < p.tower_count(); ++v) {
    const auto& t = p.towers[v];
    for (std::size_t k = 0; k + 1 < t.size(); ++k)
      if (!same_set(d, vershik_action(d, t[k], 1), t[k + 1]))
        return fail("tower " + std::to_string(v) + " floor " + std::to_string(k + 1) + " does not map onto the next floor");
    roofs = set_union(d, roofs, t.back());
    bases = set_union(d, bases, t.front());
  }
  if (!same_set(d, vershik_action(d, roofs, 1), bases)) return fail("roof set does not map onto the base set");
  return true;
}

TowerPartition divide_tower(const BratteliDiagram& d, const TowerPartition& p, int v, const std::vector<ClopenSet>& parts) {
  if (v < 0 || v >= p.tower_count()) throw ArgumentError("tower index out of range");
  if (parts.empty()) throw PartitionError("no parts given");
  const ClopenSet& base = p.towers[v].front();
  ClopenSet covered = ClopenSet::empty(d, base.level);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].is_empty()) throw PartitionError("part " + std::to_string(i) + " is empty");
    if (!subset(d, parts[i], base)) throw PartitionError("part " + std::to_string(i) + " leaves the base floor");
    if (!disjoint(d, parts[i], covered)) throw PartitionError("part " + std::to_string(i) + " overlaps an earlier part");
    covered = set_union(d, covered, parts[i]);
  }
  if (!same_set(d, covered, base)) throw PartitionError("parts miss part of the base floor");

  TowerPartition out;
  for (int w = 0; w < p.tower_count(); ++w) {
    if (w != v) {
      out.towers.push_back(p.towers[w]);
      continue;
    }
    for (const ClopenSet& part : parts) {
      std::vector<ClopenSet> floors{part};
      for (Count k = 1; k < p.height(v); ++k) floors.push_back(vershik_action(d, floors.back(), 1));
      out.towers.push_back(std::move(floors));
    }
  }
  return out;
}

}  // namespace cwac
