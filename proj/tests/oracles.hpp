#pragma once

// Brute-force reference implementations. They only read transitions and edge
// ranks, never the library's K0, tower or full-group code.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "cwac/circle.hpp"

namespace oracle {

using cwac::BratteliDiagram;
using cwac::Count;
using Path = std::vector<int>;  // path[i] indexes transition(i).edges()

inline int indegree(const cwac::Transition& t, int w) {
  int n = 0;
  for (const auto& e : t.edges()) n += e.range == w;
  return n;
}

inline int edge_with(const cwac::Transition& t, int w, int rank) {
  const auto& es = t.edges();
  for (std::size_t i = 0; i < es.size(); ++i)
    if (es[i].range == w && es[i].rank == rank) return static_cast<int>(i);
  return -1;
}

// Extends upward from vertex `w` at level `top_len` with rank-1 (or maximal) edges.
inline void fill_above(const BratteliDiagram& d, Path& p, int len, int w, bool maximal) {
  for (int j = len - 1; j >= 0; --j) {
    const auto& t = d.transition(j);
    p[static_cast<std::size_t>(j)] = edge_with(t, w, maximal ? indegree(t, w) : 1);
    w = t.edges()[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])].source;
  }
}

inline std::optional<Path> step(const BratteliDiagram& d, Path p, bool forward) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& t = d.transition(static_cast<int>(i));
    const auto& e = t.edges()[static_cast<std::size_t>(p[i])];
    const int next_rank = forward ? e.rank + 1 : e.rank - 1;
    if (next_rank < 1 || next_rank > indegree(t, e.range)) continue;
    p[i] = edge_with(t, e.range, next_rank);
    fill_above(d, p, static_cast<int>(i), t.edges()[static_cast<std::size_t>(p[i])].source, !forward);
    return p;
  }
  return std::nullopt;
}

inline std::optional<Path> next_path(const BratteliDiagram& d, const Path& p) { return step(d, p, true); }
inline std::optional<Path> prev_path(const BratteliDiagram& d, const Path& p) { return step(d, p, false); }

inline int end_vertex(const BratteliDiagram& d, const Path& p) {
  return p.empty() ? 0 : d.transition(static_cast<int>(p.size()) - 1).edges()[static_cast<std::size_t>(p.back())].range;
}

// Towers of depth n enumerated by walking successors from each minimal path.
struct Towers {
  std::vector<std::vector<Path>> floors;  // floors[v][k-1]
  std::map<Path, Count> cell;             // path -> cell index, towers in vertex order
  std::vector<Count> heights() const {
    std::vector<Count> h;
    for (const auto& t : floors) h.push_back(static_cast<Count>(t.size()));
    return h;
  }
};

inline Towers towers(const BratteliDiagram& d, int n) {
  Towers out;
  Count index = 0;
  for (int v = 0; v < d.vertex_count(n); ++v) {
    Path p(static_cast<std::size_t>(n));
    fill_above(d, p, n, v, false);
    std::vector<Path> tower;
    for (std::optional<Path> q = p; q; q = next_path(d, *q)) {
      out.cell[*q] = index++;
      tower.push_back(*q);
    }
    out.floors.push_back(std::move(tower));
  }
  return out;
}

inline Path truncate(const Path& p, int n) { return Path(p.begin(), p.begin() + n); }

// Pushes the unit (tower heights) down mod p; yes when it vanishes, no when a
// (phase, residue vector) state repeats first.
enum class Scan { yes, no, undecided };
inline Scan divisibility_scan(const BratteliDiagram& d, Count p, int max_levels) {
  std::vector<Count> h{1 % p};
  std::set<std::pair<int, std::vector<Count>>> seen;
  const int head = static_cast<int>(d.head().size());
  const int period = std::max<int>(1, static_cast<int>(d.period().size()));
  for (int n = 0; n <= max_levels; ++n) {
    if (std::all_of(h.begin(), h.end(), [](Count x) { return x == 0; })) return Scan::yes;
    if (d.stationary() && n >= head) {
      const int phase = (n - head) % period;
      if (!seen.insert({phase, h}).second) return Scan::no;
    }
    const auto& t = d.transition(n);
    std::vector<Count> next(static_cast<std::size_t>(t.range_count()), 0);
    for (const auto& e : t.edges()) next[static_cast<std::size_t>(e.range)] = (next[static_cast<std::size_t>(e.range)] + h[static_cast<std::size_t>(e.source)]) % p;
    h = std::move(next);
  }
  return Scan::undecided;
}

// U, alpha U, ..., alpha^{p-1} U partition X, checked on every tower at `depth`:
// all heights divisible by p and membership periodic with one common residue.
inline bool cycles_through_partition(const BratteliDiagram& d, const cwac::ClopenSet& u, Count p, int depth) {
  const Towers coarse = towers(d, u.level);
  const Towers fine = towers(d, depth);
  std::optional<Count> residue;
  for (const auto& tower : fine.floors) {
    if (static_cast<Count>(tower.size()) % p) return false;
    for (std::size_t k = 0; k < tower.size(); ++k) {
      const bool in = u.contains(coarse.cell.at(truncate(tower[k], u.level)));
      const Count r = static_cast<Count>(k) % p;
      if (in && !residue) residue = r;
      if (in != (residue && *residue == r)) return false;
    }
  }
  return residue.has_value();
}

// alpha^k on depth-t cylinders, splitting a cylinder whenever an iterate has no
// successor at its depth. Returns (source, image) cylinder pairs or nullopt past max_depth.
using Piece = std::pair<Path, Path>;
inline bool power_pieces(const BratteliDiagram& d, const Path& x, Count k, int max_depth, std::vector<Piece>& out) {
  Path y = x;
  bool ok = true;
  for (Count i = 0; i < std::abs(k) && ok; ++i) {
    auto z = k > 0 ? next_path(d, y) : prev_path(d, y);
    if (z) y = *z;
    else ok = false;
  }
  if (ok) {
    out.push_back({x, y});
    return true;
  }
  const int t = static_cast<int>(x.size());
  if (t >= max_depth) return false;
  const auto& tr = d.transition(t);
  const int v = end_vertex(d, x);
  for (std::size_t e = 0; e < tr.edges().size(); ++e)
    if (tr.edges()[e].source == v) {
      Path child = x;
      child.push_back(static_cast<int>(e));
      if (!power_pieces(d, child, k, max_depth, out)) return false;
    }
  return true;
}

// Extends both sides of a piece to depth n with identical tails.
inline void refine_piece(const BratteliDiagram& d, const Piece& pc, int n, std::vector<Piece>& out) {
  if (static_cast<int>(pc.first.size()) >= n) {
    out.push_back(pc);
    return;
  }
  const int t = static_cast<int>(pc.first.size());
  const auto& tr = d.transition(t);
  const int v = end_vertex(d, pc.first);
  for (std::size_t e = 0; e < tr.edges().size(); ++e)
    if (tr.edges()[e].source == v) {
      Piece c = pc;
      c.first.push_back(static_cast<int>(e));
      c.second.push_back(static_cast<int>(e));
      refine_piece(d, c, n, out);
    }
}

struct PointwiseImage {
  bool resolved = false;
  int depth = 0;
  std::vector<Piece> pieces;  // all at `depth`
};

// The map x -> alpha^{powers[cell(x)]}(x), resolved on cylinders of depth <= max_depth.
inline PointwiseImage apply_powers(const BratteliDiagram& d, int level, const std::vector<Count>& powers, int max_depth,
                                   int min_depth = 0) {
  PointwiseImage out;
  out.depth = min_depth;
  const Towers cells = towers(d, level);
  std::vector<Piece> raw;
  for (const auto& [path, index] : cells.cell)
    if (!power_pieces(d, path, powers[static_cast<std::size_t>(index)], max_depth, raw)) return out;
  for (const auto& pc : raw) out.depth = std::max(out.depth, static_cast<int>(pc.first.size()));
  for (const auto& pc : raw) refine_piece(d, pc, out.depth, out.pieces);
  out.resolved = true;
  return out;
}

inline bool is_permutation(const BratteliDiagram& d, const PointwiseImage& img) {
  std::set<Path> sources, images;
  for (const auto& [a, b] : img.pieces) sources.insert(a), images.insert(b);
  const auto all = towers(d, img.depth).cell.size();
  return sources.size() == all && images.size() == all && img.pieces.size() == all;
}

// gamma(U) = V on every piece.
inline bool maps_onto(const BratteliDiagram& d, const PointwiseImage& img, const cwac::ClopenSet& u, const cwac::ClopenSet& v) {
  const Towers tu = towers(d, u.level), tv = towers(d, v.level);
  for (const auto& [a, b] : img.pieces)
    if (u.contains(tu.cell.at(truncate(a, u.level))) != v.contains(tv.cell.at(truncate(b, v.level)))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Coin problem with parity, by exhaustive reachability.

// Smallest N with both parities reachable for every n >= N. Once both are
// reachable on a run of 2 m_min / q consecutive n, adding two copies of the
// smallest coin keeps every later n reachable, so the scan can stop there.
inline Count combina_threshold(const std::vector<Count>& m, const std::vector<Count>& chi) {
  Count q = 0;
  for (Count x : m) q = std::gcd(q, x);
  const Count run_needed = 2 * *std::min_element(m.begin(), m.end()) / q;
  std::vector<std::array<bool, 2>> reach{{true, false}};
  auto extend_to = [&](Count top) {
    for (Count s = static_cast<Count>(reach.size()); s <= top; ++s) {
      std::array<bool, 2> r{false, false};
      for (std::size_t i = 0; i < m.size(); ++i)
        if (s >= m[i])
          for (int par = 0; par < 2; ++par)
            if (reach[static_cast<std::size_t>(s - m[i])][static_cast<std::size_t>(par)])
              r[static_cast<std::size_t>((par + chi[i]) % 2)] = true;
      reach.push_back(r);
    }
  };
  Count last_fail = -1, run = 0;
  for (Count n = 0; run < run_needed; ++n) {
    extend_to(n * q);
    const auto& r = reach[static_cast<std::size_t>(n * q)];
    if (r[0] && r[1]) ++run;
    else last_fail = n, run = 0;
  }
  return last_fail + 1;
}

inline bool combina_hypothesis(const std::vector<Count>& m, const std::vector<Count>& chi) {
  bool one = false, two = false;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      one = one || (m[i] % 2 == 0 && chi[i] == 1 && m[j] % 2 == 1);
      two = two || (m[i] % 2 == 1 && chi[i] == 0 && chi[j] == 1);
    }
  return one || two;
}

// ---------------------------------------------------------------------------
// Circle isometries as plain affine maps t -> r + s t.

struct Affine {
  cwac::Rational r{0};
  int s = 1;
};
inline Affine affine(const cwac::IsomT& a) { return {a.rot, a.flip ? -1 : 1}; }
inline Affine after(const Affine& a, const Affine& b) { return {a.r + a.s * b.r, a.s * b.s}; }
inline cwac::Rational sup_distance(const Affine& a, const Affine& b) {
  if (a.s != b.s) return cwac::Rational(1, 2);
  const cwac::Rational t = a.r - b.r;
  cwac::BigInt q = boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t);
  if (cwac::Rational(q) > t) q -= 1;
  const cwac::Rational f = t - cwac::Rational(q);
  const cwac::Rational g = 1 - f;
  return f < g ? f : g;
}

// Two-tower stationary system: heights (a, b) at level 1, then full 2x2 incidence.
inline BratteliDiagram two_tower(Count a, Count b) {
  std::vector<cwac::Edge> top;
  for (Count r = 1; r <= a; ++r) top.push_back({0, 0, static_cast<int>(r)});
  for (Count r = 1; r <= b; ++r) top.push_back({0, 1, static_cast<int>(r)});
  cwac::Transition head(1, 2, top);
  cwac::Transition full(2, 2, {{0, 0, 1}, {1, 0, 2}, {0, 1, 1}, {1, 1, 2}});
  return BratteliDiagram({head}, {full});
}

}  // namespace oracle
