#include "cwac/conjsynth.hpp"

#include <algorithm>
#include <numeric>

namespace cwac {
namespace {

// Towers in preference order: tallest first, ties by index.
std::vector<int> preference_order(const std::vector<Count>& heights) {
  std::vector<int> order(heights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return heights[a] > heights[b]; });
  return order;
}

// reach[i][s*2+par]: s is representable by towers order[i..] with parity par.
// Without parities every tower has parity 0 and only par = 0 matters.
std::optional<std::vector<Count>> decompose(Count h, const std::vector<Count>& heights, const std::vector<Count>& parities,
                                            Count parity) {
  if (h < 0) return std::nullopt;
  for (Count x : heights)
    if (x <= 0) throw ArgumentError("tower heights must be positive");
  if (h > (Count{1} << 26)) throw OverflowError("height too large to decompose");
  const auto order = preference_order(heights);
  const std::size_t k = order.size();
  const std::size_t width = static_cast<std::size_t>(h + 1) * 2;
  std::vector<std::vector<char>> reach(k + 1, std::vector<char>(width, 0));
  reach[k][0] = 1;
  for (std::size_t i = k; i-- > 0;) {
    const Count x = heights[order[i]];
    const Count px = mod_floor(parities[order[i]], 2);
    auto& cur = reach[i];
    const auto& nxt = reach[i + 1];
    for (Count s = 0; s <= h; ++s)
      for (Count par = 0; par < 2; ++par) {
        bool ok = nxt[s * 2 + par];
        if (!ok && s >= x) ok = cur[(s - x) * 2 + ((par + px) % 2)];
        cur[s * 2 + par] = ok;
      }
  }
  Count par = mod_floor(parity, 2);
  if (!reach[0][h * 2 + par]) return std::nullopt;
  std::vector<Count> a(heights.size(), 0);
  Count rest = h;
  for (std::size_t i = 0; i < k; ++i) {
    const Count x = heights[order[i]];
    const Count px = mod_floor(parities[order[i]], 2);
    // Largest count c leaving a remainder the later towers can still represent.
    for (Count c = rest / x; c >= 0; --c) {
      Count r = rest - c * x;
      Count pr = mod_floor(par - c * px, 2);
      if (reach[i + 1][r * 2 + pr]) {
        a[order[i]] = c;
        rest = r;
        par = pr;
        break;
      }
    }
  }
  return a;
}

Count gcd_of(const std::vector<Count>& v) {
  Count g = 0;
  for (Count x : v) g = std::gcd(g, x);
  return g;
}

Count tower_parity(const BratteliDiagram& d, const CellFunction<Count>& f, int level, int v) {
  CellFunction<Count> fine = refine(d, f, level);
  KRPartition p = kr_partition(d, level);
  Count s = 0;
  for (Count k = 1; k <= p.heights[v]; ++k) s += mod_floor(fine.at(p.index(v, k)), 2);
  return s % 2;
}

// Level m >= start where the towers of Y have heights >= min_height and every cell of
// the lumped partition lies inside one target set.
std::optional<int> target_level(const BratteliDiagram& y, const std::vector<ClopenSet>& target, int start, Count min_height) {
  for (int m = start; m <= y.max_level() && m <= kStationaryLevelCap; ++m) {
    auto h = y.heights(m);
    if (*std::min_element(h.begin(), h.end()) < min_height) continue;
    bool fits = true;
    for (const ClopenSet& cell : lumped_cells(y, m)) {
      bool inside = false;
      for (const ClopenSet& t : target) {
        if (t.level > m) break;
        if (subset(y, cell, t)) {
          inside = true;
          break;
        }
      }
      if (!inside) {
        fits = false;
        break;
      }
    }
    if (fits) return m;
  }
  return std::nullopt;
}

}  // namespace

Count semigroup_threshold(const std::vector<Count>& heights, Count p) {
  if (heights.empty()) throw ArgumentError("no heights given");
  for (Count x : heights)
    if (x <= 0) throw ArgumentError("tower heights must be positive");
  if (gcd_of(heights) != p) throw ArgumentError("p must be the gcd of the heights");
  std::vector<Count> units;
  for (Count x : heights) units.push_back(x / p);
  const Count smallest = *std::min_element(units.begin(), units.end());
  // Once `smallest` consecutive values are reachable, every later one is.
  std::vector<char> reach{1};
  Count run = 0;
  for (Count n = 1;; ++n) {
    bool ok = false;
    for (Count u : units)
      if (u <= n && reach[static_cast<std::size_t>(n - u)]) ok = true;
    reach.push_back(ok);
    run = ok ? run + 1 : 0;
    if (run == smallest) return n - smallest + 1;
    if (n > (Count{1} << 26)) throw OverflowError("semigroup threshold search too long");
  }
}

std::optional<std::vector<Count>> height_decomposition(Count h, const std::vector<Count>& heights) {
  return decompose(h, heights, std::vector<Count>(heights.size(), 0), 0);
}

std::optional<std::vector<Count>> height_decomposition(Count h, const std::vector<Count>& heights,
                                                       const std::vector<Count>& parities, Count parity) {
  if (parities.size() != heights.size()) throw ArgumentError("one parity per tower expected");
  return decompose(h, heights, parities, parity);
}

Count MatchingPlan::p_cells() const { return std::accumulate(p_heights.begin(), p_heights.end(), Count{0}); }

Count MatchingPlan::q_cells() const {
  Count s = 0;
  for (std::size_t w = 0; w < q_heights.size(); ++w) s += b[w] * q_heights[w];
  return s;
}

MatchingPlan tower_matching(const std::vector<Count>& p_heights, const std::vector<Count>& q_heights,
                            const std::vector<std::vector<Count>>& a) {
  if (a.size() != p_heights.size()) throw ArgumentError("one row of a per P tower expected");
  MatchingPlan plan{p_heights, q_heights, a, std::vector<Count>(q_heights.size(), 0), {}};
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (a[v].size() != q_heights.size()) throw ArgumentError("one column of a per Q tower expected");
    Count total = 0;
    for (std::size_t w = 0; w < q_heights.size(); ++w) {
      if (a[v][w] < 0) throw ArgumentError("negative multiplicity");
      total = checked_add(total, checked_mul(a[v][w], q_heights[w]));
      plan.b[w] += a[v][w];
    }
    if (total != p_heights[v])
      throw ContractError("P tower " + std::to_string(v) + " has height " + std::to_string(p_heights[v]) +
                          " but its Q copies stack to " + std::to_string(total));
  }
  for (std::size_t w = 0; w < q_heights.size(); ++w)
    if (plan.b[w] == 0) throw ContractError("Q tower " + std::to_string(w) + " receives no copy");

  std::vector<Count> next_copy(q_heights.size(), 0);
  for (std::size_t v = 0; v < a.size(); ++v) {
    Count start = 1;
    std::vector<Segment> segs;
    for (std::size_t w = 0; w < q_heights.size(); ++w)
      for (Count c = 0; c < a[v][w]; ++c) {
        segs.push_back({static_cast<int>(w), next_copy[w]++, start});
        start += q_heights[w];
      }
    plan.segments.push_back(std::move(segs));
  }
  return plan;
}

bool verify_matching(const MatchingPlan& plan, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (plan.p_cells() != plan.q_cells()) return fail("P and Q' have different cell counts");
  // pi: Q' cell (w, copy, l) -> P cell (v, k).
  std::vector<std::vector<std::vector<std::pair<std::size_t, Count>>>> pi(plan.q_heights.size());
  for (std::size_t w = 0; w < plan.q_heights.size(); ++w) pi[w].resize(static_cast<std::size_t>(plan.b[w]));
  std::vector<std::vector<char>> hit(plan.p_heights.size());
  for (std::size_t v = 0; v < plan.p_heights.size(); ++v) hit[v].assign(static_cast<std::size_t>(plan.p_heights[v]), 0);
  for (std::size_t v = 0; v < plan.segments.size(); ++v)
    for (const Segment& s : plan.segments[v]) {
      if (s.w < 0 || static_cast<std::size_t>(s.w) >= plan.q_heights.size() || s.copy < 0 || s.copy >= plan.b[s.w])
        return fail("segment names a missing Q' tower");
      auto& img = pi[s.w][static_cast<std::size_t>(s.copy)];
      if (!img.empty()) return fail("Q' tower copy used twice");
      for (Count l = 0; l < plan.q_heights[s.w]; ++l) {
        Count k = s.start + l;
        if (k < 1 || k > plan.p_heights[v]) return fail("segment runs past P tower " + std::to_string(v));
        if (hit[v][static_cast<std::size_t>(k - 1)]++) return fail("P cell hit twice in tower " + std::to_string(v));
        img.emplace_back(v, k);
      }
    }
  for (std::size_t v = 0; v < hit.size(); ++v)
    for (char c : hit[v])
      if (c != 1) return fail("P tower " + std::to_string(v) + " not covered");
  for (const auto& copies : pi)
    for (const auto& img : copies) {
      if (img.empty()) return fail("Q' tower copy unused");
      for (std::size_t l = 1; l < img.size(); ++l)
        if (img[l].first != img[0].first || img[l].second != img[l - 1].second + 1)
          return fail("Q' tower not mapped onto consecutive floors");
    }
  return true;
}

const ClopenSet& PartitionMap::floor_of(Count x_cell) const {
  const auto& [t, k] = cell_to_floor[static_cast<std::size_t>(x_cell)];
  return q_prime.towers[t][static_cast<std::size_t>(k - 1)];
}

PartitionMap identity_map(DiagramPtr d, int level) {
  PartitionMap m;
  m.x = d;
  m.y = d;
  m.x_level = m.y_level = level;
  m.q_prime = tower_partition(*d, level);
  KRPartition p = kr_partition(*d, level);
  std::vector<std::vector<Count>> a(p.heights.size(), std::vector<Count>(p.heights.size(), 0));
  for (int v = 0; v < p.tower_count(); ++v) {
    a[v][v] = 1;
    m.q_tower_source.push_back(v);
    for (Count k = 1; k <= p.heights[v]; ++k) m.cell_to_floor.emplace_back(v, k);
  }
  m.plan = tower_matching(p.heights, p.heights, a);
  return m;
}

ClopenSet map_forward(const PartitionMap& m, const ClopenSet& u) {
  if (u.level > m.x_level) {
    ClopenSet c = coarsen(*m.x, u, 0);
    if (c.level > m.x_level) throw ArgumentError("set is finer than the cells sigma is defined on");
    return map_forward(m, c);
  }
  ClopenSet fine = refine(*m.x, u, m.x_level);
  int level = 0;
  for (const auto& tower : m.q_prime.towers)
    for (const auto& f : tower) level = std::max(level, f.level);
  ClopenSet out = ClopenSet::empty(*m.y, level);
  for (Count i : fine.indices()) out = set_union(*m.y, out, m.floor_of(i));
  return out;
}

std::optional<ClopenSet> map_backward(const PartitionMap& m, const ClopenSet& v) {
  ClopenSet out = ClopenSet::empty(*m.x, m.x_level);
  for (std::size_t i = 0; i < m.cell_to_floor.size(); ++i) {
    const ClopenSet& f = m.floor_of(static_cast<Count>(i));
    if (subset(*m.y, f, v))
      out.members[i] = true;
    else if (!disjoint(*m.y, f, v))
      return std::nullopt;
  }
  return out;
}

std::vector<SegmentTower> segment_towers(const PartitionMap& m) {
  std::vector<SegmentTower> out;
  std::vector<int> first_tower(m.plan.q_heights.size() + 1, 0);
  for (std::size_t w = 0; w < m.plan.q_heights.size(); ++w) first_tower[w + 1] = first_tower[w] + static_cast<int>(m.plan.b[w]);
  for (std::size_t v = 0; v < m.plan.segments.size(); ++v)
    for (const Segment& s : m.plan.segments[v])
      out.push_back({static_cast<int>(v), s.start, m.plan.q_heights[s.w], first_tower[s.w] + static_cast<int>(s.copy)});
  return out;
}

SynthesisResult synthesize_conjugator(DiagramPtr xp, DiagramPtr yp, const std::vector<ClopenSet>& target,
                                      const SynthesisOptions& options) {
  const BratteliDiagram& x = *xp;
  const BratteliDiagram& y = *yp;
  if (target.empty() || !is_partition(y, target)) throw ArgumentError("target sets do not partition Y");
  const bool parity = options.x_parity.has_value() && options.y_parity.has_value();
  SynthesisResult r;

  int start = options.min_y_level;
  for (const ClopenSet& t : target) start = std::max(start, t.level);
  if (parity) start = std::max(start, options.y_parity->level);
  auto m = target_level(y, target, start, options.min_q_height);
  if (!m) {
    r.note = "no level of Y refines the target partition within the materialized depth";
    return r;
  }
  r.y_level = *m;
  const std::vector<Count> q_heights = y.heights(*m);
  r.p = gcd_of(q_heights);

  r.spectrum_check = divisible_by(x, unit_class(x, 0), r.p, options.bound);
  if (r.spectrum_check.no()) {
    // report the smallest divisor of the gcd that already fails; it lies in PS(Y) too
    for (Count d = 2; d < r.p; ++d) {
      if (r.p % d) continue;
      TriState t = divisible_by(x, unit_class(x, 0), d, options.bound);
      if (t.no()) {
        r.p = d;
        r.spectrum_check = std::move(t);
        break;
      }
    }
    r.verdict = Verdict::no;
    r.note = std::to_string(r.p) + " is in the periodic spectrum of Y but not of X";
    return r;
  }
  if (!r.spectrum_check.yes()) {
    r.note = r.spectrum_check.note;
    return r;
  }
  r.threshold = semigroup_threshold(q_heights, r.p);

  std::vector<Count> q_par(q_heights.size(), 0);
  if (parity)
    for (std::size_t w = 0; w < q_heights.size(); ++w) q_par[w] = tower_parity(y, *options.y_parity, *m, static_cast<int>(w));
  const Count reserved = std::accumulate(q_heights.begin(), q_heights.end(), Count{0});
  const Count reserved_par = std::accumulate(q_par.begin(), q_par.end(), Count{0});
  const Count need = checked_add(checked_mul(r.p, r.threshold), reserved);

  int lvl = std::max(options.min_x_level, r.spectrum_check.certificate.at("level").get<int>());
  if (parity) lvl = std::max(lvl, options.x_parity->level);
  std::vector<std::vector<Count>> a;
  std::vector<Count> p_heights;
  for (;; ++lvl) {
    if (lvl > options.bound || lvl > x.max_level() || lvl > kStationaryLevelCap) {
      r.note = "no level of X up to " + std::to_string(options.bound) + " admits a tower matching";
      return r;
    }
    try {
      p_heights = x.heights(lvl);
    } catch (const OverflowError&) {
      r.note = "tower heights of X overflow before a matching level is found";
      return r;
    }
    bool ok = true;
    for (Count h : p_heights)
      if (h % r.p != 0 || h < need) ok = false;
    if (!ok) continue;
    if (kr_partition(x, lvl).cell_count > kMaxCells) {
      r.note = "matching level of X exceeds the cell limit";
      return r;
    }
    a.clear();
    for (std::size_t v = 0; v < p_heights.size() && ok; ++v) {
      Count h = p_heights[v] - (v == 0 ? reserved : 0);
      Count par = parity ? tower_parity(x, *options.x_parity, lvl, static_cast<int>(v)) - (v == 0 ? reserved_par : 0) : 0;
      auto dec = height_decomposition(h, q_heights, q_par, par);
      if (!dec) {
        ok = false;
        break;
      }
      if (v == 0)
        for (auto& c : *dec) ++c;
      a.push_back(std::move(*dec));
    }
    if (ok) break;
  }

  PartitionMap pm;
  pm.x = xp;
  pm.y = yp;
  pm.x_level = lvl;
  pm.y_level = *m;
  pm.plan = tower_matching(p_heights, q_heights, a);

  TowerPartition qp = tower_partition(y, *m);
  for (int w = static_cast<int>(q_heights.size()) - 1; w >= 0; --w) {
    const Count bw = pm.plan.b[w];
    if (bw == 1) continue;
    ClopenSet base = qp.towers[w].front();
    int l = base.level;
    ClopenSet fine = base;
    while (fine.size() < bw) fine = refine(y, base, ++l);
    std::vector<ClopenSet> parts;
    auto idx = fine.indices();
    ClopenSet rest = fine;
    for (Count i = 0; i + 1 < bw; ++i) {
      ClopenSet single = ClopenSet::empty(y, l);
      single.members[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;
      rest.members[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = false;
      parts.push_back(std::move(single));
    }
    parts.push_back(std::move(rest));
    qp = divide_tower(y, qp, w, parts);
  }
  pm.q_prime = std::move(qp);
  for (std::size_t w = 0; w < q_heights.size(); ++w)
    for (Count c = 0; c < pm.plan.b[w]; ++c) pm.q_tower_source.push_back(static_cast<int>(w));

  auto towers = segment_towers(pm);
  KRPartition xp_part = kr_partition(x, lvl);
  pm.cell_to_floor.assign(static_cast<std::size_t>(xp_part.cell_count), {0, 0});
  for (const SegmentTower& s : towers)
    for (Count l = 1; l <= s.height; ++l)
      pm.cell_to_floor[static_cast<std::size_t>(xp_part.index(s.x_tower, s.start + l - 1))] = {s.q_tower, l};

  r.verdict = Verdict::yes;
  r.map = std::move(pm);
  return r;
}

bool ConjugacyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConjugacyCheck& c) { return c.pass; });
}

std::vector<std::string> ConjugacyReport::failing() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.label);
  return out;
}

ConjugacyReport verify_approx_conjugacy(const PartitionMap& m, const std::vector<ClopenSet>& sets, const std::string& prefix) {
  ConjugacyReport rep;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    ConjugacyCheck c{prefix + "[" + std::to_string(i) + "]", false, ""};
    try {
      auto back = map_backward(m, sets[i]);
      if (!back) {
        c.detail = "preimage is not a union of cells";
      } else {
        ClopenSet moved = coarsen(*m.x, vershik_action(*m.x, *back, 1), 0);
        if (moved.level > m.x_level) {
          c.detail = "alpha of the preimage is finer than the cells of sigma";
        } else {
          ClopenSet lhs = map_forward(m, moved);
          ClopenSet rhs = vershik_action(*m.y, sets[i], 1);
          c.pass = same_set(*m.y, lhs, rhs);
          if (!c.pass) c.detail = "sigma alpha sigma^-1 differs from beta";
        }
      }
    } catch (const Error& e) {
      c.detail = e.what();
    }
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

std::vector<ClopenSet> lumped_target(const PartitionMap& m) { return lumped_cells(*m.y, m.y_level); }

Json to_json(const MatchingPlan& plan) {
  Json segs = Json::array();
  for (const auto& tower : plan.segments) {
    Json t = Json::array();
    for (const Segment& s : tower) t.push_back({{"w", s.w}, {"copy", s.copy}, {"start", s.start}});
    segs.push_back(std::move(t));
  }
  return {{"p_heights", plan.p_heights}, {"q_heights", plan.q_heights}, {"a", plan.a}, {"b", plan.b}, {"segments", std::move(segs)}};
}

Json to_json(const PartitionMap& m) {
  Json floors = Json::array();
  for (const auto& tower : m.q_prime.towers) {
    Json t = Json::array();
    for (const ClopenSet& f : tower) t.push_back(to_json(f, *m.y));
    floors.push_back(std::move(t));
  }
  Json cells = Json::array();
  for (const auto& [t, k] : m.cell_to_floor) cells.push_back({t, k});
  return {{"x_level", m.x_level},       {"y_level", m.y_level}, {"plan", to_json(m.plan)},
          {"q_tower_source", m.q_tower_source}, {"q_prime", std::move(floors)}, {"cell_to_floor", std::move(cells)}};
}

PartitionMap partition_map_from_json(const Json& j, DiagramPtr x, DiagramPtr y) {
  PartitionMap m;
  m.x = x;
  m.y = y;
  m.x_level = j.at("x_level").get<int>();
  m.y_level = j.at("y_level").get<int>();
  const Json& p = j.at("plan");
  m.plan = tower_matching(p.at("p_heights").get<std::vector<Count>>(), p.at("q_heights").get<std::vector<Count>>(),
                          p.at("a").get<std::vector<std::vector<Count>>>());
  m.q_tower_source = j.at("q_tower_source").get<std::vector<int>>();
  for (const Json& t : j.at("q_prime")) {
    std::vector<ClopenSet> floors;
    for (const Json& f : t) floors.push_back(clopen_from_json(f, *y));
    m.q_prime.towers.push_back(std::move(floors));
  }
  for (const Json& c : j.at("cell_to_floor")) m.cell_to_floor.emplace_back(c.at(0).get<int>(), c.at(1).get<Count>());
  if (static_cast<Count>(m.cell_to_floor.size()) != kr_partition(*x, m.x_level).cell_count)
    throw ArgumentError("cell_to_floor does not cover the cells of X");
  for (const auto& [t, k] : m.cell_to_floor)
    if (t < 0 || t >= m.q_prime.tower_count() || k < 1 || k > m.q_prime.height(t))
      throw ArgumentError("cell_to_floor names a missing floor");
  return m;
}

}  // namespace cwac
