#include "cwac/fullgroup.hpp"

#include <algorithm>
#include <map>

namespace cwac {

bool FullGroupElement::is_identity() const {
  return std::all_of(powers.begin(), powers.end(), [](Count n) { return n == 0; });
}

Count FullGroupElement::max_abs_power() const {
  Count m = 0;
  for (Count n : powers) m = std::max(m, n < 0 ? -n : n);
  return m;
}

FullGroupElement identity_element(const BratteliDiagram& d, int level) { return constant_power(d, level, 0); }

FullGroupElement constant_power(const BratteliDiagram& d, int level, Count n) {
  return {level, std::vector<Count>(static_cast<std::size_t>(kr_partition(d, level).cell_count), n)};
}

FullGroupElement refine(const BratteliDiagram& d, const FullGroupElement& g, int level) {
  CellFunction<Count> f = refine(d, CellFunction<Count>{g.level, g.powers}, level);
  return {f.level, std::move(f.values)};
}

FullGroupElement simplify(const BratteliDiagram& d, const FullGroupElement& g) {
  FullGroupElement cur = g;
  while (cur.level > 0) {
    auto parent = parent_map(d, cur.level - 1);
    std::vector<Count> coarse(static_cast<std::size_t>(kr_partition(d, cur.level - 1).cell_count), 0);
    std::vector<bool> set(coarse.size(), false);
    bool ok = true;
    for (std::size_t i = 0; i < parent.size() && ok; ++i) {
      auto p = static_cast<std::size_t>(parent[i]);
      if (!set[p]) {
        coarse[p] = cur.powers[i];
        set[p] = true;
      } else if (coarse[p] != cur.powers[i]) {
        ok = false;
      }
    }
    if (!ok) break;
    cur = {cur.level - 1, std::move(coarse)};
  }
  return cur;
}

std::vector<ClopenSet> cell_images(const BratteliDiagram& d, const FullGroupElement& g) {
  std::vector<ClopenSet> out;
  auto cells = level_cells(d, g.level);
  if (cells.size() != g.powers.size()) throw ArgumentError("power table does not match its level");
  for (std::size_t i = 0; i < cells.size(); ++i) out.push_back(vershik_action(d, cells[i], g.powers[i]));
  return out;
}

bool is_bijective(const BratteliDiagram& d, const FullGroupElement& g) { return is_partition(d, cell_images(d, g)); }

ClopenSet apply(const BratteliDiagram& d, const FullGroupElement& g, const ClopenSet& s) {
  const int level = std::max(g.level, s.level);
  FullGroupElement gg = refine(d, g, level);
  ClopenSet ss = refine(d, s, level);
  auto cells = level_cells(d, level);
  ClopenSet out = ClopenSet::empty(d, level);
  for (Count i : ss.indices()) out = set_union(d, out, vershik_action(d, cells[static_cast<std::size_t>(i)], gg.powers[static_cast<std::size_t>(i)]));
  return coarsen(d, out, 0);
}

FullGroupElement compose(const BratteliDiagram& d, const FullGroupElement& g, const FullGroupElement& h) {
  const int start = std::max(g.level, h.level);
  const int last = std::min(d.max_level(), start + 2 * refine_budget() + 2);
  for (int m = start; m <= last; ++m) {
    FullGroupElement hh = refine(d, h, m);
    auto images = cell_images(d, hh);
    std::map<int, FullGroupElement> g_at;
    std::vector<Count> powers(hh.powers.size());
    bool ok = true;
    for (std::size_t i = 0; i < images.size() && ok; ++i) {
      const ClopenSet& img = images[i];
      auto it = g_at.find(img.level);
      if (it == g_at.end()) it = g_at.emplace(img.level, refine(d, g, std::max(img.level, g.level))).first;
      ClopenSet at = refine(d, img, it->second.level);
      auto idx = at.indices();
      Count n = it->second.powers[static_cast<std::size_t>(idx.front())];
      for (Count j : idx)
        if (it->second.powers[static_cast<std::size_t>(j)] != n) ok = false;
      powers[i] = checked_add(hh.powers[i], n);
    }
    if (ok) return simplify(d, {m, std::move(powers)});
  }
  throw DepthError("composition not resolvable within the refinement budget");
}

FullGroupElement invert(const BratteliDiagram& d, const FullGroupElement& g) {
  auto images = cell_images(d, g);
  int level = g.level;
  for (const auto& img : images) level = std::max(level, img.level);
  const auto cells = kr_partition(d, level).cell_count;
  std::vector<Count> powers(static_cast<std::size_t>(cells), 0);
  std::vector<bool> hit(powers.size(), false);
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (Count j : refine(d, images[i], level).indices()) {
      if (hit[static_cast<std::size_t>(j)]) throw ArgumentError("element is not injective");
      hit[static_cast<std::size_t>(j)] = true;
      powers[static_cast<std::size_t>(j)] = -g.powers[i];
    }
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) throw ArgumentError("element is not surjective");
  return simplify(d, {level, std::move(powers)});
}

namespace {

// Member floors of s in tower v, ascending.
std::vector<Count> floors_in(const KRPartition& p, const ClopenSet& s, int v) {
  std::vector<Count> out;
  for (Count k = 1; k <= p.heights[v]; ++k)
    if (s.contains(p.index(v, k))) out.push_back(k);
  return out;
}

// Swap the i-th floor of a with the i-th floor of b in every tower.
FullGroupElement floor_swap(const BratteliDiagram& d, int level, const ClopenSet& a, const ClopenSet& b) {
  KRPartition p = kr_partition(d, level);
  FullGroupElement g = identity_element(d, level);
  for (int v = 0; v < p.tower_count(); ++v) {
    auto fa = floors_in(p, a, v), fb = floors_in(p, b, v);
    for (std::size_t i = 0; i < fa.size() && i < fb.size(); ++i) {
      g.powers[static_cast<std::size_t>(p.index(v, fa[i]))] = fb[i] - fa[i];
      g.powers[static_cast<std::size_t>(p.index(v, fb[i]))] = fa[i] - fb[i];
    }
  }
  return g;
}

}  // namespace

FullGroupElement hopf_exchange(const BratteliDiagram& d, const ClopenSet& u, const ClopenSet& v, int bound) {
  const int base = std::max(u.level, v.level);
  if (same_set(d, u, v)) return identity_element(d, 0);
  TriState eq = classes_equal(d, indicator_class(d, u), indicator_class(d, v), bound);
  if (eq.no()) throw ContractError("[1_U] != [1_V]: no full-group element maps U onto V");
  if (!eq.yes()) throw UnknownError("class equality of U and V undecided: " + eq.note);
  const int level = std::max(base, eq.certificate.at("level").get<int>());
  ClopenSet uu = refine(d, u, level), vv = refine(d, v, level);
  FullGroupElement g = floor_swap(d, level, set_difference(d, uu, vv), set_difference(d, vv, uu));
  return simplify(d, g);
}

FullGroupElement hopf_exchange_into(const BratteliDiagram& d, const ClopenSet& u, const ClopenSet& v, int bound) {
  const int base = std::max(u.level, v.level);
  if (subset(d, u, v)) return identity_element(d, 0);
  const int last = std::min(std::max(bound, base), d.max_level());
  for (int level = base; level <= last; ++level) {
    ClopenSet uu = refine(d, u, level), vv = refine(d, v, level);
    auto cu = tower_counts(d, uu), cv = tower_counts(d, vv);
    bool dominated = true;
    for (std::size_t i = 0; i < cu.size(); ++i) dominated = dominated && cu[i] <= cv[i];
    if (!dominated) continue;
    ClopenSet only_u = set_difference(d, uu, vv), only_v = set_difference(d, vv, uu);
    return simplify(d, floor_swap(d, level, only_u, only_v));
  }
  throw UnknownError("no level up to " + std::to_string(last) + " certifies [1_U] <= [1_V]");
}

namespace {

// Euler circuit from `start` through the multigraph cnt[from][to]; smallest label first.
std::vector<int> euler_circuit(std::vector<std::vector<Count>> cnt, int start) {
  std::vector<int> stack{start}, circuit;
  while (!stack.empty()) {
    int u = stack.back();
    auto& row = cnt[static_cast<std::size_t>(u)];
    auto it = std::find_if(row.begin(), row.end(), [](Count c) { return c > 0; });
    if (it == row.end()) {
      circuit.push_back(u);
      stack.pop_back();
    } else {
      --*it;
      stack.push_back(static_cast<int>(it - row.begin()));
    }
  }
  std::reverse(circuit.begin(), circuit.end());
  return circuit;
}

std::optional<FullGroupElement> conjugator_at(const BratteliDiagram& d, int level, const std::vector<ClopenSet>& partition,
                                              const std::vector<ClopenSet>& target) {
  const std::size_t k = partition.size();
  KRPartition p = kr_partition(d, level);
  std::vector<int> label(static_cast<std::size_t>(p.cell_count), -1), tlabel(label.size(), -1);
  for (std::size_t i = 0; i < k; ++i) {
    for (Count c : refine(d, partition[i], level).indices()) label[static_cast<std::size_t>(c)] = static_cast<int>(i);
    for (Count c : refine(d, target[i], level).indices()) tlabel[static_cast<std::size_t>(c)] = static_cast<int>(i);
  }

  // pieces[i][j][v]: cells of P[i] within target[j] in tower v.
  std::vector<std::vector<std::vector<Count>>> pieces(k, std::vector<std::vector<Count>>(k, std::vector<Count>(p.heights.size(), 0)));
  for (Count c = 0; c < p.cell_count; ++c)
    ++pieces[static_cast<std::size_t>(label[static_cast<std::size_t>(c)])][static_cast<std::size_t>(tlabel[static_cast<std::size_t>(c)])][p.cell(c).tower];
  for (auto& row : pieces)
    for (auto& piece : row) {
      bool any = std::any_of(piece.begin(), piece.end(), [](Count x) { return x > 0; });
      bool all = std::all_of(piece.begin(), piece.end(), [](Count x) { return x > 0; });
      if (any && !all) return std::nullopt;
    }

  FullGroupElement sigma = identity_element(d, level);
  for (int v = 0; v < p.tower_count(); ++v) {
    std::vector<std::vector<Count>> cnt(k, std::vector<Count>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) cnt[j][i] = pieces[i][j][static_cast<std::size_t>(v)];
    std::vector<int> circuit = euler_circuit(cnt, 0);
    if (static_cast<Count>(circuit.size()) != p.heights[v] + 1 || circuit.back() != 0) return std::nullopt;

    // Floors of C_{i,j} and of D_{i,j} (label i, predecessor label j), ascending.
    std::map<std::pair<int, int>, std::vector<Count>> from, to;
    for (Count f = 1; f <= p.heights[v]; ++f) {
      auto c = static_cast<std::size_t>(p.index(v, f));
      from[{label[c], tlabel[c]}].push_back(f);
      to[{circuit[static_cast<std::size_t>(f)], circuit[static_cast<std::size_t>(f - 1)]}].push_back(f);
    }
    for (auto& [key, dst] : to) {
      const auto& src = from[key];
      if (src.size() != dst.size()) return std::nullopt;
      for (std::size_t i = 0; i < dst.size(); ++i) sigma.powers[static_cast<std::size_t>(p.index(v, dst[i]))] = src[i] - dst[i];
    }
  }
  return sigma;
}

}  // namespace

std::vector<int> key_conjugator_failures(const BratteliDiagram& d, const FullGroupElement& sigma,
                                         const std::vector<ClopenSet>& partition, const std::vector<ClopenSet>& target) {
  FullGroupElement inv = invert(d, sigma);
  std::vector<int> bad;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    ClopenSet img = apply(d, sigma, vershik_action(d, apply(d, inv, partition[i]), 1));
    if (!same_set(d, img, target[i])) bad.push_back(static_cast<int>(i));
  }
  return bad;
}

FullGroupElement lemma_key_conjugator(const BratteliDiagram& d, const std::vector<ClopenSet>& partition,
                                      const std::vector<ClopenSet>& target, int bound) {
  if (partition.empty() || partition.size() != target.size()) throw ArgumentError("partition and target lists must match");
  if (!is_partition(d, partition)) throw ArgumentError("source sets do not partition the space");
  if (!is_partition(d, target)) throw ContractError("target sets do not partition the space");

  bool trivial = true;
  for (std::size_t i = 0; i < partition.size() && trivial; ++i)
    trivial = same_set(d, vershik_action(d, partition[i], 1), target[i]);
  if (trivial) return identity_element(d, 0);

  int base = 0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    TriState eq = classes_equal(d, indicator_class(d, partition[i]), indicator_class(d, target[i]), bound);
    if (eq.no()) throw ContractError("partition set " + std::to_string(i) + ": [1_U] differs from the class of its target");
    if (!eq.yes()) throw UnknownError("partition set " + std::to_string(i) + ": class equality undecided (" + eq.note + ")");
    base = std::max({base, partition[i].level, target[i].level, eq.certificate.at("level").get<int>()});
  }

  const int last = std::min(d.max_level(), std::max(bound, base));
  for (int level = base; level <= last; ++level) {
    std::optional<FullGroupElement> sigma;
    try {
      sigma = conjugator_at(d, level, partition, target);
    } catch (const DepthError&) {
      break;
    }
    if (!sigma) continue;
    if (!key_conjugator_failures(d, *sigma, partition, target).empty())
      throw ContractError("target sets are not the image partition of a homeomorphism compatible with the classes");
    return simplify(d, *sigma);
  }
  throw UnknownError("no level up to " + std::to_string(last) + " supports the tower labelling");
}

Json to_json(const FullGroupElement& g, const BratteliDiagram& d) {
  KRPartition p = kr_partition(d, g.level);
  Json table = Json::array();
  for (Count i = 0; i < p.cell_count; ++i) {
    if (!g.powers[static_cast<std::size_t>(i)]) continue;
    Cell c = p.cell(i);
    table.push_back({c.tower, c.floor, g.powers[static_cast<std::size_t>(i)]});
  }
  return {{"level", g.level}, {"cells", p.cell_count}, {"powers", table}};
}

FullGroupElement full_group_from_json(const Json& j, const BratteliDiagram& d) {
  FullGroupElement g = identity_element(d, j.at("level").get<int>());
  KRPartition p = kr_partition(d, g.level);
  for (const auto& e : j.at("powers")) {
    int v = e.at(0).get<int>();
    Count k = e.at(1).get<Count>();
    if (v < 0 || v >= p.tower_count() || k < 1 || k > p.heights[v]) throw ArgumentError("power table names a cell outside its level");
    g.powers[static_cast<std::size_t>(p.index(v, k))] = e.at(2).get<Count>();
  }
  return g;
}

}  // namespace cwac
