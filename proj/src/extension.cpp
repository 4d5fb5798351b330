#include "cwac/extension.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace cwac {
namespace {

constexpr int kScanLimit = 200000;

const Transition& pattern_at(const BratteliDiagram& d, int n) {
  const int h = static_cast<int>(d.head().size());
  if (n < h) return d.head()[static_cast<std::size_t>(n)];
  if (!d.stationary()) return d.transition(n);
  return d.period()[static_cast<std::size_t>((n - h) % static_cast<int>(d.period().size()))];
}

std::vector<Count> push_mod(const Transition& t, const std::vector<Count>& v, Count m) {
  std::vector<Count> out(static_cast<std::size_t>(t.range_count()), 0);
  for (const Edge& e : t.edges()) out[e.range] = (out[e.range] + v[e.source]) % m;
  return out;
}

std::vector<Count> sums_at_own_level(const BratteliDiagram& d, const ZmCocycle& c) {
  KRPartition p = kr_partition(d, c.values.level);
  std::vector<Count> s(p.heights.size(), 0);
  for (int v = 0; v < p.tower_count(); ++v)
    for (Count k = 1; k <= p.heights[v]; ++k) s[v] = (s[v] + mod_floor(c.values.at(p.index(v, k)), c.m)) % c.m;
  return s;
}

IntMatrix relation_matrix(const std::vector<Count>& sums, Count m) {
  const int towers = static_cast<int>(sums.size()) * static_cast<int>(m);
  IntMatrix r(towers, static_cast<int>(m));
  for (std::size_t v = 0; v < sums.size(); ++v)
    for (Count j = 0; j < m; ++j) {
      int t = static_cast<int>(v * m + j);
      r(t, static_cast<int>((j + sums[v]) % m)) += 1;
      r(t, static_cast<int>(j)) -= 1;
    }
  return r;
}

// Uniform value of f over s, or nullopt when s meets cells with different values.
std::optional<Count> uniform_value(const BratteliDiagram& d, const CellFunction<Count>& f, const ClopenSet& s) {
  const int level = std::max(f.level, s.level);
  CellFunction<Count> ff = refine(d, f, level);
  ClopenSet ss = refine(d, s, level);
  std::optional<Count> out;
  for (Count i : ss.indices()) {
    if (out && *out != ff.at(i)) return std::nullopt;
    out = ff.at(i);
  }
  return out;
}

}  // namespace

SkewDirectedSystem::SkewDirectedSystem(DiagramPtr base, ZmCocycle c, int start_level)
    : base_(std::move(base)), c_(std::move(c)), start_(start_level) {
  if (c_.m < 1) throw ArgumentError("modulus must be positive");
  for (auto& x : c_.values.values) x = mod_floor(x, c_.m);
  if (start_ < c_.values.level) throw ArgumentError("start level below the cocycle's level");
  CellFunction<Count> fine = refine(*base_, c_.values, start_);
  KRPartition p = kr_partition(*base_, start_);
  roof_value_ = fine.at(p.index(0, p.heights[0]));
  for (int v = 1; v < p.tower_count(); ++v)
    if (fine.at(p.index(v, p.heights[v])) != roof_value_) throw ArgumentError("cocycle not constant on the roof set at the start level");
}

std::vector<Count> SkewDirectedSystem::tower_sums(int level) const {
  if (level < c_.values.level) throw ArgumentError("level below the cocycle's level");
  std::vector<Count> s = sums_at_own_level(*base_, c_);
  for (int n = c_.values.level; n < level; ++n) s = push_mod(base_->transition(n), s, c_.m);
  return s;
}

std::vector<std::vector<Count>> SkewDirectedSystem::partial_sums(int level) const {
  CellFunction<Count> fine = refine(*base_, c_.values, level);
  KRPartition p = kr_partition(*base_, level);
  std::vector<std::vector<Count>> out(p.heights.size());
  for (int v = 0; v < p.tower_count(); ++v) {
    Count acc = 0;
    for (Count k = 1; k <= p.heights[v]; ++k) {
      out[v].push_back(acc);
      acc = (acc + fine.at(p.index(v, k))) % c_.m;
    }
  }
  return out;
}

IntMatrix SkewDirectedSystem::incidence(int level) const {
  const Transition& t = base_->transition(level);
  std::vector<Count> s = tower_sums(level);
  IntMatrix out(tower_count(level + 1), tower_count(level));
  for (int w = 0; w < t.range_count(); ++w) {
    Count offset = 0;
    for (int u : t.sources_into(w)) {
      for (Count j = 0; j < c_.m; ++j) out(tower_index(w, j), tower_index(u, j + offset)) += 1;
      offset = (offset + s[u]) % c_.m;
    }
  }
  return out;
}

IntMatrix SkewDirectedSystem::relations(int level) const { return relation_matrix(tower_sums(level), c_.m); }

IntMatrix SkewDirectedSystem::gamma(int level) const {
  const int n = tower_count(level);
  IntMatrix g(n, n);
  for (int v = 0; v < base_->vertex_count(level); ++v)
    for (Count j = 0; j < c_.m; ++j) g(tower_index(v, j + 1), tower_index(v, j)) = 1;
  return g;
}

std::vector<Count> SkewDirectedSystem::pi_star(const K0Element& a) const {
  std::vector<Count> out(static_cast<std::size_t>(tower_count(a.level)), 0);
  for (std::size_t v = 0; v < a.vector.size(); ++v)
    for (Count j = 0; j < c_.m; ++j) out[static_cast<std::size_t>(tower_index(static_cast<int>(v), j))] = a.vector[v];
  return out;
}

IntMatrix SkewDirectedSystem::pi_star_matrix(int level) const {
  const int vc = base_->vertex_count(level);
  IntMatrix p(tower_count(level), vc);
  for (int v = 0; v < vc; ++v)
    for (Count j = 0; j < c_.m; ++j) p(tower_index(v, j), v) = 1;
  return p;
}

std::vector<Count> SkewDirectedSystem::unit(int level) const { return pi_star(unit_class(*base_, level)); }

SkewDirectedSystem build_extension(DiagramPtr d, const ZmCocycle& c, int bound) {
  if (c.m < 1) throw ArgumentError("modulus must be positive");
  if (static_cast<Count>(c.values.values.size()) != kr_partition(*d, c.values.level).cell_count)
    throw ArgumentError("cocycle does not have one value per cell");
  // c on the roof cell of each tower, followed upward along maximal edges.
  CellFunction<Count> own = c.values;
  KRPartition p = kr_partition(*d, own.level);
  std::vector<Count> roof;
  for (int v = 0; v < p.tower_count(); ++v) roof.push_back(mod_floor(own.at(p.index(v, p.heights[v])), c.m));
  int level = own.level;
  for (;;) {
    if (std::all_of(roof.begin(), roof.end(), [&](Count x) { return x == roof[0]; })) break;
    if (level >= bound || level >= d->max_level())
      throw DepthError("cocycle is not constant on the roof set by level " + std::to_string(level));
    const Transition& t = d->transition(level);
    std::vector<Count> next;
    for (int w = 0; w < t.range_count(); ++w) next.push_back(roof[t.sources_into(w).back()]);
    roof = std::move(next);
    ++level;
  }
  SkewDirectedSystem ext(d, c, level);

  if (c.m == 1) {
    ext.minimality = {Verdict::yes, {{"kind", "minimal"}, {"m", 1}}, ""};
    return ext;
  }
  Json parts = Json::array();
  bool unknown = false;
  for (Count k = 1; k < c.m; ++k) {
    CellFunction<Count> kc = c.values;
    for (auto& x : kc.values) x = mod_floor(k * x, c.m);
    TriState t = modm_solve(*d, kc, c.m, bound);
    if (t.yes()) {
      ext.minimality = {Verdict::no, {{"kind", "not_minimal"}, {"k", k}, {"transfer", t.certificate}}, ""};
      return ext;
    }
    if (!t.no()) unknown = true;
    parts.push_back(t.certificate);
  }
  if (unknown)
    ext.minimality = {Verdict::unknown, Json::object(), "some multiple of c could not be decided modulo m"};
  else
    ext.minimality = {Verdict::yes, {{"kind", "minimal"}, {"m", c.m}, {"obstructions", parts}}, ""};
  return ext;
}

std::vector<Count> f0_class(const SkewDirectedSystem& ext, int level) {
  if (level < ext.start_level()) throw ArgumentError("f0 is tower-constant only from the start level on");
  const BratteliDiagram& d = ext.base();
  const Count m = ext.m();
  CellFunction<Count> fine = refine(d, ext.cocycle().values, level);
  KRPartition p = kr_partition(d, level);
  auto s = ext.partial_sums(level);
  std::vector<Count> out(static_cast<std::size_t>(ext.tower_count(level)), 0);
  for (int v = 0; v < p.tower_count(); ++v)
    for (Count j = 0; j < m; ++j) {
      Count total = 0;
      for (Count k = 1; k <= p.heights[v]; ++k) {
        Count prev = k == 1 ? ext.roof_value() : fine.at(p.index(v, k - 1));
        Count fiber = (j + s[v][static_cast<std::size_t>(k - 1)]) % m;
        if (fiber < prev) ++total;
      }
      out[static_cast<std::size_t>(ext.tower_index(v, j))] = total;
    }
  return out;
}

F0Check check_f0_identity(const SkewDirectedSystem& ext, int level) {
  const BratteliDiagram& d = ext.base();
  const Count m = ext.m();
  F0Check r;
  r.level = level;
  CellFunction<Count> fine = refine(d, ext.cocycle().values, level);
  KRPartition p = kr_partition(d, level);
  for (int v = 0; v < p.tower_count(); ++v)
    for (Count k = 1; k <= p.heights[v]; ++k) {
      std::optional<Count> prev;
      if (k > 1) {
        prev = fine.at(p.index(v, k - 1));
      } else {
        ClopenSet back = vershik_action(d, ClopenSet::of_cells(d, level, {{v, k}}), -1);
        prev = uniform_value(d, fine, back);
      }
      if (!prev) {
        r.mismatches.push_back("c o alpha^-1 not constant on cell (" + std::to_string(v) + "," + std::to_string(k) + ")");
        continue;
      }
      auto f0 = [&](Count fiber) -> Count { return mod_floor(fiber, m) < *prev ? 1 : 0; };
      for (Count t = 0; t < m; ++t) {
        Count lhs = f0(t) - f0(t - 1);
        Count rhs = (t == 0 ? 1 : 0) - (mod_floor(t - *prev, m) == 0 ? 1 : 0);
        ++r.cells_checked;
        if (lhs != rhs)
          r.mismatches.push_back("cell (" + std::to_string(v) + "," + std::to_string(k) + ") x {" + std::to_string(t) + "}");
      }
    }
  return r;
}

TorsionReport torsion_check(const SkewDirectedSystem& ext, int level, int bound) {
  TorsionReport rep;
  rep.hypothesis_minimal = ext.minimality.yes();
  const int start = std::max(level, ext.start_level());
  rep.f0_identity = check_f0_identity(ext, start);
  const Count m = ext.m();
  const int last = std::min(bound, ext.base().max_level());
  for (int n = start; n <= last; ++n) {
    TorsionLevel t;
    t.level = n;
    const int towers = ext.tower_count(n);
    IntMatrix rel = ext.relations(n);
    IntMatrix g = ext.gamma(n);
    IntMatrix aug(towers, towers + static_cast<int>(m));
    for (int r = 0; r < towers; ++r) {
      for (int c = 0; c < towers; ++c) aug(r, c) = (r == c ? 1 : 0) - g(r, c);
      for (int c = 0; c < m; ++c) aug(r, towers + c) = -rel(r, c);
    }
    IntMatrix ker = integer_kernel(aug);
    IntMatrix gens(towers, ker.cols());
    for (int c = 0; c < ker.cols(); ++c)
      for (int r = 0; r < towers; ++r) gens(r, c) = ker(r, c);
    IntMatrix basis = lattice_basis(gens);

    IntMatrix pi = ext.pi_star_matrix(n);
    IntMatrix sub(towers, pi.cols() + static_cast<int>(m));
    for (int r = 0; r < towers; ++r) {
      for (int c = 0; c < pi.cols(); ++c) sub(r, c) = pi(r, c);
      for (int c = 0; c < m; ++c) sub(r, pi.cols() + c) = rel(r, c);
    }
    t.quotient = quotient_structure(basis, sub);

    std::vector<Count> f0 = f0_class(ext, n);
    t.f0_in_kernel = solve_integer(basis, f0).has_value();
    if (t.f0_in_kernel) {
      const Count order = t.quotient.torsion_order();
      for (Count k = 1; k <= std::max<Count>(order, 1); ++k) {
        std::vector<Count> kf(f0.size());
        for (std::size_t i = 0; i < f0.size(); ++i) kf[i] = checked_mul(k, f0[i]);
        if (solve_integer(sub, kf)) {
          t.f0_order = k;
          break;
        }
      }
    }
    rep.levels.push_back(std::move(t));
    const std::size_t c = rep.levels.size();
    if (c >= 2) {
      const auto& a = rep.levels[c - 1].quotient;
      const auto& b = rep.levels[c - 2].quotient;
      if (a.torsion == b.torsion && a.free_rank == b.free_rank) break;
    }
  }
  if (rep.levels.size() < 2) {
    rep.note = "invariant factors did not stabilize within the bound";
    return rep;
  }
  const TorsionLevel& t = rep.levels.back();
  const auto& prev = rep.levels[rep.levels.size() - 2].quotient;
  if (!(prev.torsion == t.quotient.torsion && prev.free_rank == t.quotient.free_rank)) {
    rep.note = "invariant factors did not stabilize within the bound";
    return rep;
  }
  const bool cyclic_m = t.quotient.free_rank == 0 &&
                        (m == 1 ? t.quotient.torsion.empty() : t.quotient.torsion == std::vector<Count>{m});
  const bool generated = t.f0_in_kernel && t.f0_order == m;
  rep.verdict = cyclic_m && generated && rep.f0_identity.pass() ? Verdict::yes : Verdict::no;
  if (!cyclic_m) rep.note = "quotient is not cyclic of order m";
  else if (!generated) rep.note = "f0 does not generate the quotient";
  return rep;
}

TriState extension_divisible(const SkewDirectedSystem& ext, Count p, int bound) {
  if (p < 1) throw ArgumentError("divisor must be positive");
  const BratteliDiagram& d = ext.base();
  const Count m = ext.m();
  const int head = static_cast<int>(d.head().size());
  const int limit = d.stationary() ? kScanLimit : std::min(bound, d.max_level());
  std::vector<Count> sums = ext.tower_sums(ext.start_level());
  std::vector<Count> heights;
  {
    KRPartition part = kr_partition(d, ext.start_level());
    for (Count h : part.heights) heights.push_back(h % p);
  }
  std::map<std::tuple<int, std::vector<Count>, std::vector<Count>>, int> seen;
  for (int n = ext.start_level(); n <= limit; ++n) {
    if (n > ext.start_level()) {
      const Transition& t = pattern_at(d, n - 1);
      sums = push_mod(t, sums, m);
      heights = push_mod(t, heights, p);
    }
    const int towers = static_cast<int>(sums.size() * m);
    IntMatrix rel = relation_matrix(sums, m);
    IntMatrix aug(towers, towers + static_cast<int>(m));
    std::vector<Count> rhs(static_cast<std::size_t>(towers));
    for (int r = 0; r < towers; ++r) {
      aug(r, r) = p;
      for (int c = 0; c < m; ++c) aug(r, towers + c) = rel(r, c);
      rhs[static_cast<std::size_t>(r)] = heights[static_cast<std::size_t>(r / m)];
    }
    if (auto x = solve_integer(aug, rhs))
      return {Verdict::yes,
              {{"kind", "ext_divisible"}, {"p", p}, {"level", n}, {"tower_sums", sums}, {"heights_mod_p", heights},
               {"combination", *x}},
              ""};
    if (d.stationary() && n >= head) {
      auto key = std::make_tuple(d.phase(n), sums, heights);
      auto [it, fresh] = seen.emplace(key, n);
      if (!fresh)
        return {Verdict::no, {{"kind", "ext_not_divisible"}, {"p", p}, {"cycle_start", it->second}, {"cycle_end", n}}, ""};
    }
  }
  return {Verdict::unknown, Json::object(), "no level up to " + std::to_string(limit) + " decides divisibility by " + std::to_string(p)};
}

ExtensionSpectrum ps_extension(const SkewDirectedSystem& ext, Count p_max, int bound) {
  if (ext.m() != 2) throw ArgumentError("the spectrum formula needs m = 2");
  const BratteliDiagram& d = ext.base();
  ExtensionSpectrum out;
  bool unknown = false;

  auto base = periodic_spectrum(d, p_max, bound);
  Json base_json = Json::array();
  for (const auto& e : base) {
    if (e.result.yes()) out.base.push_back(e.p);
    if (e.result.verdict == Verdict::unknown) unknown = true;
    base_json.push_back({{"p", e.p}, {"verdict", verdict_name(e.result.verdict)}});
  }

  Json direct_json = Json::array();
  for (Count p = 1; p <= p_max; ++p) {
    TriState t = extension_divisible(ext, p, bound);
    if (t.yes()) out.direct.push_back(p);
    if (t.verdict == Verdict::unknown) unknown = true;
    direct_json.push_back({{"p", p}, {"verdict", verdict_name(t.verdict)}, {"certificate", t.certificate}});
  }

  // Formula: doubled exactly when [c] is nonzero mod 2 and matches [f] with 2^{n-1}[f] = [1].
  TriState cls = mod2_solve(d, ext.cocycle().values, bound);
  out.certificates["class_of_c"] = cls.certificate;
  bool doubled = false;
  if (cls.verdict == Verdict::unknown) {
    unknown = true;
  } else if (cls.no()) {
    K0Element unit = unit_class(d, 0);
    for (int k = 1; k < 62; ++k) {
      TriState t = divisible_by(d, unit, Count{1} << k, bound);
      if (t.yes()) continue;
      if (!t.no()) {
        unknown = true;
        break;
      }
      out.n = k;
      const Count q = Count{1} << (k - 1);
      const int level = k == 1 ? ext.cocycle().values.level
                               : divisible_by(d, unit, q, bound).certificate.at("level").get<int>();
      const int lv = std::max(level, ext.cocycle().values.level);
      KRPartition part = kr_partition(d, lv);
      CellFunction<Count> sum = refine(d, ext.cocycle().values, lv);
      for (int v = 0; v < part.tower_count(); ++v)
        for (Count j = 1; j <= part.heights[v]; j += q) sum.values[static_cast<std::size_t>(part.index(v, j))] += 1;
      TriState match = mod2_solve(d, sum, bound);
      out.certificates["divisor_not_in_spectrum"] = t.certificate;
      out.certificates["c_plus_f"] = match.certificate;
      if (match.verdict == Verdict::unknown) unknown = true;
      doubled = match.yes();
      break;
    }
    if (!out.n && !unknown) unknown = true;
  }
  out.branch = doubled ? "doubled" : "equal";
  for (Count p = 1; p <= p_max; ++p) {
    bool in_base = std::binary_search(out.base.begin(), out.base.end(), p);
    bool half = doubled && p % 2 == 0 && std::binary_search(out.base.begin(), out.base.end(), p / 2);
    if (in_base || half) out.formula.push_back(p);
  }
  out.agree = out.direct == out.formula;
  out.contains_base = std::includes(out.direct.begin(), out.direct.end(), out.base.begin(), out.base.end());
  out.certificates["base"] = base_json;
  out.certificates["direct"] = direct_json;
  if (unknown) {
    out.verdict = Verdict::unknown;
    out.note = "some spectrum entry or class test was undecided";
  } else {
    out.verdict = out.agree && out.contains_base ? Verdict::yes : Verdict::no;
    if (!out.agree) out.note = "direct and formula spectra disagree";
  }
  return out;
}

Json to_json(const ZmCocycle& c) { return {{"m", c.m}, {"level", c.values.level}, {"values", c.values.values}}; }

}  // namespace cwac
