#include "cwac/kzero.hpp"

#include <atomic>
#include <map>
#include <thread>

namespace cwac {

namespace {

constexpr int kCycleScanLimit = 200000;

// Transition pattern at level n, without the materialization cap (mod-p scans only).
const Transition& pattern_at(const BratteliDiagram& d, int n) {
  const int h = static_cast<int>(d.head().size());
  if (d.stationary() && n >= h) return d.period()[(n - h) % d.period().size()];
  return d.transition(n);
}

std::vector<Count> push_once(const Transition& t, const std::vector<Count>& v) {
  std::vector<Count> out(t.range_count(), 0);
  for (int w = 0; w < t.range_count(); ++w)
    for (int u : t.sources_into(w)) out[w] = checked_add(out[w], v[u]);
  return out;
}

std::vector<Count> push_once_mod(const Transition& t, const std::vector<Count>& v, Count p) {
  std::vector<Count> out(t.range_count(), 0);
  for (int w = 0; w < t.range_count(); ++w)
    for (int u : t.sources_into(w)) out[w] = (out[w] + v[u]) % p;
  return out;
}

std::vector<Count> reduce(std::vector<Count> v, Count p) {
  for (Count& x : v) x = mod_floor(x, p);
  return v;
}

bool all_zero(const std::vector<Count>& v) {
  return std::all_of(v.begin(), v.end(), [](Count x) { return x == 0; });
}

Json element_json(const K0Element& a) { return {{"level", a.level}, {"vector", a.vector}}; }

// First level >= from that starts a period of a stationary diagram.
int aligned_level(const BratteliDiagram& d, int from) {
  const int h = static_cast<int>(d.head().size());
  const int p = static_cast<int>(d.period().size());
  int n = std::max(from, h);
  while ((n - h) % p) ++n;
  return n;
}

CellFunction<Count> reduce_function(const CellFunction<Count>& f, Count m) {
  CellFunction<Count> out = f;
  for (Count& x : out.values) x = mod_floor(x, m);
  return out;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "unknown";
  }
}

K0Element k0_class(const BratteliDiagram& d, const CellFunction<Count>& f) {
  KRPartition p = kr_partition(d, f.level);
  if (static_cast<Count>(f.values.size()) != p.cell_count) throw ArgumentError("cell function size does not match its level");
  K0Element a{f.level, std::vector<Count>(p.heights.size(), 0)};
  for (Count i = 0; i < p.cell_count; ++i) {
    int v = p.cell(i).tower;
    a.vector[v] = checked_add(a.vector[v], f.at(i));
  }
  return a;
}

K0Element unit_class(const BratteliDiagram& d, int level) { return {level, d.heights(level)}; }

K0Element indicator_class(const BratteliDiagram& d, const ClopenSet& s) {
  std::vector<Count> counts = tower_counts(d, s);
  return {s.level, counts};
}

K0Element push_forward(const BratteliDiagram& d, const K0Element& a, int level) {
  if (level < a.level) throw ArgumentError("push_forward target level below the element's level");
  if (static_cast<int>(a.vector.size()) != d.vertex_count(a.level)) throw ArgumentError("K0 vector length does not match its level");
  K0Element out = a;
  for (int n = a.level; n < level; ++n) out.vector = push_once(d.transition(n), out.vector);
  out.level = level;
  return out;
}

K0Element difference(const BratteliDiagram& d, const K0Element& a, const K0Element& b) {
  int level = std::max(a.level, b.level);
  K0Element x = push_forward(d, a, level), y = push_forward(d, b, level);
  for (std::size_t i = 0; i < x.vector.size(); ++i) x.vector[i] = checked_sub(x.vector[i], y.vector[i]);
  return x;
}

bool is_zero(const K0Element& a) { return all_zero(a.vector); }

TriState classes_equal(const BratteliDiagram& d, const K0Element& a, const K0Element& b, int bound) {
  K0Element diff = difference(d, a, b);
  const int last = std::min(bound, d.max_level());
  K0Element cur = diff;
  try {
    for (int n = diff.level; n <= last; ++n) {
      if (n > cur.level) cur = push_forward(d, cur, n);
      if (is_zero(cur))
        return {Verdict::yes, {{"kind", "equal"}, {"a", element_json(a)}, {"b", element_json(b)}, {"level", n}}, ""};
    }
  } catch (const OverflowError&) {
  }

  if (d.stationary()) {
    const int a0 = aligned_level(d, diff.level);
    const int stable = a0 + d.vertex_count(a0) * static_cast<int>(d.period().size());
    if (stable <= d.max_level()) {
      try {
        K0Element pushed = push_forward(d, diff, stable);
        if (is_zero(pushed))
          return {Verdict::yes, {{"kind", "equal"}, {"a", element_json(a)}, {"b", element_json(b)}, {"level", stable}}, ""};
        Json cert{{"kind", "nonzero"},
                  {"a", element_json(a)},
                  {"b", element_json(b)},
                  {"aligned_level", a0},
                  {"stable_level", stable},
                  {"pushed", pushed.vector}};
        try {
          IntMatrix k = integer_kernel(d.incidence(a0, stable));
          Json basis = Json::array();
          for (int c = 0; c < k.cols(); ++c) basis.push_back(k.column(c));
          cert["kernel_basis"] = basis;
        } catch (const OverflowError&) {
        }
        return {Verdict::no, cert, ""};
      } catch (const OverflowError&) {
      }
    }
  }
  return {Verdict::unknown, Json::object(), "level bound " + std::to_string(bound) + " exhausted"};
}

TriState is_coboundary(const BratteliDiagram& d, const CellFunction<Count>& f, int bound) {
  K0Element cls = k0_class(d, f);
  K0Element zero{f.level, std::vector<Count>(cls.vector.size(), 0)};
  TriState t = classes_equal(d, cls, zero, bound);
  if (!t.yes()) return t;

  const int level = t.certificate.at("level").get<int>();
  CellFunction<Count> fine = refine(d, f, level);
  KRPartition p = kr_partition(d, level);
  CellFunction<Count> g{level, std::vector<Count>(fine.values.size(), 0)};
  for (int v = 0; v < p.tower_count(); ++v) {
    Count acc = 0;
    for (Count k = 1; k <= p.heights[v]; ++k) {
      acc = checked_add(acc, fine.at(p.index(v, k)));
      g.values[static_cast<std::size_t>(p.index(v, k))] = acc;
    }
  }
  t.certificate = {{"kind", "coboundary"}, {"f", to_json(f)}, {"g", to_json(g)}};
  return t;
}

TriState divisible_by(const BratteliDiagram& d, const K0Element& a, Count p, int bound) {
  if (p < 1) throw ArgumentError("divisor must be positive");
  auto yes_at = [&](int level) -> TriState {
    K0Element pushed = push_forward(d, a, level);
    std::vector<Count> q(pushed.vector.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = pushed.vector[i] / p;
    return {Verdict::yes, {{"kind", "divisible"}, {"element", element_json(a)}, {"p", p}, {"level", level}, {"quotient", q}}, ""};
  };

  const int h = static_cast<int>(d.head().size());
  const int limit = d.stationary() ? kCycleScanLimit : std::min(bound, d.max_level());
  std::vector<Count> state = reduce(a.vector, p);
  std::map<std::pair<int, std::vector<Count>>, int> seen;
  for (int n = a.level; n <= limit; ++n) {
    if (n > a.level) state = push_once_mod(pattern_at(d, n - 1), state, p);
    if (all_zero(state)) {
      if (n > d.max_level()) break;
      try {
        return yes_at(n);
      } catch (const OverflowError&) {
        break;
      }
    }
    if (d.stationary() && n >= h) {
      auto key = std::make_pair(d.phase(n), state);
      auto [it, fresh] = seen.emplace(key, n);
      if (!fresh)
        return {Verdict::no,
                {{"kind", "not_divisible"}, {"element", element_json(a)}, {"p", p}, {"cycle_start", it->second}, {"cycle_end", n}},
                ""};
    }
  }
  return {Verdict::unknown, Json::object(),
          "no level up to " + std::to_string(limit) + " makes the class divisible by " + std::to_string(p)};
}

bool verify_spectrum_set(const BratteliDiagram& d, const ClopenSet& u, Count p) {
  if (u.is_empty()) return false;
  std::vector<ClopenSet> translates{u};
  for (Count i = 1; i < p; ++i) translates.push_back(vershik_action(d, translates.back(), 1));
  if (!is_partition(d, translates)) return false;
  return same_set(d, vershik_action(d, translates.back(), 1), u);
}

std::vector<SpectrumEntry> periodic_spectrum(const BratteliDiagram& d, Count p_max, int bound, int threads) {
  if (p_max < 1) throw ArgumentError("pMax must be positive");
  std::vector<SpectrumEntry> out(static_cast<std::size_t>(p_max));
  K0Element unit = unit_class(d, 0);

  auto work = [&](Count p) {
    SpectrumEntry e;
    e.p = p;
    e.result = divisible_by(d, unit, p, bound);
    if (e.result.yes()) {
      const int level = e.result.certificate.at("level").get<int>();
      KRPartition part = kr_partition(d, level);
      std::vector<Cell> cells;
      for (int v = 0; v < part.tower_count(); ++v)
        for (Count k = 1; k <= part.heights[v]; k += p) cells.push_back({v, k});
      ClopenSet u = ClopenSet::of_cells(d, level, cells);
      if (!verify_spectrum_set(d, u, p)) throw Error(ErrorCode::unknown, "internal: spectrum base set failed verification");
      e.result.certificate = {{"kind", "spectrum"}, {"p", p}, {"level", level}, {"base_set", to_json(u, d)}};
      e.base_set = std::move(u);
    }
    out[static_cast<std::size_t>(p - 1)] = std::move(e);
  };

  threads = std::max(1, threads);
  if (threads == 1) {
    for (Count p = 1; p <= p_max; ++p) work(p);
    return out;
  }
  std::atomic<Count> next{1};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (Count p = next++; p <= p_max; p = next++) work(p);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Count> spectrum_members(const std::vector<SpectrumEntry>& entries) {
  std::vector<Count> out;
  for (const auto& e : entries)
    if (e.result.yes()) out.push_back(e.p);
  return out;
}

TriState modm_solve(const BratteliDiagram& d, const CellFunction<Count>& f, Count m, int bound) {
  if (m < 1) throw ArgumentError("modulus must be positive");
  CellFunction<Count> fm = reduce_function(f, m);
  TriState div = divisible_by(d, k0_class(d, fm), m, bound);
  if (div.no()) return {Verdict::no, {{"kind", "mod_nonzero"}, {"m", m}, {"f", to_json(fm)}, {"obstruction", div.certificate}}, ""};
  if (!div.yes()) return div;

  const int level = div.certificate.at("level").get<int>();
  CellFunction<Count> fine = refine(d, fm, level);
  KRPartition p = kr_partition(d, level);
  CellFunction<Count> g{level, std::vector<Count>(fine.values.size(), 0)};
  for (int v = 0; v < p.tower_count(); ++v)
    for (Count k = 1; k < p.heights[v]; ++k) {
      Count i = p.index(v, k);
      g.values[static_cast<std::size_t>(i + 1)] = mod_floor(g.at(i) - fine.at(i), m);
    }
  return {Verdict::yes, {{"kind", "mod_zero"}, {"m", m}, {"f", to_json(fm)}, {"g", to_json(g)}}, ""};
}

TriState mod2_solve(const BratteliDiagram& d, const CellFunction<Count>& f, int bound) { return modm_solve(d, f, 2, bound); }

bool check_mod_transfer(const BratteliDiagram& d, const CellFunction<Count>& f, const CellFunction<Count>& g, Count m) {
  if (f.level > g.level) return false;
  CellFunction<Count> fine = refine(d, f, g.level);
  KRPartition p = kr_partition(d, g.level);
  if (static_cast<Count>(g.values.size()) != p.cell_count) return false;
  Count base = g.at(p.index(0, 1));
  for (int v = 0; v < p.tower_count(); ++v)
    if (mod_floor(g.at(p.index(v, 1)) - base, m)) return false;
  for (Count i = 0; i < p.cell_count; ++i) {
    Count next = p.is_roof(i) ? base : g.at(i + 1);
    if (mod_floor(g.at(i) - next - fine.at(i), m)) return false;
  }
  return true;
}

bool check_coboundary_transfer(const BratteliDiagram& d, const CellFunction<Count>& f, const CellFunction<Count>& g) {
  if (f.level > g.level) return false;
  CellFunction<Count> fine = refine(d, f, g.level);
  KRPartition p = kr_partition(d, g.level);
  if (static_cast<Count>(g.values.size()) != p.cell_count) return false;
  Count roof = g.at(p.index(0, p.heights[0]));
  for (int v = 0; v < p.tower_count(); ++v)
    if (g.at(p.index(v, p.heights[v])) != roof) return false;
  for (Count i = 0; i < p.cell_count; ++i) {
    Count prev = p.is_base(i) ? roof : g.at(i - 1);
    if (g.at(i) - prev != fine.at(i)) return false;
  }
  return true;
}

CellFunction<Count> transfer_of(const TriState& t) { return count_function_from_json(t.certificate.at("g")); }

}  // namespace cwac
