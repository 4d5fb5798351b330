#include "cwac/circle.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cwac {

Rational frac(const Rational& t) {
  BigInt n = boost::multiprecision::numerator(t);
  BigInt d = boost::multiprecision::denominator(t);
  BigInt q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return t - Rational(q);
}

Rational circle_norm(const Rational& t) {
  Rational f = frac(t);
  Rational g = Rational(1) - f;
  return f < g ? f : g;
}

Rational parse_rational(const std::string& text) {
  auto digits = [](const std::string& s, bool sign_ok) {
    std::size_t i = 0;
    if (sign_ok && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto slash = text.find('/');
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false)) throw ArgumentError("malformed rational '" + text + "'");
  BigInt n(num[0] == '+' ? num.substr(1) : num);
  BigInt d(den);
  if (d == 0) throw ArgumentError("zero denominator in '" + text + "'");
  return Rational(n, d);
}

std::string to_string(const Rational& r) {
  BigInt n = boost::multiprecision::numerator(r);
  BigInt d = boost::multiprecision::denominator(r);
  return d == 1 ? n.str() : n.str() + "/" + d.str();
}

namespace {

template <class T>
std::optional<T> uniform_over(const BratteliDiagram& d, const CellFunction<T>& f, const ClopenSet& s) {
  const int level = std::max(f.level, s.level);
  CellFunction<T> fine_f;
  ClopenSet fine_s;
  const CellFunction<T>& ff = f.level == level ? f : (fine_f = refine(d, f, level));
  const ClopenSet& ss = s.level == level ? s : (fine_s = refine(d, s, level));
  std::optional<T> out;
  for (Count i = 0; i < static_cast<Count>(ss.members.size()); ++i) {
    if (!ss.contains(i)) continue;
    if (out && !(*out == ff.at(i))) return std::nullopt;
    out = ff.at(i);
  }
  return out;
}

// f o alpha on the cells of f.level: the next floor, or a Vershik image at the roof.
template <class T>
std::vector<T> values_after(const BratteliDiagram& d, const CellFunction<T>& f) {
  KRPartition p = kr_partition(d, f.level);
  std::vector<T> out;
  out.reserve(f.values.size());
  for (Count i = 0; i < p.cell_count; ++i) {
    if (!p.is_roof(i)) {
      out.push_back(f.at(i + 1));
      continue;
    }
    Cell c = p.cell(i);
    auto v = uniform_over(d, f, vershik_action(d, ClopenSet::of_cells(d, f.level, {c}), 1));
    if (!v)
      throw DepthError("function not constant on the image of roof cell (" + std::to_string(c.tower) + "," +
                       std::to_string(c.floor) + ")");
    out.push_back(*v);
  }
  return out;
}

const IsomT kReflection{Rational(0), 1};

std::vector<std::string> split_fields(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream in(body);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Count parse_count(const std::string& s, int line, int col) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, col, "expected an integer, got '" + s + "'");
  }
}

// Records after the header, each with its line number.
struct Records {
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
};

Records read_records(const std::string& text) {
  Records r;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto f = split_fields(line);
    if (f.empty()) continue;
    if (r.header.empty()) {
      if (f[0] != "cocycle" || f.size() < 2) throw ParseError(no, 1, "expected a 'cocycle circle' or 'cocycle zm <m>' header");
      r.header = f;
      continue;
    }
    r.rows.emplace_back(no, std::move(f));
  }
  if (r.header.empty()) throw ParseError(no + 1, 1, "missing cocycle header");
  return r;
}

template <class T, class Decode>
CellFunction<T> collect(const Records& r, const BratteliDiagram& d, std::size_t width, Decode decode) {
  if (r.rows.empty()) throw ParseError(1, 1, "cocycle has no records");
  const int level = static_cast<int>(parse_count(r.rows.front().second[0], r.rows.front().first, 1));
  if (level < 0) throw ParseError(r.rows.front().first, 1, "negative level");
  KRPartition p = kr_partition(d, level);
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(p.cell_count));
  for (const auto& [no, f] : r.rows) {
    if (f.size() != width)
      throw ParseError(no, 1, "expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
    if (parse_count(f[0], no, 1) != level) throw ParseError(no, 1, "all records must share one level");
    Count v = parse_count(f[1], no, 2);
    Count k = parse_count(f[2], no, 3);
    if (v < 0 || v >= p.tower_count()) throw ParseError(no, 2, "no tower " + f[1] + " at level " + std::to_string(level));
    if (k < 1 || k > p.heights[static_cast<std::size_t>(v)]) throw ParseError(no, 3, "no floor " + f[2] + " in tower " + f[1]);
    auto& slot = slots[static_cast<std::size_t>(p.index(static_cast<int>(v), k))];
    if (slot) throw ParseError(no, 1, "cell (" + f[1] + "," + f[2] + ") given twice");
    slot = decode(f, no);
  }
  CellFunction<T> out{level, {}};
  for (Count i = 0; i < p.cell_count; ++i) {
    if (!slots[static_cast<std::size_t>(i)]) {
      Cell c = p.cell(i);
      throw ParseError(r.rows.back().first, 1,
                       "cell (" + std::to_string(c.tower) + "," + std::to_string(c.floor) + ") has no record");
    }
    out.values.push_back(*slots[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

IsomT make_isom(const Rational& rot, int flip) {
  if (flip != 0 && flip != 1) throw ArgumentError("flip must be 0 or 1");
  return {frac(rot), flip};
}

IsomT compose(const IsomT& a, const IsomT& b) {
  return make_isom(a.flip ? Rational(a.rot - b.rot) : Rational(a.rot + b.rot), a.flip ^ b.flip);
}

IsomT inverse(const IsomT& a) { return make_isom(a.flip ? a.rot : Rational(-a.rot), a.flip); }

Rational act(const IsomT& a, const Rational& t) { return frac(a.flip ? Rational(a.rot - t) : Rational(a.rot + t)); }

Rational isometry_distance(const IsomT& a, const IsomT& b) {
  if (a.flip != b.flip) return Rational(1, 2);
  return circle_norm(a.rot - b.rot);
}

std::string to_string(const IsomT& a) {
  return a.flip ? "R(" + to_string(a.rot) + ")L" : "R(" + to_string(a.rot) + ")";
}

CellFunction<Count> orientation_function(const CircleCocycle& phi) {
  CellFunction<Count> o{phi.level, {}};
  for (const IsomT& a : phi.values) o.values.push_back(a.flip);
  return o;
}

bool is_rotation_cocycle(const CircleCocycle& phi) {
  return std::all_of(phi.values.begin(), phi.values.end(), [](const IsomT& a) { return a.flip == 0; });
}

CircleCocycle rotation_cocycle(int level, const std::vector<Rational>& rotations) {
  CircleCocycle c{level, {}};
  for (const Rational& r : rotations) c.values.push_back(make_isom(r));
  return c;
}

std::string cocycle_kind(const std::string& text) { return read_records(text).header.at(1); }

CircleCocycle parse_circle_cocycle(const std::string& text, const BratteliDiagram& d) {
  Records r = read_records(text);
  if (r.header[1] != "circle" || r.header.size() != 2) throw ParseError(1, 1, "expected header 'cocycle circle'");
  return collect<IsomT>(r, d, 6, [](const std::vector<std::string>& f, int no) {
    Count num = parse_count(f[3], no, 4);
    Count den = parse_count(f[4], no, 5);
    Count flip = parse_count(f[5], no, 6);
    if (den <= 0) throw ParseError(no, 5, "denominator must be positive");
    if (flip != 0 && flip != 1) throw ParseError(no, 6, "flip must be 0 or 1");
    return make_isom(Rational(num, den), static_cast<int>(flip));
  });
}

ZmCocycle parse_zm_cocycle(const std::string& text, const BratteliDiagram& d) {
  Records r = read_records(text);
  if (r.header[1] != "zm" || r.header.size() != 3) throw ParseError(1, 1, "expected header 'cocycle zm <m>'");
  Count m = parse_count(r.header[2], 1, 3);
  if (m < 1) throw ParseError(1, 3, "modulus must be positive");
  auto values = collect<Count>(r, d, 4, [m](const std::vector<std::string>& f, int no) {
    Count v = parse_count(f[3], no, 4);
    return mod_floor(v, m);
  });
  return {m, std::move(values)};
}

std::string serialize_cocycle(const CircleCocycle& phi, const BratteliDiagram& d) {
  KRPartition p = kr_partition(d, phi.level);
  std::ostringstream out;
  out << "cocycle circle\n";
  for (Count i = 0; i < p.cell_count; ++i) {
    Cell c = p.cell(i);
    const IsomT& a = phi.at(i);
    out << phi.level << ' ' << c.tower << ' ' << c.floor << ' ' << boost::multiprecision::numerator(a.rot) << ' '
        << boost::multiprecision::denominator(a.rot) << ' ' << a.flip << '\n';
  }
  return out.str();
}

std::string serialize_cocycle(const ZmCocycle& c, const BratteliDiagram& d) {
  KRPartition p = kr_partition(d, c.values.level);
  std::ostringstream out;
  out << "cocycle zm " << c.m << '\n';
  for (Count i = 0; i < p.cell_count; ++i) {
    Cell cell = p.cell(i);
    out << c.values.level << ' ' << cell.tower << ' ' << cell.floor << ' ' << mod_floor(c.values.at(i), c.m) << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json to_json(const IsomT& a) { return {{"rot", to_string(a.rot)}, {"flip", a.flip}}; }

Json to_json(const CircleCocycle& phi) {
  Json values = Json::array();
  for (const IsomT& a : phi.values) values.push_back({to_string(a.rot), a.flip});
  return {{"level", phi.level}, {"values", std::move(values)}};
}

TriState orientation_class(const BratteliDiagram& d, const CircleCocycle& phi, int bound) {
  return mod2_solve(d, orientation_function(phi), bound);
}

Straightening straighten(const BratteliDiagram& d, const CircleCocycle& phi, int bound) {
  TriState t = orientation_class(d, phi, bound);
  if (t.no()) throw ContractError("orientation class is nonzero: " + t.certificate.dump());
  if (!t.yes()) throw UnknownError("orientation class undecided: " + t.note);
  Straightening s;
  s.f = transfer_of(t);
  const int level = s.f.level;
  CircleCocycle fine = refine(d, phi, level);
  s.psi = {level, {}};
  for (Count v : s.f.values) s.psi.values.push_back(v ? kReflection : IsomT{});
  std::vector<IsomT> next = values_after(d, s.psi);
  s.xi = {level, {}};
  for (std::size_t i = 0; i < fine.values.size(); ++i) {
    IsomT r = compose(compose(next[i], fine.values[i]), inverse(s.psi.values[i]));
    if (r.flip) throw ContractError("transfer function does not straighten cell " + std::to_string(i));
    s.xi.values.push_back(r);
  }
  return s;
}

std::vector<Count> straightening_failures(const BratteliDiagram& d, const CircleCocycle& phi, const Straightening& s) {
  const int level = std::max({phi.level, s.psi.level, s.xi.level});
  CircleCocycle p = refine(d, phi, level), psi = refine(d, s.psi, level), xi = refine(d, s.xi, level);
  std::vector<IsomT> next = values_after(d, psi);
  std::vector<Count> bad;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    IsomT lhs = compose(compose(next[i], p.values[i]), inverse(psi.values[i]));
    if (!(lhs == xi.values[i]) || xi.values[i].flip) bad.push_back(static_cast<Count>(i));
  }
  return bad;
}

std::optional<IsomT> value_along(const BratteliDiagram& d, const CircleCocycle& f, const ClopenSet& cell, Count power) {
  return uniform_over(d, f, vershik_action(d, cell, power));
}

Rational minimal_lift(const Rational& t) {
  Rational f = frac(t);
  return f <= Rational(1, 2) ? f : f - 1;
}

namespace {

// Value of a Y cocycle on each floor sigma(x), x over the cells of x_level.
CircleCocycle pulled_back(const PartitionMap& m, const CircleCocycle& g, const char* name) {
  CircleCocycle out{m.x_level, {}};
  std::map<int, CircleCocycle> refined;
  for (std::size_t i = 0; i < m.cell_to_floor.size(); ++i) {
    const ClopenSet& floor = m.floor_of(static_cast<Count>(i));
    const int level = std::max(g.level, floor.level);
    auto it = refined.find(level);
    if (it == refined.end()) it = refined.emplace(level, refine(*m.y, g, level)).first;
    auto v = uniform_over(*m.y, it->second, floor);
    if (!v) throw ArgumentError(std::string(name) + " is not constant on the floors of the divided partition");
    out.values.push_back(*v);
  }
  return out;
}

CircleCocycle on_x_cells(const PartitionMap& m, const CircleCocycle& g, const char* name) {
  if (g.level > m.x_level) throw ArgumentError(std::string(name) + " is finer than the cells sigma is defined on");
  return refine(*m.x, g, m.x_level);
}

}  // namespace

EtaFunction eta_construction(const PartitionMap& m, const CircleCocycle& xi, const CircleCocycle& zeta, const Rational& epsilon) {
  if (!is_rotation_cocycle(xi) || !is_rotation_cocycle(zeta)) throw ArgumentError("eta needs rotation cocycles");
  if (epsilon <= 0) throw ArgumentError("epsilon must be positive");
  const BratteliDiagram& x = *m.x;
  CircleCocycle xf = on_x_cells(m, xi, "xi");
  CircleCocycle zs = pulled_back(m, zeta, "zeta");
  KRPartition part = kr_partition(x, m.x_level);

  EtaFunction eta;
  eta.level = m.x_level;
  eta.values.assign(xf.values.size(), Rational(0));
  std::vector<Rational> diff(xf.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = frac(zs.values[i].rot - xf.values[i].rot);

  for (const SegmentTower& s : segment_towers(m)) {
    if (Rational(s.height) * epsilon <= 1)
      throw ContractError("segment in X tower " + std::to_string(s.x_tower) + " starting at floor " + std::to_string(s.start) +
                          " has height " + std::to_string(s.height) + ", not above 1/epsilon");
    SegmentLift lift{s.x_tower, s.start, s.height, Rational(0), Rational(0)};
    Rational total = 0;
    for (Count j = 0; j < s.height; ++j) total += diff[static_cast<std::size_t>(part.index(s.x_tower, s.start + j))];
    lift.kappa = frac(total);
    lift.kappa_lift = minimal_lift(lift.kappa);
    Rational run = 0;
    for (Count j = 0; j < s.height; ++j) {
      const auto i = static_cast<std::size_t>(part.index(s.x_tower, s.start + j));
      eta.values[i] = frac(run - Rational(j) * lift.kappa_lift / Rational(s.height));
      run += diff[i];
    }
    eta.lifts.push_back(lift);
  }

  CellFunction<Rational> ef{m.x_level, eta.values};
  std::vector<Rational> next = values_after(x, ef);
  for (std::size_t i = 0; i < eta.values.size(); ++i) {
    Rational dev = circle_norm((xf.values[i].rot - zs.values[i].rot) - (eta.values[i] - next[i]));
    eta.deviation.push_back(dev);
    if (dev > eta.sup_deviation) eta.sup_deviation = dev;
  }
  return eta;
}

bool OmegaResult::within_bounds() const {
  return std::all_of(tower_within_bound.begin(), tower_within_bound.end(), [](bool b) { return b; });
}

std::vector<Rational> skew_deviation(const PartitionMap& m, const CircleCocycle& phi, const CircleCocycle& psi,
                                     const CircleCocycle& omega) {
  CircleCocycle pf = on_x_cells(m, phi, "phi");
  CircleCocycle ps = pulled_back(m, psi, "psi");
  CircleCocycle om = on_x_cells(m, omega, "omega");
  std::vector<IsomT> next = values_after(*m.x, om);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < pf.values.size(); ++i)
    out.push_back(isometry_distance(compose(ps.values[i], om.values[i]), compose(next[i], pf.values[i])));
  return out;
}

OmegaResult omega_construction(const PartitionMap& m, const CircleCocycle& phi, const CircleCocycle& psi) {
  CircleCocycle pf = on_x_cells(m, phi, "phi");
  CircleCocycle ps = pulled_back(m, psi, "psi");
  KRPartition part = kr_partition(*m.x, m.x_level);

  std::string parity_failures;
  for (int v = 0; v < part.tower_count(); ++v) {
    Count lhs = 0, rhs = 0;
    for (Count k = 1; k <= part.heights[v]; ++k) {
      lhs += pf.at(part.index(v, k)).flip;
      rhs += ps.at(part.index(v, k)).flip;
    }
    if (lhs % 2 != rhs % 2)
      parity_failures += " tower " + std::to_string(v) + ": o(phi)_v = " + std::to_string(lhs % 2) +
                         ", sum of o(psi) over its segments = " + std::to_string(rhs % 2) + ";";
  }
  if (!parity_failures.empty()) throw ContractError("parity hypothesis fails:" + parity_failures);

  OmegaResult r;
  r.omega = {m.x_level, std::vector<IsomT>(pf.values.size())};
  r.chi.resize(static_cast<std::size_t>(part.tower_count()));
  for (int v = 0; v < part.tower_count(); ++v) {
    const Count h = part.heights[v];
    std::vector<IsomT> big_psi{IsomT{}}, big_phi{IsomT{}};
    for (Count j = 0; j < h; ++j) {
      const Count i = part.index(v, j + 1);
      big_psi.push_back(compose(ps.at(i), big_psi.back()));
      big_phi.push_back(compose(pf.at(i), big_phi.back()));
    }
    IsomT rk = compose(big_psi.back(), inverse(big_phi.back()));
    if (rk.flip) throw ContractError("internal: tower product is not a rotation");
    Rational kappa = rk.rot, lift = minimal_lift(kappa);
    r.kappa.push_back(kappa);
    r.kappa_lift.push_back(lift);
    auto& chi = r.chi[static_cast<std::size_t>(v)];
    chi.assign(static_cast<std::size_t>(h), 0);
    Count acc = 0;
    for (Count j = h - 1; j >= 0; --j) {
      acc += ps.at(part.index(v, j + 1)).flip;
      chi[static_cast<std::size_t>(j)] = acc % 2;
    }
    for (Count j = 0; j < h; ++j) {
      Rational eta = Rational(j) * lift / Rational(h);
      if (chi[static_cast<std::size_t>(j)] == 0) eta = -eta;
      IsomT w = compose(make_isom(eta), compose(big_psi[static_cast<std::size_t>(j)], inverse(big_phi[static_cast<std::size_t>(j)])));
      r.omega.values[static_cast<std::size_t>(part.index(v, j + 1))] = j == 0 ? IsomT{} : w;
    }
  }

  r.deviation = skew_deviation(m, phi, psi, r.omega);
  r.tower_within_bound.assign(static_cast<std::size_t>(part.tower_count()), true);
  for (Count i = 0; i < part.cell_count; ++i) {
    const Rational& dev = r.deviation[static_cast<std::size_t>(i)];
    if (dev > r.sup_deviation) r.sup_deviation = dev;
    const int v = part.cell(i).tower;
    if (dev >= Rational(1, part.heights[v])) r.tower_within_bound[static_cast<std::size_t>(v)] = false;
  }
  return r;
}

Combina combina(const std::vector<Count>& m, const std::vector<Count>& chi) {
  if (m.empty() || m.size() != chi.size()) throw ArgumentError("m and chi must be nonempty and of equal length");
  Combina c;
  c.m = m;
  for (Count x : m)
    if (x <= 0) throw ArgumentError("m entries must be positive");
  for (Count x : chi) c.chi.push_back(mod_floor(x, 2));
  c.q = 0;
  for (Count x : m) c.q = std::gcd(c.q, x);
  const std::size_t k = m.size();
  for (std::size_t i = 0; i < k && !c.case_tag; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (m[i] % 2 == 0 && c.chi[i] && m[j] % 2) c.case_tag = 1;
  for (std::size_t i = 0; i < k && !c.case_tag; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (m[i] % 2 && !c.chi[i] && c.chi[j]) c.case_tag = 2;
  if (!c.case_tag) return c;

  std::vector<Count> units;
  for (Count x : m) units.push_back(x / c.q);
  const Count smallest = *std::min_element(units.begin(), units.end());
  std::vector<int> reach{1};  // bit p: parity p reachable
  Count run = 0, last_fail = 0;
  for (Count n = 1;; ++n) {
    int bits = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (units[i] <= n) {
        int b = reach[static_cast<std::size_t>(n - units[i])];
        bits |= c.chi[i] ? ((b & 1) << 1) | ((b >> 1) & 1) : b;
      }
    reach.push_back(bits);
    if (bits == 3) {
      if (++run == smallest) break;
    } else {
      run = 0;
      last_fail = n;
    }
    if (n > (Count{1} << 24)) throw OverflowError("coin problem search too long");
  }
  c.threshold = last_fail + 1;
  return c;
}

std::optional<std::vector<Count>> Combina::solve(Count n, Count chi_target) const {
  if (n < 0) return std::nullopt;
  if (n > (Count{1} << 24)) throw OverflowError("coin problem target too large");
  const std::size_t k = m.size();
  std::vector<Count> units;
  for (Count x : m) units.push_back(x / q);
  // back[s][p]: index of the last coin used to reach s with parity p, -1 if unreachable.
  std::vector<std::array<int, 2>> back(static_cast<std::size_t>(n + 1), {-1, -1});
  std::vector<std::array<bool, 2>> reach(static_cast<std::size_t>(n + 1), {false, false});
  reach[0][0] = true;
  for (Count s = 1; s <= n; ++s)
    for (int p = 0; p < 2; ++p)
      for (std::size_t i = 0; i < k; ++i)
        if (units[i] <= s && reach[static_cast<std::size_t>(s - units[i])][static_cast<std::size_t>(p ^ chi[i])]) {
          reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)] = true;
          back[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)] = static_cast<int>(i);
          break;
        }
  int p = static_cast<int>(mod_floor(chi_target, 2));
  if (!reach[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)]) return std::nullopt;
  std::vector<Count> l(k, 0);
  for (Count s = n; s > 0;) {
    int i = back[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)];
    ++l[static_cast<std::size_t>(i)];
    s -= units[static_cast<std::size_t>(i)];
    p ^= static_cast<int>(chi[static_cast<std::size_t>(i)]);
  }
  return l;
}

WacDecision decide_wacXT(DiagramPtr xp, const CircleCocycle& phi, DiagramPtr yp, const CircleCocycle& psi, Count p_max,
                         int bound) {
  const BratteliDiagram& x = *xp;
  const BratteliDiagram& y = *yp;
  WacDecision out;
  bool undecided = false;

  auto spec_x = periodic_spectrum(x, p_max, bound);
  auto spec_y = periodic_spectrum(y, p_max, bound);
  Json containment = Json::array();
  for (Count p = 1; p <= p_max; ++p) {
    const TriState& ty = spec_y[static_cast<std::size_t>(p - 1)].result;
    const TriState& tx = spec_x[static_cast<std::size_t>(p - 1)].result;
    if (ty.no()) continue;
    if (ty.verdict == Verdict::unknown) {
      undecided = true;
      continue;
    }
    containment.push_back({{"p", p}, {"y", ty.certificate}, {"x", tx.certificate}, {"x_verdict", verdict_name(tx.verdict)}});
    if (tx.no()) {
      out.verdict = Verdict::no;
      out.certificates["containment_failure"] = containment.back();
      out.note = std::to_string(p) + " is in PS(Y) but not in PS(X)";
      return out;
    }
    if (tx.verdict == Verdict::unknown) undecided = true;
  }
  out.certificates["containment"] = containment;
  out.certificates["p_max"] = p_max;

  TriState ox = orientation_class(x, phi, bound);
  TriState oy = orientation_class(y, psi, bound);
  out.certificates["orientation_x"] = ox.certificate;
  out.certificates["orientation_y"] = oy.certificate;
  if (ox.verdict == Verdict::unknown || oy.verdict == Verdict::unknown) undecided = true;
  if (ox.yes() && oy.yes()) out.conditions.push_back("a");

  if (oy.no()) {
    // (b): search n with 2^{n-1}[f] = [1_X], 2^{n-1}[g] = [1_Y], [f] = [o(phi)], [g] = [o(psi)] mod 2.
    auto base_indicator = [&](const BratteliDiagram& d, const TriState& cert, Count q, const CellFunction<Count>& o) {
      const int lv = std::max(cert.certificate.at("level").get<int>(), o.level);
      KRPartition part = kr_partition(d, lv);
      CellFunction<Count> sum = refine(d, o, lv);
      for (int v = 0; v < part.tower_count(); ++v)
        for (Count j = 1; j <= part.heights[v]; j += q) sum.values[static_cast<std::size_t>(part.index(v, j))] += 1;
      return sum;
    };
    Json tried = Json::array();
    for (int n = 1; n <= std::min(bound, 62); ++n) {
      const Count q = Count{1} << (n - 1);
      TriState dx = divisible_by(x, unit_class(x, 0), q, bound);
      TriState dy = divisible_by(y, unit_class(y, 0), q, bound);
      if (dx.no() || dy.no()) break;
      if (!dx.yes() || !dy.yes()) {
        undecided = true;
        break;
      }
      TriState mx = mod2_solve(x, base_indicator(x, dx, q, orientation_function(phi)), bound);
      TriState my = mod2_solve(y, base_indicator(y, dy, q, orientation_function(psi)), bound);
      tried.push_back({{"n", n}, {"x_divisible", dx.certificate}, {"y_divisible", dy.certificate}, {"f_vs_o_phi", mx.certificate},
                       {"g_vs_o_psi", my.certificate}});
      if (mx.yes() && my.yes()) {
        out.conditions.push_back("b");
        out.certificates["b_n"] = n;
        break;
      }
      if (mx.verdict == Verdict::unknown || my.verdict == Verdict::unknown) undecided = true;
    }
    out.certificates["b_search"] = tried;

    ZmCocycle o{2, orientation_function(psi)};
    try {
      SkewDirectedSystem ext = build_extension(yp, o, bound);
      ExtensionSpectrum s = ps_extension(ext, p_max, bound);
      out.certificates["c_spectrum"] = {{"verdict", verdict_name(s.verdict)}, {"branch", s.branch}, {"base", s.base},
                                        {"extension", s.direct}, {"formula", s.formula}, {"details", s.certificates}};
      if (s.verdict == Verdict::yes && s.direct == s.base) out.conditions.push_back("c");
      if (s.verdict != Verdict::yes) undecided = true;
    } catch (const DepthError& e) {
      undecided = true;
      out.certificates["c_spectrum"] = {{"error", e.what()}};
    }
  }

  if (!out.conditions.empty()) {
    out.verdict = Verdict::yes;
    if (undecided) out.note = "containment or some condition was only partly decided";
  } else if (undecided) {
    out.verdict = Verdict::unknown;
    out.note = "no condition certified and some check was undecided within the bound";
  } else {
    out.verdict = Verdict::no;
    out.note = "PS(Y) is contained in PS(X) but none of (a), (b), (c) holds";
  }
  return out;
}

WacDecision decide_wacXT_symmetric(DiagramPtr xp, const CircleCocycle& phi, DiagramPtr yp, const CircleCocycle& psi,
                                   Count p_max, int bound) {
  WacDecision out;
  bool undecided = false;
  auto members = [&](const BratteliDiagram& d, const char* key) {
    auto spec = periodic_spectrum(d, p_max, bound);
    for (const auto& e : spec)
      if (e.result.verdict == Verdict::unknown) undecided = true;
    out.certificates[key] = spectrum_members(spec);
    return spectrum_members(spec);
  };
  const bool same = members(*xp, "ps_x") == members(*yp, "ps_y");
  TriState ox = orientation_class(*xp, phi, bound);
  TriState oy = orientation_class(*yp, psi, bound);
  out.certificates["orientation_x"] = ox.certificate;
  out.certificates["orientation_y"] = oy.certificate;
  if (ox.verdict == Verdict::unknown || oy.verdict == Verdict::unknown) undecided = true;
  if (same && ox.yes() && oy.yes()) out.conditions.push_back("1");
  if (same && ox.no() && oy.no()) {
    try {
      auto ex = ps_extension(build_extension(xp, {2, orientation_function(phi)}, bound), p_max, bound);
      auto ey = ps_extension(build_extension(yp, {2, orientation_function(psi)}, bound), p_max, bound);
      out.certificates["extension_x"] = ex.direct;
      out.certificates["extension_y"] = ey.direct;
      if (ex.verdict != Verdict::yes || ey.verdict != Verdict::yes) undecided = true;
      else if (ex.direct == ey.direct) out.conditions.push_back("2");
    } catch (const DepthError&) {
      undecided = true;
    }
  }
  if (!out.conditions.empty()) out.verdict = Verdict::yes;
  else if (undecided) out.verdict = Verdict::unknown;
  else out.verdict = Verdict::no;
  if (!same) out.note = "periodic spectra differ up to " + std::to_string(p_max);
  return out;
}

std::vector<OrbitStep> skew_orbit(const BratteliDiagram& d, const PathPrefix& x, const Rational& t, const CircleCocycle& phi,
                                  int steps) {
  if (x.length() < phi.level) throw DepthError("path prefix is shorter than the cocycle's level");
  if (steps < 0) throw ArgumentError("steps must be nonnegative");
  CircleCocycle fine = refine(d, phi, x.length());
  KRPartition part = kr_partition(d, x.length());
  std::vector<OrbitStep> out;
  PathPrefix cur = x;
  Rational s = frac(t);
  for (int i = 0;; ++i) {
    Cell c = cell_of_path(d, cur);
    out.push_back({c, cur.length(), s});
    if (i == steps) break;
    s = act(fine.at(part.index(c.tower, c.floor)), s);
    auto next = successor_path(d, cur);
    if (!next) throw DepthError("orbit reaches the maximal path at step " + std::to_string(i + 1));
    cur = std::move(*next);
  }
  return out;
}

}  // namespace cwac
