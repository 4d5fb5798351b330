#include <algorithm>

#include "cwac/report.hpp"

namespace cwac {
namespace {

const Transition& pattern_at(const BratteliDiagram& d, int n) {
  const int h = static_cast<int>(d.head().size());
  if (n < h) return d.head()[static_cast<std::size_t>(n)];
  if (!d.stationary()) return d.transition(n);
  return d.period()[static_cast<std::size_t>((n - h) % static_cast<int>(d.period().size()))];
}

int phase_of(const BratteliDiagram& d, int n) {
  const int h = static_cast<int>(d.head().size());
  return n < h ? n : h + (n - h) % static_cast<int>(d.period().size());
}

std::vector<Count> push_mod(const Transition& t, const std::vector<Count>& v, Count m) {
  std::vector<Count> out(static_cast<std::size_t>(t.range_count()), 0);
  for (const Edge& e : t.edges()) out[e.range] = (out[e.range] + v[e.source]) % m;
  return out;
}

std::vector<Count> reduce(std::vector<Count> v, Count m) {
  for (auto& x : v) x = mod_floor(x, m);
  return v;
}

bool zero(const std::vector<Count>& v) {
  return std::all_of(v.begin(), v.end(), [](Count x) { return x == 0; });
}

K0Element element_of(const Json& j) { return {j.at("level").get<int>(), j.at("vector").get<std::vector<Count>>()}; }

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

bool check_not_divisible(const BratteliDiagram& d, const Json& c, std::string* why) {
  if (!d.stationary()) return fail(why, "cycle certificates need a stationary diagram");
  K0Element a = element_of(c.at("element"));
  const Count p = c.at("p").get<Count>();
  const int start = c.at("cycle_start").get<int>();
  const int end = c.at("cycle_end").get<int>();
  const int head = static_cast<int>(d.head().size());
  if (p < 1 || start < std::max(head, a.level) || end <= start) return fail(why, "malformed cycle bounds");
  if (static_cast<int>(a.vector.size()) != d.vertex_count(a.level)) return fail(why, "element has the wrong length");
  std::vector<Count> state = reduce(a.vector, p), at_start;
  for (int n = a.level; n <= end; ++n) {
    if (n > a.level) state = push_mod(pattern_at(d, n - 1), state, p);
    if (zero(state)) return fail(why, "class becomes divisible at level " + std::to_string(n));
    if (n == start) at_start = state;
  }
  if (phase_of(d, start) != phase_of(d, end) || at_start != state) return fail(why, "states at the cycle ends differ");
  return true;
}

std::vector<Count> relation_solve_rhs(const std::vector<Count>& heights, Count m) {
  std::vector<Count> rhs;
  for (Count h : heights)
    for (Count j = 0; j < m; ++j) rhs.push_back(h);
  return rhs;
}

IntMatrix ext_system(const std::vector<Count>& sums, Count m, Count p) {
  const int towers = static_cast<int>(sums.size() * m);
  IntMatrix a(towers, towers + static_cast<int>(m));
  for (int r = 0; r < towers; ++r) a(r, r) = p;
  for (std::size_t v = 0; v < sums.size(); ++v)
    for (Count j = 0; j < m; ++j) {
      int t = static_cast<int>(v * m + j);
      a(t, towers + static_cast<int>((j + sums[v]) % m)) += 1;
      a(t, towers + static_cast<int>(j)) -= 1;
    }
  return a;
}

}  // namespace

bool check_certificate(const Json& cert, const BratteliDiagram& d, const ZmCocycle* c, std::string* why) {
  try {
    const std::string kind = cert.at("kind").get<std::string>();
    if (kind == "equal") {
      K0Element a = element_of(cert.at("a")), b = element_of(cert.at("b"));
      const int level = cert.at("level").get<int>();
      if (push_forward(d, a, level) != push_forward(d, b, level)) return fail(why, "classes differ at the stated level");
      return true;
    }
    if (kind == "nonzero") {
      if (!d.stationary()) return fail(why, "nonzero certificates need a stationary diagram");
      K0Element diff = difference(d, element_of(cert.at("a")), element_of(cert.at("b")));
      const int a0 = cert.at("aligned_level").get<int>();
      const int stable = cert.at("stable_level").get<int>();
      const int head = static_cast<int>(d.head().size());
      const int period = static_cast<int>(d.period().size());
      if (a0 < std::max(head, diff.level) || (a0 - head) % period) return fail(why, "aligned level is not a period start");
      if (stable != a0 + d.vertex_count(a0) * period) return fail(why, "stable level is not vertex_count periods later");
      K0Element pushed = push_forward(d, diff, stable);
      if (is_zero(pushed)) return fail(why, "difference vanishes at the stable level");
      if (pushed.vector != cert.at("pushed").get<std::vector<Count>>()) return fail(why, "recorded push does not match");
      return true;
    }
    if (kind == "coboundary") {
      if (!check_coboundary_transfer(d, count_function_from_json(cert.at("f")), count_function_from_json(cert.at("g"))))
        return fail(why, "f != g - g o alpha^-1");
      return true;
    }
    if (kind == "divisible") {
      K0Element a = element_of(cert.at("element"));
      const Count p = cert.at("p").get<Count>();
      K0Element pushed = push_forward(d, a, cert.at("level").get<int>());
      auto q = cert.at("quotient").get<std::vector<Count>>();
      if (q.size() != pushed.vector.size()) return fail(why, "quotient has the wrong length");
      for (std::size_t i = 0; i < q.size(); ++i)
        if (checked_mul(p, q[i]) != pushed.vector[i]) return fail(why, "p * quotient differs from the pushed class");
      return true;
    }
    if (kind == "not_divisible") return check_not_divisible(d, cert, why);
    if (kind == "spectrum") {
      ClopenSet u = clopen_from_json(cert.at("base_set"), d);
      if (!verify_spectrum_set(d, u, cert.at("p").get<Count>())) return fail(why, "translates of U do not cycle through a partition");
      return true;
    }
    if (kind == "mod_zero") {
      if (!check_mod_transfer(d, count_function_from_json(cert.at("f")), count_function_from_json(cert.at("g")),
                              cert.at("m").get<Count>()))
        return fail(why, "f != g - g o alpha mod m");
      return true;
    }
    if (kind == "mod_nonzero") {
      const Count m = cert.at("m").get<Count>();
      const Json& ob = cert.at("obstruction");
      K0Element cls = k0_class(d, count_function_from_json(cert.at("f")));
      if (ob.at("kind") != "not_divisible" || ob.at("p").get<Count>() != m) return fail(why, "obstruction is not a mod-m cycle");
      if (reduce(element_of(ob.at("element")).vector, m) != reduce(cls.vector, m) || ob.at("element").at("level") != cls.level)
        return fail(why, "obstruction is about a different class");
      return check_not_divisible(d, ob, why);
    }
    if (kind == "minimal" || kind == "not_minimal") {
      if (!c) return fail(why, "needs the cocycle");
      auto multiple = [&](Count k) {
        CellFunction<Count> f = c->values;
        for (auto& x : f.values) x = mod_floor(k * x, c->m);
        return f;
      };
      if (kind == "not_minimal") {
        const Json& t = cert.at("transfer");
        if (count_function_from_json(t.at("f")).values != multiple(cert.at("k").get<Count>()).values)
          return fail(why, "transfer is about a different function");
        return check_certificate(t, d, c, why);
      }
      if (c->m == 1) return true;
      const Json& obs = cert.at("obstructions");
      if (static_cast<Count>(obs.size()) != c->m - 1) return fail(why, "one obstruction per multiple expected");
      for (Count k = 1; k < c->m; ++k) {
        const Json& o = obs.at(static_cast<std::size_t>(k - 1));
        if (count_function_from_json(o.at("f")).values != multiple(k).values) return fail(why, "obstruction for the wrong multiple");
        if (!check_certificate(o, d, c, why)) return false;
      }
      return true;
    }
    if (kind == "ext_divisible" || kind == "ext_not_divisible") {
      if (!c) return fail(why, "needs the cocycle");
      SkewDirectedSystem ext = build_extension(std::make_shared<const BratteliDiagram>(d), *c, 64);
      const Count p = cert.at("p").get<Count>();
      const Count m = c->m;
      std::vector<Count> sums = ext.tower_sums(ext.start_level());
      std::vector<Count> heights = reduce(kr_partition(d, ext.start_level()).heights, p);
      const int last = kind == "ext_divisible" ? cert.at("level").get<int>() : cert.at("cycle_end").get<int>();
      std::vector<Count> s0, h0;
      for (int n = ext.start_level(); n <= last; ++n) {
        if (n > ext.start_level()) {
          sums = push_mod(pattern_at(d, n - 1), sums, m);
          heights = push_mod(pattern_at(d, n - 1), heights, p);
        }
        if (kind == "ext_not_divisible") {
          if (solve_integer(ext_system(sums, m, p), relation_solve_rhs(heights, m)))
            return fail(why, "divisible at level " + std::to_string(n));
          if (n == cert.at("cycle_start").get<int>()) s0 = sums, h0 = heights;
        }
      }
      if (kind == "ext_divisible") {
        auto x = cert.at("combination").get<std::vector<Count>>();
        IntMatrix a = ext_system(sums, m, p);
        if (static_cast<int>(x.size()) != a.cols()) return fail(why, "combination has the wrong length");
        if (a.apply(x) != relation_solve_rhs(heights, m)) return fail(why, "combination does not reproduce the heights");
        return true;
      }
      const int start = cert.at("cycle_start").get<int>();
      if (!d.stationary() || start < static_cast<int>(d.head().size()) || phase_of(d, start) != phase_of(d, last))
        return fail(why, "cycle ends are not in the same phase");
      if (s0 != sums || h0 != heights) return fail(why, "states at the cycle ends differ");
      return true;
    }
    return fail(why, "unknown certificate kind '" + kind + "'");
  } catch (const std::exception& e) {
    return fail(why, e.what());
  }
}

std::vector<CertificateCheck> check_report_certificates(const Json& report) {
  std::vector<CertificateCheck> out;
  const Json& job = report.at("job");
  const Json& inputs = report.contains("inputs") ? report.at("inputs") : Json::object();
  for (const auto& [name, info] : inputs.items()) {
    CertificateCheck c{"input " + name, "digest", false, ""};
    try {
      const std::string spec = job.at(name).get<std::string>();
      const std::string digest = (name == "x" || name == "y") ? load_diagram_input(spec).digest : sha256_hex(load_text_input(spec));
      c.valid = digest == info.at("sha256").get<std::string>();
      if (!c.valid) c.detail = "input changed since the report was written";
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  }
  if (!report.contains("verdict") || !report.at("verdict").contains("certificates")) return out;
  for (const Json& entry : report.at("verdict").at("certificates")) {
    CertificateCheck c;
    c.label = entry.at("label").get<std::string>();
    c.kind = entry.at("certificate").at("kind").get<std::string>();
    try {
      LoadedDiagram d = load_diagram_input(job.at(entry.at("system").get<std::string>()).get<std::string>());
      std::optional<ZmCocycle> cocycle;
      if (entry.contains("cocycle")) {
        const std::string which = entry.at("cocycle").get<std::string>();
        if (which == "c") {
          cocycle = parse_zm_cocycle(load_text_input(job.at("c").get<std::string>()), *d.diagram);
        } else {
          const std::string key = which == "o(phi)" ? "phi" : "psi";
          CircleCocycle phi = parse_circle_cocycle(load_text_input(job.at(key).get<std::string>()), *d.diagram);
          cocycle = ZmCocycle{2, orientation_function(phi)};
        }
      }
      c.valid = check_certificate(entry.at("certificate"), *d.diagram, cocycle ? &*cocycle : nullptr, &c.detail);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cwac
