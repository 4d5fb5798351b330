#include "cwac/report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <iomanip>
#include <set>
#include <sstream>

namespace cwac {
namespace {

const std::set<std::string> kCommands{"validate",      "spectrum", "decide-wac", "synthesize",        "decide-wacxt",
                                      "straighten",    "eta",      "omega",      "combina",           "extension-torsion",
                                      "extension-spectrum", "orbit"};

const std::set<std::string> kKeys{"x",     "y",   "phi",    "psi",   "c", "bound", "pmax", "threads", "level",
                                  "levels", "epsilon", "m", "chi", "n", "steps", "t",    "path",    "refine_budget"};

bool is_builtin(const std::string& s) {
  try {
    builtin_diagram(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

struct Ctx {
  const Json& params;
  Json inputs = Json::object();
  Json certs = Json::array();

  int integer(const char* key, int fallback) const {
    return params.contains(key) ? params.at(key).get<int>() : fallback;
  }
  const std::string& str(const char* key) const {
    if (!params.contains(key)) throw ArgumentError(std::string("missing parameter '") + key + "'");
    return params.at(key).get_ref<const std::string&>();
  }
  DiagramPtr diagram(const char* key) {
    LoadedDiagram d = load_diagram_input(str(key));
    inputs[key] = {{"source", str(key).rfind("bratteli", 0) == 0 ? std::string("inline") : str(key)}, {"sha256", d.digest}};
    return d.diagram;
  }
  std::string text(const char* key) {
    std::string t = load_text_input(str(key));
    inputs[key] = {{"source", str(key).rfind("cocycle", 0) == 0 ? std::string("inline") : str(key)}, {"sha256", sha256_hex(t)}};
    return t;
  }
  void cert(const std::string& label, const char* system, const Json& c, const char* cocycle = nullptr) {
    if (!c.is_object() || !c.contains("kind")) return;
    Json e{{"label", label}, {"system", system}};
    if (cocycle) e["cocycle"] = cocycle;
    e["certificate"] = c;
    certs.push_back(std::move(e));
  }
};

int exit_for(Verdict v) { return v == Verdict::unknown ? 2 : 0; }

Json rationals(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const Rational& r : v) out.push_back(to_string(r));
  return out;
}

Json plan_table(const MatchingPlan& plan) {
  Json rows = Json::array();
  for (std::size_t v = 0; v < plan.a.size(); ++v) {
    Json counts = Json::array();
    for (std::size_t w = 0; w < plan.a[v].size(); ++w)
      if (plan.a[v][w]) counts.push_back({w, plan.a[v][w]});
    rows.push_back({{"v", v}, {"height", plan.p_heights[v]}, {"counts", counts}});
  }
  return rows;
}

Json floor_table(const PartitionMap& m) {
  Json rows = Json::array();
  for (const SegmentTower& s : segment_towers(m))
    rows.push_back({{"x_tower", s.x_tower}, {"floors", {s.start, s.start + s.height - 1}}, {"q_tower", s.q_tower},
                    {"y_tower", m.q_tower_source[static_cast<std::size_t>(s.q_tower)]}});
  return rows;
}

Json report_json(const ConjugacyReport& r) {
  Json out = Json::array();
  for (const auto& c : r.checks) out.push_back({{"set", c.label}, {"pass", c.pass}, {"detail", c.detail}});
  return out;
}

// --- commands ---------------------------------------------------------------

Verdict cmd_validate(Ctx& ctx, Json& v) {
  DiagramPtr d = ctx.diagram("x");
  ValidationReport r = validate_diagram(*d, ctx.integer("levels", 8));
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
  v["checks"] = checks;
  v["depth_checked"] = r.depth_checked;
  v["positivity_window"] = r.positivity_window ? Json(*r.positivity_window) : Json(nullptr);
  v["status"] = r.ok() ? "valid" : "invalid";
  return r.ok() ? Verdict::yes : Verdict::no;
}

Verdict cmd_spectrum(Ctx& ctx, Json& v) {
  DiagramPtr d = ctx.diagram("x");
  const Count p_max = ctx.integer("pmax", 16);
  auto entries = periodic_spectrum(*d, p_max, ctx.integer("bound", 40), ctx.integer("threads", 1));
  Json rows = Json::array();
  bool unknown = false;
  for (const auto& e : entries) {
    rows.push_back({{"p", e.p}, {"verdict", verdict_name(e.result.verdict)}});
    ctx.cert("p=" + std::to_string(e.p), "x", e.result.certificate);
    if (e.result.verdict == Verdict::unknown) unknown = true;
  }
  v["entries"] = rows;
  v["members"] = spectrum_members(entries);
  v["status"] = unknown ? "partial" : "decided";
  return unknown ? Verdict::unknown : Verdict::yes;
}

Verdict cmd_decide_wac(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  DiagramPtr y = ctx.diagram("y");
  const Count p_max = ctx.integer("pmax", 16);
  const int bound = ctx.integer("bound", 40);
  auto sx = periodic_spectrum(*x, p_max, bound, ctx.integer("threads", 1));
  auto sy = periodic_spectrum(*y, p_max, bound, ctx.integer("threads", 1));
  auto direction = [&](const std::vector<SpectrumEntry>& big, const char* bs, const std::vector<SpectrumEntry>& small,
                       const char* ss, const std::string& tag) {
    // small's spectrum inside big's
    Json out{{"verdict", "yes"}};
    bool unknown = false;
    for (std::size_t i = 0; i < small.size(); ++i) {
      const TriState& ts = small[i].result;
      const TriState& tb = big[i].result;
      if (ts.no()) continue;
      if (ts.verdict == Verdict::unknown || tb.verdict == Verdict::unknown) {
        unknown = true;
        continue;
      }
      if (tb.no()) {
        ctx.cert(tag + " p=" + std::to_string(small[i].p) + " in " + ss, ss, ts.certificate);
        ctx.cert(tag + " p=" + std::to_string(small[i].p) + " not in " + bs, bs, tb.certificate);
        return Json{{"verdict", "no"}, {"obstruction_p", small[i].p}};
      }
    }
    if (unknown) out["verdict"] = "unknown";
    return out;
  };
  Json forward = direction(sx, "x", sy, "y", "PS(Y) in PS(X):");
  Json backward = direction(sy, "y", sx, "x", "PS(X) in PS(Y):");
  v["ps_x"] = spectrum_members(sx);
  v["ps_y"] = spectrum_members(sy);
  v["p_max"] = p_max;
  v["y_into_x"] = forward;
  v["two_sided"] = forward["verdict"] == "yes" && backward["verdict"] == "yes"  ? "yes"
                   : forward["verdict"] == "no" || backward["verdict"] == "no" ? "no"
                                                                                : "unknown";
  const std::string s = forward["verdict"].get<std::string>();
  v["status"] = s;
  return s == "yes" ? Verdict::yes : s == "no" ? Verdict::no : Verdict::unknown;
}

Verdict cmd_synthesize(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  DiagramPtr y = ctx.diagram("y");
  const int level = ctx.integer("level", 2);
  SynthesisOptions o;
  o.bound = ctx.integer("bound", 40);
  auto target = lumped_cells(*y, level);
  SynthesisResult r = synthesize_conjugator(x, y, target, o);
  v["target_level"] = level;
  v["p"] = r.p;
  v["y_level"] = r.y_level;
  ctx.cert("p in PS(X)", "x", r.spectrum_check.certificate);
  if (!r.map) {
    v["status"] = r.verdict == Verdict::no ? "refused" : "unknown";
    v["note"] = r.note;
    if (r.verdict == Verdict::no) v["offending_p"] = r.p;
    return r.verdict == Verdict::no ? Verdict::no : Verdict::unknown;
  }
  const PartitionMap& m = *r.map;
  v["threshold"] = r.threshold;
  v["x_level"] = m.x_level;
  v["plan"] = plan_table(m.plan);
  v["b"] = m.plan.b;
  v["floor_map"] = floor_table(m);
  std::string why;
  v["matching_valid"] = verify_matching(m.plan, &why);
  ConjugacyReport q = verify_approx_conjugacy(m, lumped_target(m), "Q~");
  ConjugacyReport f = verify_approx_conjugacy(m, target, "F");
  v["checks"] = report_json(q);
  v["checks_target"] = report_json(f);
  const bool ok = q.all_pass() && f.all_pass() && v["matching_valid"].get<bool>();
  v["status"] = ok ? "verified" : "verification_failed";
  if (!ok) throw ContractError("synthesized map failed verification: " + why);
  return Verdict::yes;
}

Verdict cmd_decide_wacxt(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  DiagramPtr y = ctx.diagram("y");
  CircleCocycle phi = parse_circle_cocycle(ctx.text("phi"), *x);
  CircleCocycle psi = parse_circle_cocycle(ctx.text("psi"), *y);
  const Count p_max = ctx.integer("pmax", 16);
  const int bound = ctx.integer("bound", 40);
  WacDecision d = decide_wacXT(x, phi, y, psi, p_max, bound);
  const Json& c = d.certificates;
  if (c.contains("containment"))
    for (const Json& e : c.at("containment")) {
      const std::string p = std::to_string(e.at("p").get<Count>());
      ctx.cert("p=" + p + ", PS(Y)", "y", e.at("y"));
      ctx.cert("p=" + p + ", PS(X)", "x", e.at("x"));
    }
  if (c.contains("containment_failure")) {
    const Json& e = c.at("containment_failure");
    ctx.cert("p in PS(Y)", "y", e.at("y"));
    ctx.cert("p not in PS(X)", "x", e.at("x"));
  }
  if (c.contains("orientation_x")) ctx.cert("[o(phi)] mod 2", "x", c.at("orientation_x"));
  if (c.contains("orientation_y")) ctx.cert("[o(psi)] mod 2", "y", c.at("orientation_y"));
  if (c.contains("b_search"))
    for (const Json& e : c.at("b_search")) {
      const std::string n = "n=" + std::to_string(e.at("n").get<int>());
      ctx.cert(n + " X divisible", "x", e.at("x_divisible"));
      ctx.cert(n + " Y divisible", "y", e.at("y_divisible"));
      ctx.cert(n + " [f] vs [o(phi)]", "x", e.at("f_vs_o_phi"));
      ctx.cert(n + " [g] vs [o(psi)]", "y", e.at("g_vs_o_psi"));
    }
  Json summary = Json::object();
  if (c.contains("c_spectrum")) {
    const Json& s = c.at("c_spectrum");
    summary = s;
    summary.erase("details");
    if (s.contains("details")) {
      const Json& det = s.at("details");
      if (det.contains("class_of_c")) ctx.cert("[o(psi)] in extension", "y", det.at("class_of_c"));
      if (det.contains("direct"))
        for (const Json& e : det.at("direct"))
          ctx.cert("p=" + std::to_string(e.at("p").get<Count>()) + ", PS(Y x o(psi))", "y", e.at("certificate"), "o(psi)");
    }
  }
  WacDecision two = decide_wacXT_symmetric(x, phi, y, psi, p_max, bound);
  v["conditions"] = d.conditions;
  v["p_max"] = p_max;
  v["b_n"] = c.contains("b_n") ? c.at("b_n") : Json(nullptr);
  v["spectra"] = summary;
  v["two_sided"] = {{"verdict", verdict_name(two.verdict)}, {"conditions", two.conditions}, {"note", two.note}};
  v["status"] = verdict_name(d.verdict);
  if (!d.note.empty()) v["note"] = d.note;
  return d.verdict;
}

Verdict cmd_straighten(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  CircleCocycle phi = parse_circle_cocycle(ctx.text("phi"), *x);
  const int bound = ctx.integer("bound", 40);
  TriState t = orientation_class(*x, phi, bound);
  ctx.cert("[o(phi)] mod 2", "x", t.certificate);
  if (!t.yes()) {
    v["status"] = t.no() ? "refused" : "unknown";
    v["note"] = t.no() ? "orientation class is nonzero" : t.note;
    return t.no() ? Verdict::no : Verdict::unknown;
  }
  Straightening s = straighten(*x, phi, bound);
  auto bad = straightening_failures(*x, phi, s);
  Json psi = Json::array(), xi = Json::array();
  for (const IsomT& a : s.psi.values) psi.push_back(a.flip);
  for (const IsomT& a : s.xi.values) xi.push_back(to_string(a.rot));
  v["level"] = s.psi.level;
  v["psi_flips"] = psi;
  v["xi"] = xi;
  v["failing_cells"] = bad;
  v["status"] = bad.empty() ? "verified" : "verification_failed";
  if (!bad.empty()) throw ContractError("straightening identity fails on some cell");
  return Verdict::yes;
}

SynthesisResult synth_for_cocycles(Ctx& ctx, DiagramPtr x, DiagramPtr y, int x_level, int y_level, Count min_height,
                                   const CircleCocycle* px, const CircleCocycle* py, Json& v) {
  SynthesisOptions o;
  o.bound = ctx.integer("bound", 40);
  o.min_x_level = x_level;
  o.min_y_level = y_level;
  o.min_q_height = min_height;
  if (px && py) {
    o.x_parity = orientation_function(*px);
    o.y_parity = orientation_function(*py);
  }
  auto target = lumped_cells(*y, std::max(ctx.integer("level", 0), y_level));
  SynthesisResult r = synthesize_conjugator(x, y, target, o);
  ctx.cert("p in PS(X)", "x", r.spectrum_check.certificate);
  v["p"] = r.p;
  if (r.map) {
    v["x_level"] = r.map->x_level;
    v["y_level"] = r.map->y_level;
    v["plan"] = plan_table(r.map->plan);
    ConjugacyReport q = verify_approx_conjugacy(*r.map, lumped_target(*r.map), "Q~");
    v["checks"] = report_json(q);
    if (!q.all_pass()) throw ContractError("synthesized map failed verification");
  } else {
    v["note"] = r.note;
  }
  return r;
}

Verdict cmd_eta(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  DiagramPtr y = ctx.diagram("y");
  CircleCocycle xi = parse_circle_cocycle(ctx.text("phi"), *x);
  CircleCocycle zeta = parse_circle_cocycle(ctx.text("psi"), *y);
  const Rational eps = parse_rational(ctx.str("epsilon"));
  if (eps <= 0) throw ArgumentError("epsilon must be positive");
  const Count min_height = static_cast<Count>(BigInt(boost::multiprecision::denominator(eps) / boost::multiprecision::numerator(eps))) + 1;
  SynthesisResult r = synth_for_cocycles(ctx, x, y, xi.level, zeta.level, min_height, nullptr, nullptr, v);
  if (!r.map) {
    v["status"] = r.verdict == Verdict::no ? "refused" : "unknown";
    return r.verdict == Verdict::no ? Verdict::no : Verdict::unknown;
  }
  EtaFunction e = eta_construction(*r.map, xi, zeta, eps);
  Json lifts = Json::array();
  for (const auto& l : e.lifts)
    lifts.push_back({{"x_tower", l.x_tower}, {"start", l.start}, {"height", l.height}, {"kappa", to_string(l.kappa)},
                     {"kappa_lift", to_string(l.kappa_lift)}});
  v["epsilon"] = to_string(eps);
  v["lifts"] = lifts;
  v["eta"] = rationals(e.values);
  v["sup_deviation"] = to_string(e.sup_deviation);
  const bool ok = e.sup_deviation < eps;
  v["status"] = ok ? "within_epsilon" : "bound_violated";
  return ok ? Verdict::yes : Verdict::no;
}

Verdict cmd_omega(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  DiagramPtr y = ctx.diagram("y");
  CircleCocycle phi = parse_circle_cocycle(ctx.text("phi"), *x);
  CircleCocycle psi = parse_circle_cocycle(ctx.text("psi"), *y);
  SynthesisResult r = synth_for_cocycles(ctx, x, y, phi.level, psi.level, 1, &phi, &psi, v);
  if (!r.map) {
    v["status"] = r.verdict == Verdict::no ? "refused" : "unknown";
    return r.verdict == Verdict::no ? Verdict::no : Verdict::unknown;
  }
  OmegaResult o = omega_construction(*r.map, phi, psi);
  Json towers = Json::array();
  for (std::size_t t = 0; t < o.kappa.size(); ++t)
    towers.push_back({{"v", t}, {"kappa", to_string(o.kappa[t])}, {"kappa_lift", to_string(o.kappa_lift[t])},
                      {"chi", o.chi[t]}, {"within_bound", static_cast<bool>(o.tower_within_bound[t])}});
  v["towers"] = towers;
  v["omega"] = to_json(o.omega);
  v["sup_deviation"] = to_string(o.sup_deviation);
  v["status"] = o.within_bounds() ? "within_bound" : "bound_violated";
  return o.within_bounds() ? Verdict::yes : Verdict::no;
}

Verdict cmd_combina(Ctx& ctx, Json& v) {
  auto m = ctx.params.at("m").get<std::vector<Count>>();
  auto chi = ctx.params.at("chi").get<std::vector<Count>>();
  Combina c = combina(m, chi);
  v["q"] = c.q;
  v["case"] = c.case_tag ? Json(c.case_tag) : Json("none");
  if (!c.case_tag) {
    v["status"] = "hypotheses_unmet";
    return Verdict::no;
  }
  v["N"] = c.threshold;
  std::vector<Count> ns;
  if (ctx.params.contains("n"))
    ns.push_back(ctx.params.at("n").get<Count>());
  else
    ns = {c.threshold, c.threshold + 1};
  Json sols = Json::array();
  for (Count n : ns)
    for (Count t = 0; t < 2; ++t) {
      auto l = c.solve(n, t);
      sols.push_back({{"n", n}, {"chi", t}, {"l", l ? Json(*l) : Json("unsolvable")}});
    }
  v["solutions"] = sols;
  v["status"] = "decided";
  return Verdict::yes;
}

Verdict cmd_ext_torsion(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  ZmCocycle c = parse_zm_cocycle(ctx.text("c"), *x);
  const int bound = ctx.integer("bound", 40);
  SkewDirectedSystem ext = build_extension(x, c, bound);
  ctx.cert("minimality", "x", ext.minimality.certificate, "c");
  TorsionReport t = torsion_check(ext, ctx.integer("level", 0), std::min(bound, ext.start_level() + 12));
  Json levels = Json::array();
  for (const auto& l : t.levels)
    levels.push_back({{"level", l.level}, {"torsion", l.quotient.torsion}, {"free_rank", l.quotient.free_rank},
                      {"f0_in_kernel", l.f0_in_kernel}, {"f0_order", l.f0_order}});
  v["m"] = c.m;
  v["minimal"] = verdict_name(ext.minimality.verdict);
  v["levels"] = levels;
  v["f0_identity"] = {{"level", t.f0_identity.level}, {"cells", t.f0_identity.cells_checked}, {"pass", t.f0_identity.pass()}};
  v["status"] = verdict_name(t.verdict);
  if (!t.note.empty()) v["note"] = t.note;
  return t.verdict;
}

Verdict cmd_ext_spectrum(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  ZmCocycle c = parse_zm_cocycle(ctx.text("c"), *x);
  const int bound = ctx.integer("bound", 40);
  SkewDirectedSystem ext = build_extension(x, c, bound);
  ExtensionSpectrum s = ps_extension(ext, ctx.integer("pmax", 16), bound);
  if (s.certificates.contains("class_of_c")) ctx.cert("[c] mod 2", "x", s.certificates.at("class_of_c"));
  if (s.certificates.contains("c_plus_f")) ctx.cert("[c] + [f] mod 2", "x", s.certificates.at("c_plus_f"));
  if (s.certificates.contains("divisor_not_in_spectrum")) ctx.cert("2^n not in PS", "x", s.certificates.at("divisor_not_in_spectrum"));
  for (const Json& e : s.certificates.at("direct"))
    ctx.cert("p=" + std::to_string(e.at("p").get<Count>()) + ", PS(ext)", "x", e.at("certificate"), "c");
  v["base"] = s.base;
  v["direct"] = s.direct;
  v["formula"] = s.formula;
  v["branch"] = s.branch;
  v["n"] = s.n ? Json(*s.n) : Json(nullptr);
  v["agree"] = s.agree;
  v["contains_base"] = s.contains_base;
  v["status"] = verdict_name(s.verdict);
  if (!s.note.empty()) v["note"] = s.note;
  if (s.verdict == Verdict::no) throw ContractError("direct and formula extension spectra disagree");
  return s.verdict;
}

Verdict cmd_orbit(Ctx& ctx, Json& v) {
  DiagramPtr x = ctx.diagram("x");
  CircleCocycle phi = parse_circle_cocycle(ctx.text("phi"), *x);
  PathPrefix p{ctx.params.at("path").get<std::vector<int>>()};
  const Rational t = parse_rational(ctx.params.contains("t") ? ctx.str("t") : "0");
  auto orbit = skew_orbit(*x, p, t, phi, ctx.integer("steps", 10));
  Json rows = Json::array();
  for (const auto& s : orbit) {
    std::ostringstream dec;
    dec << std::fixed << std::setprecision(6) << static_cast<double>(s.t);
    rows.push_back({{"cell", {s.cell.tower, s.cell.floor}}, {"t", to_string(s.t)}, {"t_decimal_display_only", dec.str()}});
  }
  v["trajectory"] = rows;
  v["status"] = "decided";
  return Verdict::yes;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string join(const Json& arr) {
  std::string out;
  for (const auto& e : arr) out += (out.empty() ? "" : " ") + (e.is_string() ? e.get<std::string>() : e.dump());
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

LoadedDiagram load_diagram_input(const std::string& spec) {
  std::string text;
  if (spec.rfind("bratteli", 0) == 0)
    text = spec;
  else if (is_builtin(spec))
    text = serialize_diagram(builtin_diagram(spec));
  else
    text = read_text_file(spec);
  return {std::make_shared<const BratteliDiagram>(parse_diagram(text)), sha256_hex(text)};
}

std::string load_text_input(const std::string& spec) { return spec.rfind("cocycle", 0) == 0 ? spec : read_text_file(spec); }

JobSpec parse_job(const Json& j) {
  if (!j.is_object()) throw ArgumentError("job must be an object");
  if (!j.contains("command") || !j.at("command").is_string()) throw ArgumentError("job needs a string 'command'");
  JobSpec job;
  job.command = j.at("command").get<std::string>();
  if (!kCommands.count(job.command)) throw ArgumentError("unknown command '" + job.command + "'");
  for (const auto& [k, val] : j.items()) {
    if (k == "command") continue;
    if (!kKeys.count(k)) throw ArgumentError("unknown job key '" + k + "'");
    job.params[k] = val;
  }
  for (const char* k : {"x", "y", "phi", "psi", "c", "epsilon", "t"})
    if (job.params.contains(k) && !job.params.at(k).is_string()) throw ArgumentError(std::string("'") + k + "' must be a string");
  for (const char* k : {"bound", "pmax", "threads", "level", "levels", "n", "steps", "refine_budget"})
    if (job.params.contains(k) && !job.params.at(k).is_number_integer()) throw ArgumentError(std::string("'") + k + "' must be an integer");
  for (const char* k : {"bound", "pmax", "threads", "levels", "steps", "refine_budget"})
    if (job.params.contains(k) && job.params.at(k).get<Count>() < 0) throw ArgumentError(std::string("'") + k + "' must be nonnegative");
  if (job.params.contains("pmax") && job.params.at("pmax").get<Count>() < 1) throw ArgumentError("'pmax' must be positive");
  if (job.params.contains("epsilon")) parse_rational(job.params.at("epsilon").get<std::string>());
  if (job.params.contains("t")) parse_rational(job.params.at("t").get<std::string>());
  return job;
}

Json to_json(const JobSpec& job) {
  Json j{{"command", job.command}};
  for (const auto& [k, v] : job.params.items()) j[k] = v;
  return j;
}

RunOutput run_job(const JobSpec& job) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out;
  Json verdict = Json::object();
  Ctx ctx{job.params};
  const int saved_budget = refine_budget();
  try {
    if (job.params.contains("refine_budget")) set_refine_budget(job.params.at("refine_budget").get<int>());
    Verdict v;
    const std::string& c = job.command;
    if (c == "validate") v = cmd_validate(ctx, verdict);
    else if (c == "spectrum") v = cmd_spectrum(ctx, verdict);
    else if (c == "decide-wac") v = cmd_decide_wac(ctx, verdict);
    else if (c == "synthesize") v = cmd_synthesize(ctx, verdict);
    else if (c == "decide-wacxt") v = cmd_decide_wacxt(ctx, verdict);
    else if (c == "straighten") v = cmd_straighten(ctx, verdict);
    else if (c == "eta") v = cmd_eta(ctx, verdict);
    else if (c == "omega") v = cmd_omega(ctx, verdict);
    else if (c == "combina") v = cmd_combina(ctx, verdict);
    else if (c == "extension-torsion") v = cmd_ext_torsion(ctx, verdict);
    else if (c == "extension-spectrum") v = cmd_ext_spectrum(ctx, verdict);
    else v = cmd_orbit(ctx, verdict);
    verdict["certificates"] = ctx.certs;
    out.exit_code = exit_for(v);
  } catch (const Error& e) {
    verdict = {{"status", "error"}, {"error", {{"code", static_cast<int>(e.code())}, {"message", e.what()}}}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) verdict["error"]["line"] = pe->line(), verdict["error"]["column"] = pe->column();
    out.exit_code = 1;
  } catch (const std::exception& e) {
    verdict = {{"status", "error"}, {"error", {{"code", 0}, {"message", e.what()}}}};
    out.exit_code = 1;
  }
  set_refine_budget(saved_budget);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  out.report = {{"tool", "cwac"},
                {"version", kToolVersion},
                {"command", job.command},
                {"job", to_json(job)},
                {"inputs", ctx.inputs},
                {"verdict", verdict},
                {"exit_code", out.exit_code},
                {"timing", {{"elapsed_ms", ms}}}};
  return out;
}

std::string verdict_section(const Json& report) { return report.at("verdict").dump(); }

std::string explain(const Json& report, int verbosity) {
  std::ostringstream out;
  const Json& v = report.at("verdict");
  const std::string cmd = report.at("command").get<std::string>();
  out << cmd << ": " << v.value("status", std::string("?")) << '\n';
  if (v.contains("note")) out << "  note: " << v.at("note").get<std::string>() << '\n';
  if (v.contains("error")) out << "  error: " << v.at("error").at("message").get<std::string>() << '\n';
  if (report.value("exit_code", 0) == 2) {
    const Json& job = report.at("job");
    out << "  bound exhausted: " << (job.contains("bound") ? job.at("bound").dump() : std::string("40 (default)")) << '\n';
    if (v.contains("entries"))
      for (const auto& e : v.at("entries"))
        if (e.at("verdict") == "unknown") {
          out << "  smallest unresolved query: p = " << e.at("p") << '\n';
          break;
        }
  }
  if (verbosity < 1) return out.str();

  if (v.contains("entries")) {
    out << "  p    verdict\n";
    for (const auto& e : v.at("entries")) out << "  " << pad(e.at("p").dump(), 5) << e.at("verdict").get<std::string>() << '\n';
  }
  if (v.contains("ps_x") && v.contains("ps_y"))
    out << "  PS(X): " << join(v.at("ps_x")) << "\n  PS(Y): " << join(v.at("ps_y")) << '\n';
  if (v.contains("plan")) {
    out << "  tower matching (v: height = counts of w)\n";
    for (const auto& r : v.at("plan")) {
      out << "    " << r.at("v") << ": " << r.at("height") << " =";
      for (const auto& c : r.at("counts")) out << ' ' << c.at(1) << "x[" << c.at(0) << ']';
      out << '\n';
    }
  }
  if (v.contains("floor_map")) {
    out << "  floor map  X tower  floors      Q' tower  Y tower\n";
    for (const auto& r : v.at("floor_map"))
      out << "             " << pad(r.at("x_tower").dump(), 9)
          << pad(r.at("floors").at(0).dump() + "-" + r.at("floors").at(1).dump(), 12) << pad(r.at("q_tower").dump(), 10)
          << r.at("y_tower") << '\n';
  }
  for (const char* key : {"checks", "checks_target"})
    if (v.contains(key)) {
      int pass = 0, total = 0;
      for (const auto& c : v.at(key)) pass += c.at("pass").get<bool>(), ++total;
      out << "  " << key << ": " << pass << "/" << total << " pass\n";
    }
  if (v.contains("spectra") && v.at("spectra").contains("base")) {
    const Json& s = v.at("spectra");
    out << "  PS(Y)           : " << join(s.at("base")) << "\n  PS(Y x o(psi))  : " << join(s.at("extension")) << '\n';
  }
  if (v.contains("y_into_x") && v.at("y_into_x").contains("obstruction_p"))
    out << "  obstruction: p = " << v.at("y_into_x").at("obstruction_p") << " lies in PS(Y) but not in PS(X)\n";
  if (v.contains("offending_p")) out << "  offending p = " << v.at("offending_p") << " (gcd of Y heights, not in PS(X))\n";
  if (v.contains("N")) out << "  case " << v.at("case") << ", q = " << v.at("q") << ", N = " << v.at("N") << '\n';
  if (v.contains("psi_flips")) {
    out << "  level " << v.at("level") << " cells\n  cell  psi  xi\n";
    for (std::size_t i = 0; i < v.at("psi_flips").size(); ++i)
      out << "  " << pad(std::to_string(i), 6) << pad(v.at("psi_flips").at(i).get<int>() ? "L" : "I", 5)
          << v.at("xi").at(i).get<std::string>() << '\n';
  }
  if (v.contains("conditions")) out << "  conditions: " << join(v.at("conditions")) << '\n';
  if (v.contains("lifts")) {
    out << "  segment  height  kappa       lift\n";
    for (const auto& l : v.at("lifts"))
      out << "  " << pad(l.at("x_tower").dump() + "@" + l.at("start").dump(), 9) << pad(l.at("height").dump(), 8)
          << pad(l.at("kappa").get<std::string>(), 12) << l.at("kappa_lift").get<std::string>() << '\n';
  }
  if (v.contains("towers")) {
    out << "  v  kappa~        chi\n";
    for (const auto& t : v.at("towers"))
      out << "  " << pad(t.at("v").dump(), 3) << pad(t.at("kappa_lift").get<std::string>(), 13) << join(t.at("chi")) << '\n';
  }
  if (v.contains("sup_deviation")) out << "  sup deviation: " << v.at("sup_deviation").get<std::string>() << '\n';
  if (v.contains("solutions"))
    for (const auto& s : v.at("solutions"))
      out << "  n=" << s.at("n") << " chi=" << s.at("chi") << " l=" << s.at("l").dump() << '\n';
  if (v.contains("levels") && v.at("levels").is_array())
    for (const auto& l : v.at("levels"))
      out << "  level " << l.at("level") << ": torsion " << l.at("torsion").dump() << ", free rank " << l.at("free_rank")
          << ", f0 order " << l.at("f0_order") << '\n';
  if (v.contains("direct") && v.contains("formula"))
    out << "  PS direct : " << join(v.at("direct")) << "\n  PS formula: " << join(v.at("formula")) << " (" << v.at("branch").get<std::string>()
        << ")\n";
  if (v.contains("trajectory"))
    for (const auto& s : v.at("trajectory"))
      out << "  " << pad(s.at("cell").dump(), 10) << pad(s.at("t").get<std::string>(), 16) << s.at("t_decimal_display_only").get<std::string>()
          << '\n';
  if (v.contains("certificates")) out << "  certificates: " << v.at("certificates").size() << '\n';
  if (verbosity >= 2) out << report.dump(2) << '\n';
  return out.str();
}

}  // namespace cwac
