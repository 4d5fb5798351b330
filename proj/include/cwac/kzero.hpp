#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwac/bratteli.hpp"
#include "cwac/serialize.hpp"

namespace cwac {

/// A class in K0 represented at a level: one integer per tower.
struct K0Element {
  int level = 0;
  std::vector<Count> vector;
  bool operator==(const K0Element&) const = default;
};

enum class Verdict { yes, no, unknown };

const char* verdict_name(Verdict v);

/// yes/no carry a certificate object (with a "kind" key) that certcheck can
/// re-verify; unknown carries the exhausted bound in `note`.
struct TriState {
  Verdict verdict = Verdict::unknown;
  Json certificate = Json::object();
  std::string note;

  bool yes() const { return verdict == Verdict::yes; }
  bool no() const { return verdict == Verdict::no; }
};

// Tower sums of f.
K0Element k0_class(const BratteliDiagram& d, const CellFunction<Count>& f);
K0Element unit_class(const BratteliDiagram& d, int level);
K0Element indicator_class(const BratteliDiagram& d, const ClopenSet& s);
K0Element push_forward(const BratteliDiagram& d, const K0Element& a, int level);
K0Element difference(const BratteliDiagram& d, const K0Element& a, const K0Element& b);
bool is_zero(const K0Element& a);

/// Semi-decides [a] = [b]. Stationary diagrams are fully decided: once the
/// difference survives vertex_count periods of pushing it can never vanish.
TriState classes_equal(const BratteliDiagram& d, const K0Element& a, const K0Element& b, int bound);

/// Yes-certificates include g with f = g - g o alpha^{-1} on the certified level.
TriState is_coboundary(const BratteliDiagram& d, const CellFunction<Count>& f, int bound);

TriState divisible_by(const BratteliDiagram& d, const K0Element& a, Count p, int bound);

struct SpectrumEntry {
  Count p = 1;
  TriState result;
  std::optional<ClopenSet> base_set;  // U with U, alpha U, ..., alpha^{p-1} U partitioning X
};

/// Entries for p = 1..p_max. `threads` only affects scheduling.
std::vector<SpectrumEntry> periodic_spectrum(const BratteliDiagram& d, Count p_max, int bound, int threads = 1);

/// The yes-set of a spectrum scan, in increasing order.
std::vector<Count> spectrum_members(const std::vector<SpectrumEntry>& entries);

/// Exact check that the p translates of U are disjoint, cover X, and alpha^p(U) = U.
bool verify_spectrum_set(const BratteliDiagram& d, const ClopenSet& u, Count p);

/// f taken mod m. Yes-certificates include g with f = g - g o alpha (mod m),
/// g vanishing on base cells.
TriState modm_solve(const BratteliDiagram& d, const CellFunction<Count>& f, Count m, int bound);
TriState mod2_solve(const BratteliDiagram& d, const CellFunction<Count>& f, int bound);

/// g(v,k) - g(alpha(v,k)) == f(v,k) mod m on every cell; roof cells use that g is constant on base cells.
bool check_mod_transfer(const BratteliDiagram& d, const CellFunction<Count>& f, const CellFunction<Count>& g, Count m);
/// f = g - g o alpha^{-1} exactly; base cells use that g is constant on roof cells.
bool check_coboundary_transfer(const BratteliDiagram& d, const CellFunction<Count>& f, const CellFunction<Count>& g);

// Transfer function stored in a mod_zero / coboundary certificate.
CellFunction<Count> transfer_of(const TriState& t);

}  // namespace cwac
