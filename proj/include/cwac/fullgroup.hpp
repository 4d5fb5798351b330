#pragma once

#include <vector>

#include "cwac/kzero.hpp"

namespace cwac {

/// x -> alpha^{n(x)}(x) with n constant on the cells of `level`.
struct FullGroupElement {
  int level = 0;
  std::vector<Count> powers;

  bool is_identity() const;
  Count max_abs_power() const;
};

FullGroupElement identity_element(const BratteliDiagram& d, int level = 0);
FullGroupElement constant_power(const BratteliDiagram& d, int level, Count n);

FullGroupElement refine(const BratteliDiagram& d, const FullGroupElement& g, int level);
// Coarsest level representing the same power function.
FullGroupElement simplify(const BratteliDiagram& d, const FullGroupElement& g);

/// Images of the cells of g.level, in cell order.
std::vector<ClopenSet> cell_images(const BratteliDiagram& d, const FullGroupElement& g);
bool is_bijective(const BratteliDiagram& d, const FullGroupElement& g);

ClopenSet apply(const BratteliDiagram& d, const FullGroupElement& g, const ClopenSet& s);
/// g o h
FullGroupElement compose(const BratteliDiagram& d, const FullGroupElement& g, const FullGroupElement& h);
FullGroupElement invert(const BratteliDiagram& d, const FullGroupElement& g);

/// gamma with gamma(U) = V, equal to the identity off U and V. The construction
/// swaps the floors of U\V and V\U tower by tower at the level certifying
/// [1_U] = [1_V]. Throws ContractError when the classes differ and
/// UnknownError when equality cannot be decided within `bound`.
FullGroupElement hopf_exchange(const BratteliDiagram& d, const ClopenSet& u, const ClopenSet& v, int bound);
/// gamma with gamma(U) contained in V, given [1_U] <= [1_V].
FullGroupElement hopf_exchange_into(const BratteliDiagram& d, const ClopenSet& u, const ClopenSet& v, int bound);

/// sigma in the full group with sigma alpha sigma^{-1}(P[i]) = target[i] for every i.
/// `target` is the image partition under some homeomorphism beta; preconditions
/// [1_{P[i]}] = [1_{target[i]}] are checked and a failure names the index.
FullGroupElement lemma_key_conjugator(const BratteliDiagram& d, const std::vector<ClopenSet>& partition,
                                      const std::vector<ClopenSet>& target, int bound);

/// Returns the indices i for which sigma alpha sigma^{-1}(P[i]) differs from target[i].
std::vector<int> key_conjugator_failures(const BratteliDiagram& d, const FullGroupElement& sigma,
                                         const std::vector<ClopenSet>& partition, const std::vector<ClopenSet>& target);

Json to_json(const FullGroupElement& g, const BratteliDiagram& d);
FullGroupElement full_group_from_json(const Json& j, const BratteliDiagram& d);

}  // namespace cwac
