#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "involute/polynomial.hpp"

namespace involute {

// Fiberwise algebraic set: the common zero locus of finitely many
// polynomials over a split. No equations means the whole space. The
// outer_approximation flag marks loci built from truncated closures, which
// only contain the true set.
struct FwSet {
  VarSplit split{1, 0};
  std::vector<GradedPolynomial> equations;
  bool outer_approximation = false;

  FwSet() = default;
  explicit FwSet(const VarSplit& s, std::vector<GradedPolynomial> eqs = {},
                 bool outer = false)
      : split(s), equations(std::move(eqs)), outer_approximation(outer) {
    for (const auto& e : equations) require_same_split(split, e.split(), "FwSet");
    // Identically zero equations constrain nothing.
    std::vector<GradedPolynomial> kept;
    kept.reserve(equations.size());
    for (auto& e : equations)
      if (!e.is_zero()) kept.push_back(std::move(e));
    equations = std::move(kept);
  }

  bool member(const std::vector<Rational>& point) const {
    for (const auto& e : equations)
      if (!e.eval(point).is_zero()) return false;
    return true;
  }

  // A nonzero constant among the equations certifies the empty locus.
  bool certified_empty() const {
    for (const auto& e : equations)
      if (e.is_nonzero_constant()) return true;
    return false;
  }
};

// Difference of a fiberwise algebraic set and the common zero locus of the
// negative list: membership needs every positive equation to vanish and,
// when the negative list is nonempty, some negative polynomial to be
// nonzero. An empty negative list subtracts nothing.
struct FwConstructible {
  FwSet positive;
  std::vector<GradedPolynomial> negative;

  FwConstructible() = default;
  FwConstructible(FwSet pos, std::vector<GradedPolynomial> neg)
      : positive(std::move(pos)), negative(std::move(neg)) {
    for (const auto& g : negative)
      require_same_split(positive.split, g.split(), "FwConstructible");
  }

  const VarSplit& split() const { return positive.split; }

  bool member(const std::vector<Rational>& point) const {
    if (!positive.member(point)) return false;
    if (negative.empty()) return true;
    for (const auto& g : negative)
      if (!g.eval(point).is_zero()) return true;
    return false;
  }
};

struct RabinowitschResult {
  FwSet set;
  // Set when the input had no negative part: the result is the positive set
  // itself (no auxiliary variable was needed).
  bool negative_was_empty = false;
};

// Classic embedding of a constructible set as an algebraic set one fiber
// variable up: combine the negative part into g (sum of squares keeps the
// real zero locus), then adjoin u_{m+1} * g - 1 = 0. Forgetting u_{m+1}
// projects exactly onto the original set.
inline RabinowitschResult rabinowitsch_embed(const FwConstructible& s) {
  if (s.negative.empty()) return {s.positive, true};
  const VarSplit& old = s.positive.split;
  const VarSplit wide(old.n, old.m + 1);
  std::vector<int> var_map;
  var_map.reserve(static_cast<std::size_t>(old.total()));
  for (int i = 0; i < old.total(); ++i) var_map.push_back(i);

  std::vector<GradedPolynomial> eqs;
  eqs.reserve(s.positive.equations.size() + 1);
  for (const auto& e : s.positive.equations) eqs.push_back(e.embed(wide, var_map));

  GradedPolynomial g(wide);
  if (s.negative.size() == 1) {
    g = s.negative.front().embed(wide, var_map);
  } else {
    for (const auto& neg : s.negative) {
      const auto lifted = neg.embed(wide, var_map);
      g += lifted * lifted;
    }
  }
  const auto aux = GradedPolynomial::variable(wide, wide.total() - 1);
  eqs.push_back(aux * g - GradedPolynomial::constant(wide, 1));
  return {FwSet(wide, std::move(eqs), s.positive.outer_approximation), false};
}

}  // namespace involute
