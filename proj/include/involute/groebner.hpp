#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "involute/module_element.hpp"
#include "involute/term_order.hpp"

namespace involute {

// Shared step budget. A limit of 0 means unlimited. One unit is one
// tail-subtraction inside polynomial division.
struct Budget {
  std::uint64_t limit = 0;
  std::uint64_t used = 0;

  bool charge(std::uint64_t k = 1) {
    used += k;
    return limit == 0 || used <= limit;
  }
  bool exhausted() const { return limit != 0 && used > limit; }
};

struct ReduceResult {
  FreeModuleElement remainder;
  bool complete = true;  // false when the budget ran out mid-division
};

namespace detail {

// Largest module term of f that is divisible by some leading term in leads;
// returns index into leads. Deterministic: first basis element that divides.
struct ReducibleTerm {
  ModuleTerm term;
  Rational coef;
  std::size_t basis_index;
};

inline std::optional<ReducibleTerm> find_reducible(
    const FreeModuleElement& f, const std::vector<LeadingModuleTerm>& leads,
    const TermOrder& ord) {
  std::optional<ReducibleTerm> best;
  for (int pos = 0; pos < f.rank(); ++pos) {
    for (const auto& [mono, coef] : f[pos].terms()) {
      ModuleTerm t{pos, mono};
      if (best && !module_term_less(ord, best->term, t)) continue;
      for (std::size_t gi = 0; gi < leads.size(); ++gi) {
        if (leads[gi].term.pos != pos) continue;
        if (!leads[gi].term.mono.divides(mono)) continue;
        best = ReducibleTerm{t, coef, gi};
        break;
      }
    }
  }
  return best;
}

}  // namespace detail

// Full normal form of f against basis: repeatedly cancels the largest
// divisible term. The remainder has no term divisible by any basis lead.
inline ReduceResult reduce(const FreeModuleElement& f,
                           const std::vector<FreeModuleElement>& basis,
                           const TermOrder& ord, Budget& budget) {
  std::vector<LeadingModuleTerm> leads;
  leads.reserve(basis.size());
  for (const auto& g : basis) {
    if (g.is_zero()) throw std::invalid_argument("reduce: zero basis element");
    leads.push_back(leading_module_term(g, ord));
  }
  FreeModuleElement r = f;
  for (;;) {
    if (r.is_zero()) return {r, true};
    auto hit = detail::find_reducible(r, leads, ord);
    if (!hit) return {r, true};
    if (!budget.charge()) return {r, false};
    const auto& g = basis[hit->basis_index];
    const auto& lead = leads[hit->basis_index];
    const Monomial shift = lead.term.mono.quotient_of(hit->term.mono);
    r -= g.times_term(shift, hit->coef / lead.coef);
  }
}

inline ReduceResult reduce(const FreeModuleElement& f,
                           const std::vector<FreeModuleElement>& basis,
                           const TermOrder& ord) {
  Budget unlimited;
  return reduce(f, basis, ord, unlimited);
}

// Groebner basis of a submodule of R^rank, plus the flags needed to trust it.
struct ModuleBasis {
  VarSplit split{1, 0};
  int rank = 1;
  TermOrder order;
  std::vector<FreeModuleElement> generators;
  bool is_groebner = false;
  std::uint64_t steps_used = 0;
};

// Buchberger with first-found (FIFO) pair selection and the lcm chain
// criterion. Stops early when the budget runs out and marks the result as a
// partial basis.
inline ModuleBasis buchberger(const std::vector<FreeModuleElement>& input,
                              const TermOrder& ord, Budget& budget) {
  ModuleBasis out;
  out.order = ord;
  std::vector<FreeModuleElement> g;
  for (const auto& f : input) {
    if (f.is_zero()) continue;
    const auto lead = leading_module_term(f, ord);
    g.push_back(f.scaled(lead.coef.inverse()));
  }
  if (g.empty()) {
    if (input.empty()) throw std::invalid_argument("buchberger: no generators");
    out.split = input.front().split();
    out.rank = input.front().rank();
    out.is_groebner = true;
    return out;
  }
  out.split = g.front().split();
  out.rank = g.front().rank();

  std::vector<LeadingModuleTerm> leads;
  for (const auto& f : g) leads.push_back(leading_module_term(f, ord));

  std::deque<std::pair<std::size_t, std::size_t>> queue;
  std::set<std::pair<std::size_t, std::size_t>> done;
  auto push_pairs_for = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i) queue.emplace_back(i, j);
  };
  for (std::size_t j = 1; j < g.size(); ++j) push_pairs_for(j);

  bool complete = true;
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    done.insert({i, j});
    if (leads[i].term.pos != leads[j].term.pos) continue;
    const Monomial lcm = leads[i].term.mono.lcm(leads[j].term.mono);
    // Chain criterion: a third lead dividing the lcm whose pairs with i and j
    // are both settled makes this S-pair redundant.
    bool skip = false;
    for (std::size_t k = 0; k < g.size() && !skip; ++k) {
      if (k == i || k == j) continue;
      if (leads[k].term.pos != leads[i].term.pos) continue;
      if (!leads[k].term.mono.divides(lcm)) continue;
      const std::pair<std::size_t, std::size_t> p1{std::min(i, k), std::max(i, k)};
      const std::pair<std::size_t, std::size_t> p2{std::min(k, j), std::max(k, j)};
      if (done.count(p1) && done.count(p2)) skip = true;
    }
    if (skip) continue;

    const FreeModuleElement spoly =
        g[i].times_term(leads[i].term.mono.quotient_of(lcm), Rational(1)) -
        g[j].times_term(leads[j].term.mono.quotient_of(lcm), Rational(1));
    ReduceResult red = reduce(spoly, g, ord, budget);
    if (!red.complete) {
      complete = false;
      break;
    }
    if (!red.remainder.is_zero()) {
      const auto lead = leading_module_term(red.remainder, ord);
      g.push_back(red.remainder.scaled(lead.coef.inverse()));
      leads.push_back(leading_module_term(g.back(), ord));
      push_pairs_for(g.size() - 1);
    }
  }

  if (complete) {
    // Minimalize: drop generators whose lead another lead divides.
    std::vector<bool> keep(g.size(), true);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t k = 0; k < g.size() && keep[i]; ++k) {
        if (k == i || !keep[k]) continue;
        if (leads[k].term.pos != leads[i].term.pos) continue;
        if (leads[k].term.mono.divides(leads[i].term.mono) &&
            !(k > i && module_term_equal(leads[k].term, leads[i].term)))
          keep[i] = false;
      }
    }
    std::vector<FreeModuleElement> minimal;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (keep[i]) minimal.push_back(g[i]);
    // Tail-reduce each against the others for the reduced basis.
    std::vector<FreeModuleElement> reduced;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
      std::vector<FreeModuleElement> others;
      for (std::size_t k = 0; k < minimal.size(); ++k)
        if (k != i) others.push_back(minimal[k]);
      if (others.empty()) {
        reduced.push_back(minimal[i]);
        continue;
      }
      ReduceResult red = reduce(minimal[i], others, ord, budget);
      if (!red.complete) {
        complete = false;
        break;
      }
      if (!red.remainder.is_zero()) {
        const auto lead = leading_module_term(red.remainder, ord);
        reduced.push_back(red.remainder.scaled(lead.coef.inverse()));
      }
    }
    if (complete) {
      std::sort(reduced.begin(), reduced.end(),
                [&](const FreeModuleElement& a, const FreeModuleElement& b) {
                  return module_term_less(ord, leading_module_term(a, ord).term,
                                          leading_module_term(b, ord).term);
                });
      g = std::move(reduced);
    }
  }

  out.generators = std::move(g);
  out.is_groebner = complete;
  out.steps_used = budget.used;
  return out;
}

inline ModuleBasis buchberger(const std::vector<FreeModuleElement>& input,
                              const TermOrder& ord = TermOrder{}) {
  Budget unlimited;
  return buchberger(input, ord, unlimited);
}

// Membership of f in the submodule spanned by basis. Requires a completed
// Groebner basis; a partial basis cannot decide membership.
inline bool member(const FreeModuleElement& f, const ModuleBasis& basis) {
  if (!basis.is_groebner)
    throw std::invalid_argument("member: basis is partial (budget exhausted)");
  if (f.is_zero()) return true;
  if (basis.generators.empty()) return false;
  return reduce(f, basis.generators, basis.order).remainder.is_zero();
}

// Ideal-case conveniences: rank-1 module elements.
inline FreeModuleElement as_module_element(const GradedPolynomial& p) {
  return FreeModuleElement({p});
}

inline ModuleBasis ideal_basis(const std::vector<GradedPolynomial>& gens,
                               const TermOrder& ord, Budget& budget) {
  std::vector<FreeModuleElement> elems;
  elems.reserve(gens.size());
  for (const auto& p : gens) elems.push_back(as_module_element(p));
  if (elems.empty()) throw std::invalid_argument("ideal_basis: no generators");
  return buchberger(elems, ord, budget);
}

inline ModuleBasis ideal_basis(const std::vector<GradedPolynomial>& gens,
                               const TermOrder& ord = TermOrder{}) {
  Budget unlimited;
  return ideal_basis(gens, ord, unlimited);
}

inline bool ideal_member(const GradedPolynomial& p, const ModuleBasis& basis) {
  return member(as_module_element(p), basis);
}

}  // namespace involute
