#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "involute/polynomial.hpp"
#include "involute/term_order.hpp"

namespace involute {

// Element of the free module R^rank over the polynomial ring R = Q[x, u].
class FreeModuleElement {
 public:
  FreeModuleElement() = default;
  FreeModuleElement(const VarSplit& split, int rank)
      : split_(split), comps_(static_cast<std::size_t>(rank), GradedPolynomial(split)) {
    if (rank < 1) throw std::invalid_argument("FreeModuleElement: rank must be positive");
  }
  explicit FreeModuleElement(std::vector<GradedPolynomial> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw std::invalid_argument("FreeModuleElement: rank must be positive");
    split_ = comps_.front().split();
    for (const auto& c : comps_) require_same_split(split_, c.split(), "FreeModuleElement");
  }

  const VarSplit& split() const { return split_; }
  int rank() const { return static_cast<int>(comps_.size()); }
  const GradedPolynomial& operator[](int i) const {
    return comps_.at(static_cast<std::size_t>(i));
  }
  GradedPolynomial& operator[](int i) { return comps_.at(static_cast<std::size_t>(i)); }
  const std::vector<GradedPolynomial>& components() const { return comps_; }

  bool is_zero() const {
    for (const auto& c : comps_)
      if (!c.is_zero()) return false;
    return true;
  }

  FreeModuleElement& operator+=(const FreeModuleElement& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  FreeModuleElement& operator-=(const FreeModuleElement& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  friend FreeModuleElement operator+(FreeModuleElement a, const FreeModuleElement& b) {
    return a += b;
  }
  friend FreeModuleElement operator-(FreeModuleElement a, const FreeModuleElement& b) {
    return a -= b;
  }
  FreeModuleElement operator-() const {
    FreeModuleElement r = *this;
    for (auto& c : r.comps_) c = -c;
    return r;
  }

  FreeModuleElement scaled(const Rational& c) const {
    FreeModuleElement r = *this;
    for (auto& comp : r.comps_) comp = comp.scaled(c);
    return r;
  }

  // Multiplies every component by c * mono.
  FreeModuleElement times_term(const Monomial& mono, const Rational& c) const {
    FreeModuleElement r = *this;
    for (auto& comp : r.comps_) comp = comp.times_term(mono, c);
    return r;
  }

  FreeModuleElement times_poly(const GradedPolynomial& p) const {
    FreeModuleElement r = *this;
    for (auto& comp : r.comps_) comp = comp * p;
    return r;
  }

  bool operator==(const FreeModuleElement& o) const {
    return split_ == o.split_ && comps_ == o.comps_;
  }
  bool operator!=(const FreeModuleElement& o) const { return !(*this == o); }

 private:
  void require_compatible(const FreeModuleElement& o) const {
    require_same_split(split_, o.split_, "FreeModuleElement");
    if (comps_.size() != o.comps_.size())
      throw std::invalid_argument("FreeModuleElement: rank mismatch");
  }

  VarSplit split_{1, 0};
  std::vector<GradedPolynomial> comps_;
};

// Leading monomial of one polynomial under the given monomial order.
inline const Monomial& leading_mono(const GradedPolynomial& p, const TermOrder& ord) {
  if (p.is_zero()) throw std::domain_error("leading_mono: zero polynomial");
  if (ord.mono == MonoOrder::grevlex) return p.leading_grevlex().first;
  const Monomial* best = nullptr;
  for (const auto& [mono, c] : p.terms())
    if (best == nullptr || lex_less(*best, mono)) best = &mono;
  return *best;
}

struct LeadingModuleTerm {
  ModuleTerm term;
  Rational coef;
};

// Leading term of a module element under the full order (positions included).
inline LeadingModuleTerm leading_module_term(const FreeModuleElement& f, const TermOrder& ord) {
  if (f.is_zero()) throw std::domain_error("leading_module_term: zero element");
  std::optional<LeadingModuleTerm> best;
  for (int pos = 0; pos < f.rank(); ++pos) {
    if (f[pos].is_zero()) continue;
    const Monomial& lm = leading_mono(f[pos], ord);
    ModuleTerm cand{pos, lm};
    if (!best || module_term_less(ord, best->term, cand))
      best = LeadingModuleTerm{cand, f[pos].terms().at(lm)};
    if (ord.rule == PositionRule::position_over_term) break;  // first nonzero pos wins
  }
  return *best;
}

}  // namespace involute
