#pragma once

#include "involute/monomial.hpp"

namespace involute {

enum class MonoOrder { grevlex, lex };

// How module positions rank against monomials. Position-over-term with
// lower positions first eliminates whole components early, which is what
// the closure machinery wants as a default.
enum class PositionRule { position_over_term, term_over_position };

struct TermOrder {
  MonoOrder mono = MonoOrder::grevlex;
  PositionRule rule = PositionRule::position_over_term;
};

inline bool mono_less(const TermOrder& ord, const Monomial& a, const Monomial& b) {
  return ord.mono == MonoOrder::grevlex ? grevlex_less(a, b) : lex_less(a, b);
}

// A term of a free module element: component position plus monomial.
// Positions rank e_0 > e_1 > ... (lower index is greater).
struct ModuleTerm {
  int pos = 0;
  Monomial mono;
};

inline bool module_term_less(const TermOrder& ord, const ModuleTerm& a, const ModuleTerm& b) {
  if (ord.rule == PositionRule::position_over_term) {
    if (a.pos != b.pos) return a.pos > b.pos;
    return mono_less(ord, a.mono, b.mono);
  }
  if (a.mono != b.mono) return mono_less(ord, a.mono, b.mono);
  return a.pos > b.pos;
}

inline bool module_term_equal(const ModuleTerm& a, const ModuleTerm& b) {
  return a.pos == b.pos && a.mono == b.mono;
}

}  // namespace involute
