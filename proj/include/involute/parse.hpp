#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "involute/polynomial.hpp"

namespace involute {

// Parse failure with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t pos, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(pos) + ": " + what),
        position(pos) {}
  std::size_t position;
};

// Grammar: integer literals, rationals a/b, variables x1..xn / u1..um,
// operators + - * ^ and parentheses. ^ binds tightest, then *, then sums.
// No implicit multiplication. '/' appears only inside rational literals.
class PolyParser {
 public:
  PolyParser(std::string text, VarSplit split)
      : text_(std::move(text)), split_(split) {}

  GradedPolynomial parse() {
    pos_ = 0;
    GradedPolynomial p = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return p;
  }

 private:
  GradedPolynomial parse_expr() {
    skip_ws();
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = (peek() == '-');
      ++pos_;
    }
    GradedPolynomial acc = parse_addend();
    if (negate) acc = -acc;
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        skip_ws();
        bool inner_negate = false;
        if (peek() == '+' || peek() == '-') {
          inner_negate = (peek() == '-');
          ++pos_;
        }
        GradedPolynomial rhs = parse_addend();
        if ((c == '-') != inner_negate) rhs = -rhs;
        acc += rhs;
      } else {
        return acc;
      }
    }
  }

  GradedPolynomial parse_addend() {
    GradedPolynomial acc = parse_factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        acc *= parse_factor();
      } else {
        return acc;
      }
    }
  }

  GradedPolynomial parse_factor() {
    GradedPolynomial base = parse_atom();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t at = pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError(pos_, "expected integer exponent after '^'");
      const std::string digits = read_digits();
      if (digits.size() > 6) throw ParseError(at, "exponent too large");
      const std::uint64_t e = std::stoull(digits);
      if (e > 1000000) throw ParseError(at, "exponent too large");
      return base.pow(e);
    }
    return base;
  }

  GradedPolynomial parse_atom() {
    skip_ws();
    const std::size_t at = pos_;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      GradedPolynomial inner = parse_expr();
      skip_ws();
      if (peek() != ')') throw ParseError(pos_, "expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::string num = read_digits();
      skip_ws();
      if (peek() == '/') {
        ++pos_;
        skip_ws();
        const std::size_t dat = pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek())))
          throw ParseError(pos_, "expected integer denominator");
        const std::string den = read_digits();
        Rational r = Rational::from_string(num);
        Rational d = Rational::from_string(den);
        if (d.is_zero()) throw ParseError(dat, "zero denominator");
        return GradedPolynomial::constant(split_, r / d);
      }
      return GradedPolynomial::constant(split_, Rational::from_string(num));
    }
    if (c == 'x' || c == 'u') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError(at, "expected variable index after '" + std::string(1, c) + "'");
      const std::string digits = read_digits();
      if (digits.size() > 6) throw ParseError(at, "variable index too large");
      const long k = std::stol(digits);
      const int bound = (c == 'x') ? split_.n : split_.m;
      if (k < 1 || k > bound)
        throw ParseError(at, "unknown variable " + std::string(1, c) + digits +
                                 " for split " + split_.str());
      const int idx = (c == 'x') ? static_cast<int>(k - 1) : split_.n + static_cast<int>(k - 1);
      return GradedPolynomial::variable(split_, idx);
    }
    if (c == '\0') throw ParseError(pos_, "unexpected end of input");
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  std::string read_digits() {
    std::string out;
    while (std::isdigit(static_cast<unsigned char>(peek()))) out += text_[pos_++];
    return out;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string text_;
  VarSplit split_;
  std::size_t pos_ = 0;
};

inline GradedPolynomial parse_poly(const std::string& text, const VarSplit& split) {
  return PolyParser(text, split).parse();
}

}  // namespace involute
