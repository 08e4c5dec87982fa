#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "involute/varsplit.hpp"

namespace involute {

// Exponent vector over a fixed variable count. Exponents are machine
// integers; any operation that would push an exponent past kMaxExponent
// throws instead of wrapping.
class Monomial {
 public:
  static constexpr std::uint32_t kMaxExponent = 1u << 30;

  Monomial() = default;
  explicit Monomial(int nvars) : e_(static_cast<std::size_t>(nvars), 0) {
    if (nvars < 1) throw std::invalid_argument("Monomial: need at least one variable");
  }
  explicit Monomial(std::vector<std::uint32_t> exps) : e_(std::move(exps)) {
    if (e_.empty()) throw std::invalid_argument("Monomial: need at least one variable");
    for (auto x : e_) check_exponent(x);
  }

  static Monomial unit(int nvars) { return Monomial(nvars); }
  static Monomial variable(int nvars, int idx, std::uint32_t power = 1) {
    Monomial m(nvars);
    m.set(idx, power);
    return m;
  }

  int nvars() const { return static_cast<int>(e_.size()); }
  std::uint32_t operator[](int i) const { return e_.at(static_cast<std::size_t>(i)); }
  void set(int i, std::uint32_t v) {
    check_exponent(v);
    e_.at(static_cast<std::size_t>(i)) = v;
  }
  const std::vector<std::uint32_t>& exponents() const { return e_; }

  std::uint64_t degree() const {
    std::uint64_t d = 0;
    for (auto x : e_) d += x;
    return d;
  }

  std::uint64_t fiber_degree(const VarSplit& s) const {
    require_width(s);
    std::uint64_t d = 0;
    for (int i = s.n; i < s.total(); ++i) d += e_[static_cast<std::size_t>(i)];
    return d;
  }

  std::uint64_t base_degree(const VarSplit& s) const {
    require_width(s);
    std::uint64_t d = 0;
    for (int i = 0; i < s.n; ++i) d += e_[static_cast<std::size_t>(i)];
    return d;
  }

  bool is_unit() const {
    for (auto x : e_)
      if (x != 0) return false;
    return true;
  }

  Monomial operator*(const Monomial& o) const {
    require_same_width(o);
    Monomial r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) {
      const std::uint64_t s = std::uint64_t(r.e_[i]) + o.e_[i];
      if (s > kMaxExponent) throw std::overflow_error("Monomial: exponent overflow");
      r.e_[i] = static_cast<std::uint32_t>(s);
    }
    return r;
  }

  bool divides(const Monomial& o) const {
    require_same_width(o);
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] > o.e_[i]) return false;
    return true;
  }

  // Quotient o / this; caller guarantees divisibility.
  Monomial quotient_of(const Monomial& o) const {
    require_same_width(o);
    Monomial r = o;
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (e_[i] > o.e_[i]) throw std::domain_error("Monomial: quotient not divisible");
      r.e_[i] = o.e_[i] - e_[i];
    }
    return r;
  }

  Monomial lcm(const Monomial& o) const {
    require_same_width(o);
    Monomial r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (o.e_[i] > r.e_[i]) r.e_[i] = o.e_[i];
    return r;
  }

  bool operator==(const Monomial& o) const { return e_ == o.e_; }
  bool operator!=(const Monomial& o) const { return !(*this == o); }

 private:
  static void check_exponent(std::uint32_t v) {
    if (v > kMaxExponent) throw std::overflow_error("Monomial: exponent overflow");
  }
  void require_same_width(const Monomial& o) const {
    if (e_.size() != o.e_.size())
      throw std::invalid_argument("Monomial: variable count mismatch");
  }
  void require_width(const VarSplit& s) const {
    if (static_cast<int>(e_.size()) != s.total())
      throw std::invalid_argument("Monomial: split width mismatch");
  }

  std::vector<std::uint32_t> e_;
};

// Graded reverse lexicographic: higher total degree wins; on equal degree the
// last index where the exponents differ decides, with the smaller exponent
// winning there. Variables are ranked x1 > x2 > ... > xn > u1 > ... > um.
inline bool grevlex_less(const Monomial& a, const Monomial& b) {
  const std::uint64_t da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  for (int i = a.nvars() - 1; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

// Pure lexicographic with x1 > x2 > ... > um.
inline bool lex_less(const Monomial& a, const Monomial& b) {
  for (int i = 0; i < a.nvars(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

struct GrevlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_less(a, b); }
};

}  // namespace involute
