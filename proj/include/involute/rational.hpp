#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace involute {

// Arbitrary-precision rational, kept in canonical form: gcd(num, den) = 1,
// den > 0, zero stored as 0/1. Backed by GMP.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}        // NOLINT: implicit by design
  Rational(int n) : v_(n) {}         // NOLINT
  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }
  explicit Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }

  // Accepts "a" or "a/b" with optional leading minus, arbitrary precision.
  static Rational from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(mpq_class(mpz_class(s)));
      mpz_class num(s.substr(0, slash));
      mpz_class den(s.substr(slash + 1));
      return Rational(num, den);
    } catch (const std::invalid_argument&) {
      throw std::domain_error("Rational: cannot parse '" + s + "'");
    }
  }

  const mpq_class& raw() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  double to_double() const { return v_.get_d(); }

  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { Rational r; r.v_ = -v_; return r; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  Rational abs() const { Rational r; r.v_ = ::abs(v_); return r; }

  Rational pow(std::uint64_t e) const {
    Rational acc(1), base = *this;
    while (e != 0) {
      if (e & 1u) acc *= base;
      base *= base;
      e >>= 1u;
    }
    return acc;
  }

  Rational inverse() const {
    if (is_zero()) throw std::domain_error("Rational: inverse of zero");
    Rational r;
    r.v_ = 1 / v_;
    return r;
  }

 private:
  mpq_class v_;
};

// Nearest rational with denominator <= den_bound, by continued fractions.
// Returns the convergent only if it reproduces x within tol.
inline std::optional<Rational> reconstruct_rational(double x, std::uint64_t den_bound,
                                                    double tol) {
  if (den_bound == 0) return std::nullopt;
  if (!(x == x) || x > 9e15 || x < -9e15) return std::nullopt;
  const bool neg = x < 0;
  double r = neg ? -x : x;
  // Convergents p_k/q_k of the continued fraction of r.
  mpz_class p_prev(1), q_prev(0);
  mpz_class p(static_cast<long>(r)), q(1);
  double frac = r - static_cast<double>(static_cast<long>(r));
  for (int it = 0; it < 64; ++it) {
    if (q > 0) {
      const Rational cand = neg ? -Rational(p, q) : Rational(p, q);
      if (mpz_cmp_ui(cand.denominator().get_mpz_t(), den_bound) <= 0) {
        const double err = cand.to_double() - x;
        if ((err < 0 ? -err : err) <= tol) return cand;
      } else {
        break;
      }
    }
    if (frac < 1e-15) break;
    r = 1.0 / frac;
    if (r > 9e15) break;
    const long a = static_cast<long>(r);
    frac = r - static_cast<double>(a);
    mpz_class p_next = a * p + p_prev;
    mpz_class q_next = a * q + q_prev;
    p_prev = p; q_prev = q;
    p = p_next; q = q_next;
  }
  return std::nullopt;
}

}  // namespace involute
