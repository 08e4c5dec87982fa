#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "involute/monomial.hpp"
#include "involute/rational.hpp"
#include "involute/varsplit.hpp"

namespace involute {

// Multivariate polynomial over Q with a base/fiber variable split. Terms are
// stored sparsely, keyed by monomial in grevlex order, coefficients never
// zero. Two polynomials interoperate only when their splits agree.
class GradedPolynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrevlexLess>;

  GradedPolynomial() = default;
  explicit GradedPolynomial(const VarSplit& split) : split_(split) {}

  static GradedPolynomial zero(const VarSplit& split) { return GradedPolynomial(split); }

  static GradedPolynomial constant(const VarSplit& split, const Rational& c) {
    GradedPolynomial p(split);
    if (!c.is_zero()) p.terms_[Monomial::unit(split.total())] = c;
    return p;
  }

  static GradedPolynomial variable(const VarSplit& split, int idx, std::uint32_t power = 1) {
    if (idx < 0 || idx >= split.total())
      throw std::out_of_range("GradedPolynomial: variable index out of range");
    GradedPolynomial p(split);
    if (power == 0) return constant(split, 1);
    p.terms_[Monomial::variable(split.total(), idx, power)] = Rational(1);
    return p;
  }

  static GradedPolynomial term(const VarSplit& split, const Monomial& mono, const Rational& c) {
    GradedPolynomial p(split);
    if (!c.is_zero()) p.terms_[mono] = c;
    return p;
  }

  const VarSplit& split() const { return split_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
  }

  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::domain_error("GradedPolynomial: not a constant");
    return terms_.begin()->second;
  }

  // Nonzero constant: certifies a unit of the polynomial ring.
  bool is_nonzero_constant() const {
    return terms_.size() == 1 && terms_.begin()->first.is_unit();
  }

  std::optional<std::uint64_t> degree() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.rbegin()->first.degree();
  }

  std::optional<std::uint64_t> fiber_degree() const {
    if (terms_.empty()) return std::nullopt;
    std::uint64_t d = 0;
    for (const auto& [mono, c] : terms_) {
      const std::uint64_t fd = mono.fiber_degree(split_);
      if (fd > d) d = fd;
    }
    return d;
  }

  std::optional<std::uint64_t> base_degree() const {
    if (terms_.empty()) return std::nullopt;
    std::uint64_t d = 0;
    for (const auto& [mono, c] : terms_) {
      const std::uint64_t bd = mono.base_degree(split_);
      if (bd > d) d = bd;
    }
    return d;
  }

  void add_term(const Monomial& mono, const Rational& c) {
    if (mono.nvars() != split_.total())
      throw std::invalid_argument("GradedPolynomial: monomial width mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(mono);
    if (it == terms_.end()) {
      terms_.emplace(mono, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  GradedPolynomial& operator+=(const GradedPolynomial& o) {
    require_same_split(split_, o.split_, "GradedPolynomial::operator+=");
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
  }

  GradedPolynomial& operator-=(const GradedPolynomial& o) {
    require_same_split(split_, o.split_, "GradedPolynomial::operator-=");
    for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
    return *this;
  }

  friend GradedPolynomial operator+(GradedPolynomial a, const GradedPolynomial& b) {
    return a += b;
  }
  friend GradedPolynomial operator-(GradedPolynomial a, const GradedPolynomial& b) {
    return a -= b;
  }

  GradedPolynomial operator-() const {
    GradedPolynomial r(split_);
    for (const auto& [mono, c] : terms_) r.terms_.emplace(mono, -c);
    return r;
  }

  friend GradedPolynomial operator*(const GradedPolynomial& a, const GradedPolynomial& b) {
    require_same_split(a.split_, b.split_, "GradedPolynomial::operator*");
    GradedPolynomial r(a.split_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  GradedPolynomial& operator*=(const GradedPolynomial& o) { return *this = *this * o; }

  GradedPolynomial scaled(const Rational& c) const {
    GradedPolynomial r(split_);
    if (c.is_zero()) return r;
    for (const auto& [mono, coef] : terms_) r.terms_.emplace(mono, coef * c);
    return r;
  }

  GradedPolynomial times_term(const Monomial& mono, const Rational& c) const {
    GradedPolynomial r(split_);
    if (c.is_zero()) return r;
    for (const auto& [m, coef] : terms_) r.terms_.emplace(m * mono, coef * c);
    return r;
  }

  GradedPolynomial pow(std::uint64_t e) const {
    GradedPolynomial acc = constant(split_, 1);
    GradedPolynomial base = *this;
    while (e != 0) {
      if (e & 1u) acc *= base;
      if (e > 1) base *= base;
      e >>= 1u;
    }
    return acc;
  }

  GradedPolynomial partial(int var) const {
    if (var < 0 || var >= split_.total())
      throw std::out_of_range("GradedPolynomial::partial: variable index out of range");
    GradedPolynomial r(split_);
    for (const auto& [mono, c] : terms_) {
      const std::uint32_t e = mono[var];
      if (e == 0) continue;
      Monomial dm = mono;
      dm.set(var, e - 1);
      r.add_term(dm, c * Rational(static_cast<long>(e)));
    }
    return r;
  }

  // Exact evaluation at a full point (x, u), one rational per variable.
  Rational eval(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != split_.total())
      throw std::invalid_argument("GradedPolynomial::eval: point width mismatch");
    const auto pows = power_table(point);
    Rational acc(0);
    for (const auto& [mono, c] : terms_) {
      Rational t = c;
      for (int i = 0; i < split_.total(); ++i) {
        const std::uint32_t e = mono[i];
        if (e != 0) t *= pows[static_cast<std::size_t>(i)][e];
      }
      acc += t;
    }
    return acc;
  }

  // Float evaluation for numerical drivers; coefficients are converted once
  // per term.
  double eval_double(const std::vector<double>& point) const {
    if (static_cast<int>(point.size()) != split_.total())
      throw std::invalid_argument("GradedPolynomial::eval_double: point width mismatch");
    double acc = 0.0;
    for (const auto& [mono, c] : terms_) {
      double t = c.to_double();
      for (int i = 0; i < split_.total(); ++i)
        for (std::uint32_t e = 0; e < mono[i]; ++e) t *= point[static_cast<std::size_t>(i)];
      acc += t;
    }
    return acc;
  }

  // Substitutes exact base coordinates, returning a polynomial in the fiber
  // variables alone (split (0, m)).
  GradedPolynomial fiber_restrict(const std::vector<Rational>& base_point) const {
    if (static_cast<int>(base_point.size()) != split_.n)
      throw std::invalid_argument("GradedPolynomial::fiber_restrict: base width mismatch");
    if (split_.m == 0)
      throw std::domain_error("GradedPolynomial::fiber_restrict: no fiber variables");
    const VarSplit fiber_split(0, split_.m);
    // Powers of the base coordinates, computed once up to the max exponent.
    std::vector<std::vector<Rational>> pows(static_cast<std::size_t>(split_.n));
    for (int i = 0; i < split_.n; ++i) {
      std::uint32_t maxe = 0;
      for (const auto& [mono, c] : terms_) maxe = std::max(maxe, mono[i]);
      auto& col = pows[static_cast<std::size_t>(i)];
      col.resize(maxe + 1, Rational(1));
      for (std::uint32_t e = 1; e <= maxe; ++e) col[e] = col[e - 1] * base_point[i];
    }
    GradedPolynomial r(fiber_split);
    for (const auto& [mono, c] : terms_) {
      Rational coef = c;
      for (int i = 0; i < split_.n; ++i)
        if (mono[i] != 0) coef *= pows[static_cast<std::size_t>(i)][mono[i]];
      Monomial fm(split_.m);
      for (int i = 0; i < split_.m; ++i) fm.set(i, mono[split_.n + i]);
      r.add_term(fm, coef);
    }
    return r;
  }

  // Ring homomorphism: replaces variable i by images[i]. All images share one
  // target split.
  GradedPolynomial substitute(const std::vector<GradedPolynomial>& images) const {
    if (static_cast<int>(images.size()) != split_.total())
      throw std::invalid_argument("GradedPolynomial::substitute: image count mismatch");
    if (images.empty()) throw std::invalid_argument("GradedPolynomial::substitute: empty");
    const VarSplit target = images.front().split();
    for (const auto& im : images) require_same_split(target, im.split(), "substitute");
    // Lazy per-variable power cache.
    std::vector<std::vector<GradedPolynomial>> pows(images.size());
    auto power_of = [&](int var, std::uint32_t e) -> const GradedPolynomial& {
      auto& col = pows[static_cast<std::size_t>(var)];
      if (col.empty()) col.push_back(GradedPolynomial::constant(target, 1));
      while (col.size() <= e) col.push_back(col.back() * images[static_cast<std::size_t>(var)]);
      return col[e];
    };
    GradedPolynomial r(target);
    for (const auto& [mono, c] : terms_) {
      GradedPolynomial t = constant(target, c);
      for (int i = 0; i < split_.total(); ++i) {
        const std::uint32_t e = mono[i];
        if (e != 0) t *= power_of(i, e);
      }
      r += t;
    }
    return r;
  }

  // Relocates variables into a wider split: var_map[i] is the index of old
  // variable i in the new split. Exponents move verbatim.
  GradedPolynomial embed(const VarSplit& new_split, const std::vector<int>& var_map) const {
    if (static_cast<int>(var_map.size()) != split_.total())
      throw std::invalid_argument("GradedPolynomial::embed: map width mismatch");
    GradedPolynomial r(new_split);
    for (const auto& [mono, c] : terms_) {
      Monomial nm(new_split.total());
      for (int i = 0; i < split_.total(); ++i) {
        const int j = var_map[static_cast<std::size_t>(i)];
        if (j < 0 || j >= new_split.total())
          throw std::out_of_range("GradedPolynomial::embed: target index out of range");
        if (mono[i] != 0) {
          if (nm[j] != 0) throw std::invalid_argument("GradedPolynomial::embed: index clash");
          nm.set(j, mono[i]);
        }
      }
      r.add_term(nm, c);
    }
    return r;
  }

  const std::pair<const Monomial, Rational>& leading_grevlex() const {
    if (terms_.empty()) throw std::domain_error("GradedPolynomial: leading term of zero");
    return *terms_.rbegin();
  }

  bool operator==(const GradedPolynomial& o) const {
    return split_ == o.split_ && terms_ == o.terms_;
  }
  bool operator!=(const GradedPolynomial& o) const { return !(*this == o); }

  // Canonical text form: terms grevlex-descending, exponent 1 and unit
  // coefficients elided, e.g. "x1^2*u1 - 1/2". Zero prints as "0".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const Monomial& mono = it->first;
      const Rational& c = it->second;
      const bool negative = c.sign() < 0;
      if (first) {
        if (negative) out += "-";
        first = false;
      } else {
        out += negative ? " - " : " + ";
      }
      const Rational mag = c.abs();
      if (mono.is_unit()) {
        out += mag.str();
      } else {
        if (!mag.is_one()) {
          out += mag.str();
          out += "*";
        }
        bool first_var = true;
        for (int i = 0; i < split_.total(); ++i) {
          const std::uint32_t e = mono[i];
          if (e == 0) continue;
          if (!first_var) out += "*";
          first_var = false;
          out += split_.var_name(i);
          if (e != 1) out += "^" + std::to_string(e);
        }
      }
    }
    return out;
  }

 private:
  std::vector<std::vector<Rational>> power_table(const std::vector<Rational>& point) const {
    std::vector<std::vector<Rational>> pows(point.size());
    for (int i = 0; i < split_.total(); ++i) {
      std::uint32_t maxe = 0;
      for (const auto& [mono, c] : terms_) maxe = std::max(maxe, mono[i]);
      auto& col = pows[static_cast<std::size_t>(i)];
      col.resize(maxe + 1, Rational(1));
      for (std::uint32_t e = 1; e <= maxe; ++e) col[e] = col[e - 1] * point[i];
    }
    return pows;
  }

  VarSplit split_{1, 0};
  TermMap terms_;
};

// Determinant of a square matrix of polynomials by cofactor expansion along
// the first remaining column. Fine at the matrix sizes minors need.
inline GradedPolynomial poly_det(const std::vector<std::vector<GradedPolynomial>>& a) {
  const std::size_t k = a.size();
  if (k == 0) throw std::invalid_argument("poly_det: empty matrix");
  for (const auto& row : a)
    if (row.size() != k) throw std::invalid_argument("poly_det: not square");
  const VarSplit split = a[0][0].split();
  if (k == 1) return a[0][0];
  GradedPolynomial acc = GradedPolynomial::zero(split);
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i][0].is_zero()) continue;
    std::vector<std::vector<GradedPolynomial>> minor;
    minor.reserve(k - 1);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == i) continue;
      std::vector<GradedPolynomial> row;
      row.reserve(k - 1);
      for (std::size_t c = 1; c < k; ++c) row.push_back(a[r][c]);
      minor.push_back(std::move(row));
    }
    GradedPolynomial contrib = a[i][0] * poly_det(minor);
    if (i % 2 == 1) contrib = -contrib;
    acc += contrib;
  }
  return acc;
}

}  // namespace involute
