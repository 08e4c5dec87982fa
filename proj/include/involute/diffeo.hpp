#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "involute/polynomial.hpp"
#include "involute/vector_field.hpp"

namespace involute {

// Diffeomorphism of R^n x R^m of the form (x, u) |-> (f(x), A(x) u): a base
// diffeomorphism coupled with a fiberwise linear map. Both f and A must come
// with declared polynomial inverses, which the constructor verifies exactly;
// this is the class of maps whose pushforward keeps fields polynomial.
class PartiallyLinearDiffeo {
 public:
  PartiallyLinearDiffeo(const VarSplit& split, std::vector<GradedPolynomial> f,
                        std::vector<GradedPolynomial> f_inv,
                        std::vector<std::vector<GradedPolynomial>> a,
                        std::vector<std::vector<GradedPolynomial>> a_inv)
      : split_(split), f_(std::move(f)), f_inv_(std::move(f_inv)), a_(std::move(a)),
        a_inv_(std::move(a_inv)) {
    if (static_cast<int>(f_.size()) != split_.n || f_inv_.size() != f_.size())
      throw std::invalid_argument("PartiallyLinearDiffeo: base map needs n components");
    check_matrix(a_, "A");
    check_matrix(a_inv_, "A_inv");
    for (const auto& p : f_) check_base_only(p, "f");
    for (const auto& p : f_inv_) check_base_only(p, "f_inv");

    // f and f_inv must invert each other exactly.
    for (int i = 0; i < split_.n; ++i) {
      if (compose_base(f_[static_cast<std::size_t>(i)], f_inv_) !=
          GradedPolynomial::variable(split_, i))
        throw std::invalid_argument("PartiallyLinearDiffeo: f(f_inv) is not the identity");
      if (compose_base(f_inv_[static_cast<std::size_t>(i)], f_) !=
          GradedPolynomial::variable(split_, i))
        throw std::invalid_argument("PartiallyLinearDiffeo: f_inv(f) is not the identity");
    }
    // A(x) A_inv(x) = A_inv(x) A(x) = I as polynomial matrices.
    check_inverse_product(a_, a_inv_);
    check_inverse_product(a_inv_, a_);
  }

  static PartiallyLinearDiffeo identity(const VarSplit& split) {
    std::vector<GradedPolynomial> f, fi;
    for (int i = 0; i < split.n; ++i) {
      f.push_back(GradedPolynomial::variable(split, i));
      fi.push_back(GradedPolynomial::variable(split, i));
    }
    auto eye = identity_matrix(split);
    return PartiallyLinearDiffeo(split, f, fi, eye, eye);
  }

  const VarSplit& split() const { return split_; }
  const std::vector<GradedPolynomial>& base_map() const { return f_; }
  const std::vector<GradedPolynomial>& base_map_inverse() const { return f_inv_; }
  const std::vector<std::vector<GradedPolynomial>>& fiber_matrix() const { return a_; }
  const std::vector<std::vector<GradedPolynomial>>& fiber_matrix_inverse() const {
    return a_inv_;
  }

  // The inverse is again partially linear: y |-> f_inv(y) with fiber matrix
  // A_inv(f_inv(y)).
  PartiallyLinearDiffeo inverse() const {
    std::vector<std::vector<GradedPolynomial>> b, b_inv;
    for (int r = 0; r < split_.m; ++r) {
      std::vector<GradedPolynomial> row_b, row_binv;
      for (int c = 0; c < split_.m; ++c) {
        row_b.push_back(compose_base(a_inv_[r][c], f_inv_));
        row_binv.push_back(compose_base(a_[r][c], f_inv_));
      }
      b.push_back(std::move(row_b));
      b_inv.push_back(std::move(row_binv));
    }
    return PartiallyLinearDiffeo(split_, f_inv_, f_, std::move(b), std::move(b_inv));
  }

  // Exact image of a point.
  std::vector<Rational> apply(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != split_.total())
      throw std::invalid_argument("PartiallyLinearDiffeo::apply: width mismatch");
    std::vector<Rational> out;
    out.reserve(point.size());
    for (const auto& p : f_) out.push_back(p.eval(point));
    for (int a = 0; a < split_.m; ++a) {
      Rational acc(0);
      for (int b = 0; b < split_.m; ++b)
        acc += a_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].eval(point) *
               point[static_cast<std::size_t>(split_.n + b)];
      out.push_back(acc);
    }
    return out;
  }

 private:
  static std::vector<std::vector<GradedPolynomial>> identity_matrix(const VarSplit& split) {
    std::vector<std::vector<GradedPolynomial>> eye(
        static_cast<std::size_t>(split.m),
        std::vector<GradedPolynomial>(static_cast<std::size_t>(split.m),
                                      GradedPolynomial::zero(split)));
    for (int i = 0; i < split.m; ++i)
      eye[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
          GradedPolynomial::constant(split, 1);
    return eye;
  }

  void check_matrix(const std::vector<std::vector<GradedPolynomial>>& mat,
                    const char* which) const {
    if (static_cast<int>(mat.size()) != split_.m)
      throw std::invalid_argument(std::string("PartiallyLinearDiffeo: ") + which +
                                  " needs m rows");
    for (const auto& row : mat) {
      if (static_cast<int>(row.size()) != split_.m)
        throw std::invalid_argument(std::string("PartiallyLinearDiffeo: ") + which +
                                    " needs m columns");
      for (const auto& p : row) check_base_only(p, which);
    }
  }

  void check_base_only(const GradedPolynomial& p, const char* which) const {
    require_same_split(split_, p.split(), "PartiallyLinearDiffeo");
    const auto fd = p.fiber_degree();
    if (fd && *fd > 0)
      throw std::invalid_argument(std::string("PartiallyLinearDiffeo: ") + which +
                                  " must not involve fiber variables");
  }

  // g(h(x)) for base-only g and a base-map h; fiber variables pass through.
  GradedPolynomial compose_base(const GradedPolynomial& g,
                                const std::vector<GradedPolynomial>& h) const {
    std::vector<GradedPolynomial> images;
    images.reserve(static_cast<std::size_t>(split_.total()));
    for (int i = 0; i < split_.n; ++i) images.push_back(h[static_cast<std::size_t>(i)]);
    for (int a = 0; a < split_.m; ++a)
      images.push_back(GradedPolynomial::variable(split_, split_.n + a));
    return g.substitute(images);
  }

  void check_inverse_product(const std::vector<std::vector<GradedPolynomial>>& lhs,
                             const std::vector<std::vector<GradedPolynomial>>& rhs) const {
    for (int r = 0; r < split_.m; ++r) {
      for (int c = 0; c < split_.m; ++c) {
        GradedPolynomial acc(split_);
        for (int k = 0; k < split_.m; ++k)
          acc += lhs[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] *
                 rhs[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        const GradedPolynomial expect =
            r == c ? GradedPolynomial::constant(split_, 1) : GradedPolynomial::zero(split_);
        if (acc != expect)
          throw std::invalid_argument(
              "PartiallyLinearDiffeo: declared fiber matrix inverse fails");
      }
    }
  }

  friend PAVectorField pushforward(const PartiallyLinearDiffeo& phi, const PAVectorField& v);

  VarSplit split_{1, 0};
  std::vector<GradedPolynomial> f_, f_inv_;
  std::vector<std::vector<GradedPolynomial>> a_, a_inv_;
};

// Pushforward (phi_* V)(z) = Dphi(phi^-1 z) . V(phi^-1 z), computed exactly.
// Partial linearity of phi keeps the result polynomial.
inline PAVectorField pushforward(const PartiallyLinearDiffeo& phi, const PAVectorField& v) {
  const VarSplit& s = phi.split();
  require_same_split(s, v.split, "pushforward");
  const int n = s.n, m = s.m;

  // xi = f_inv written in the output coordinates; w = A_inv(xi) u.
  std::vector<GradedPolynomial> images;
  images.reserve(static_cast<std::size_t>(s.total()));
  for (int i = 0; i < n; ++i) images.push_back(phi.f_inv_[static_cast<std::size_t>(i)]);
  std::vector<GradedPolynomial> w;
  for (int a = 0; a < m; ++a) {
    GradedPolynomial acc(s);
    for (int b = 0; b < m; ++b) {
      const GradedPolynomial ainv_at_xi =
          phi.compose_base(phi.a_inv_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                           phi.f_inv_);
      acc += ainv_at_xi * GradedPolynomial::variable(s, n + b);
    }
    w.push_back(acc);
  }
  for (int a = 0; a < m; ++a) images.push_back(w[static_cast<std::size_t>(a)]);

  std::vector<GradedPolynomial> v_at(static_cast<std::size_t>(s.total()),
                                     GradedPolynomial::zero(s));
  for (int k = 0; k < s.total(); ++k)
    v_at[static_cast<std::size_t>(k)] = v.components[static_cast<std::size_t>(k)].substitute(images);

  PAVectorField out = PAVectorField::zero(s, v.name.empty() ? "" : "push(" + v.name + ")");
  // Base block: Df(xi) applied to the base components of V.
  for (int i = 0; i < n; ++i) {
    GradedPolynomial acc(s);
    for (int j = 0; j < n; ++j) {
      const GradedPolynomial df =
          phi.compose_base(phi.f_[static_cast<std::size_t>(i)].partial(j), phi.f_inv_);
      acc += df * v_at[static_cast<std::size_t>(j)];
    }
    out.components[static_cast<std::size_t>(i)] = acc;
  }
  // Fiber block: d(A u)/dx applied to base components, plus A(xi) applied to
  // fiber components, all at (xi, w).
  for (int a = 0; a < m; ++a) {
    GradedPolynomial acc(s);
    for (int j = 0; j < n; ++j) {
      GradedPolynomial mixed(s);
      for (int b = 0; b < m; ++b) {
        const GradedPolynomial da =
            phi.compose_base(phi.a_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].partial(j),
                             phi.f_inv_);
        mixed += da * w[static_cast<std::size_t>(b)];
      }
      acc += mixed * v_at[static_cast<std::size_t>(j)];
    }
    for (int b = 0; b < m; ++b) {
      const GradedPolynomial a_at_xi =
          phi.compose_base(phi.a_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                           phi.f_inv_);
      acc += a_at_xi * v_at[static_cast<std::size_t>(n + b)];
    }
    out.components[static_cast<std::size_t>(n + a)] = acc;
  }
  return out;
}

}  // namespace involute
