#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "involute/polynomial.hpp"
#include "involute/vector_field.hpp"

namespace involute {

// One Christoffel symbol Gamma^k_{ij}. Indices are 1-based to match the
// variable naming x1..xn; the value is a polynomial in the base variables.
struct ChristoffelEntry {
  int k = 1;
  int i = 1;
  int j = 1;
  GradedPolynomial value;
};

// A coordinate chart of an affine manifold: a torsion-free connection given
// by polynomial Christoffel symbols, optionally with a symmetric polynomial
// metric. Symbols and metric entries live on the base-only split (dim, 0).
// Entries omitted at construction are zero; a symbol given for (k,i,j) is
// mirrored to (k,j,i), and giving both with different values is an error.
class AffineChart {
 public:
  explicit AffineChart(int dim, const std::vector<ChristoffelEntry>& entries = {},
                       std::optional<std::vector<std::vector<GradedPolynomial>>>
                           metric = std::nullopt)
      : dim_(dim), split_(dim, 0) {
    if (dim < 1) throw std::invalid_argument("AffineChart: dim must be positive");
    const std::size_t n = static_cast<std::size_t>(dim);
    gamma_.assign(n * n * n, GradedPolynomial::zero(split_));
    std::vector<bool> given(n * n * n, false);
    for (const auto& e : entries) {
      check_index(e.k, "k");
      check_index(e.i, "i");
      check_index(e.j, "j");
      require_same_split(split_, e.value.split(), "AffineChart gamma");
      const std::size_t a = slot(e.k, e.i, e.j), b = slot(e.k, e.j, e.i);
      if (given[a] && !(gamma_[a] - e.value).is_zero())
        throw std::invalid_argument(
            "AffineChart: conflicting values for Gamma^" + std::to_string(e.k) +
            "_{" + std::to_string(e.i) + "," + std::to_string(e.j) + "}");
      gamma_[a] = e.value;
      gamma_[b] = e.value;
      given[a] = given[b] = true;
    }
    if (metric) {
      if (metric->size() != n)
        throw std::invalid_argument("AffineChart: metric must be dim x dim");
      for (const auto& row : *metric) {
        if (row.size() != n)
          throw std::invalid_argument("AffineChart: metric must be dim x dim");
        for (const auto& g : row) require_same_split(split_, g.split(), "AffineChart metric");
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (!((*metric)[i][j] - (*metric)[j][i]).is_zero())
            throw std::invalid_argument("AffineChart: metric is not symmetric");
      metric_ = std::move(metric);
    }
  }

  static AffineChart flat(int dim) { return AffineChart(dim); }

  int dim() const { return dim_; }
  const VarSplit& split() const { return split_; }

  const GradedPolynomial& gamma(int k, int i, int j) const {
    check_index(k, "k");
    check_index(i, "i");
    check_index(j, "j");
    return gamma_[slot(k, i, j)];
  }

  bool is_flat() const {
    for (const auto& g : gamma_)
      if (!g.is_zero()) return false;
    return true;
  }

  bool has_metric() const { return metric_.has_value(); }

  const GradedPolynomial& metric(int i, int j) const {
    if (!metric_) throw std::logic_error("AffineChart: no metric");
    check_index(i, "i");
    check_index(j, "j");
    return (*metric_)[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  }

 private:
  void check_index(int v, const char* which) const {
    if (v < 1 || v > dim_)
      throw std::out_of_range("AffineChart: index " + std::string(which) + "=" +
                              std::to_string(v) + " outside 1.." + std::to_string(dim_));
  }
  std::size_t slot(int k, int i, int j) const {
    const std::size_t n = static_cast<std::size_t>(dim_);
    return (static_cast<std::size_t>(k - 1) * n + static_cast<std::size_t>(i - 1)) * n +
           static_cast<std::size_t>(j - 1);
  }

  int dim_;
  VarSplit split_;
  std::vector<GradedPolynomial> gamma_;
  std::optional<std::vector<std::vector<GradedPolynomial>>> metric_;
};

// Geodesic spray on the tangent chart, split (n, n) with fiber variables as
// velocities: xdot_k = u_k, udot_k = -sum_{ij} Gamma^k_{ij}(x) u_i u_j. The
// sign realizes the geodesic equation xddot = -Gamma(xdot, xdot); curves of
// the opposite convention are recovered by negating Gamma.
inline PAVectorField geodesic_spray(const AffineChart& chart) {
  const int n = chart.dim();
  const VarSplit s(n, n);
  std::vector<int> base_map(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) base_map[static_cast<std::size_t>(i)] = i;

  std::vector<GradedPolynomial> comps;
  comps.reserve(2 * static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k)
    comps.push_back(GradedPolynomial::variable(s, n + k - 1));
  for (int k = 1; k <= n; ++k) {
    GradedPolynomial acc = GradedPolynomial::zero(s);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const GradedPolynomial& g = chart.gamma(k, i, j);
        if (g.is_zero()) continue;
        acc = acc - g.embed(s, base_map) * GradedPolynomial::variable(s, n + i - 1) *
                        GradedPolynomial::variable(s, n + j - 1);
      }
    comps.push_back(std::move(acc));
  }
  return PAVectorField(s, std::move(comps), "geodesic-spray");
}

}  // namespace involute
