#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "involute/module_element.hpp"
#include "involute/polynomial.hpp"

namespace involute {

// Polynomial vector field on R^n x R^m, written against the split
// coordinates: components 0..n-1 multiply d/dx_i, components n..n+m-1
// multiply d/du_a. Restricting the base point gives a field polynomial in
// the fiber, which is the class the whole toolkit works in.
struct PAVectorField {
  VarSplit split{1, 0};
  std::vector<GradedPolynomial> components;
  std::string name;

  PAVectorField() = default;
  PAVectorField(const VarSplit& s, std::vector<GradedPolynomial> comps,
                std::string field_name = "")
      : split(s), components(std::move(comps)), name(std::move(field_name)) {
    if (static_cast<int>(components.size()) != split.total())
      throw std::invalid_argument("PAVectorField: need one component per coordinate");
    for (const auto& c : components) require_same_split(split, c.split(), "PAVectorField");
  }

  static PAVectorField zero(const VarSplit& s, std::string name = "") {
    std::vector<GradedPolynomial> comps(static_cast<std::size_t>(s.total()),
                                        GradedPolynomial::zero(s));
    return PAVectorField(s, std::move(comps), std::move(name));
  }

  // Coordinate field d/dz_idx.
  static PAVectorField coordinate(const VarSplit& s, int idx, std::string name = "") {
    PAVectorField v = zero(s, std::move(name));
    v.components.at(static_cast<std::size_t>(idx)) = GradedPolynomial::constant(s, 1);
    return v;
  }

  bool is_zero() const {
    for (const auto& c : components)
      if (!c.is_zero()) return false;
    return true;
  }

  std::vector<Rational> evaluate(const std::vector<Rational>& point) const {
    std::vector<Rational> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.eval(point));
    return out;
  }

  // Largest fiber degree over all components; the zero field has none.
  std::optional<std::uint64_t> fiber_degree() const {
    std::optional<std::uint64_t> best;
    for (const auto& c : components) {
      const auto d = c.fiber_degree();
      if (d && (!best || *d > *best)) best = d;
    }
    return best;
  }

  FreeModuleElement as_module_element() const { return FreeModuleElement(components); }

  PAVectorField& operator+=(const PAVectorField& o) {
    require_same_split(split, o.split, "PAVectorField::operator+=");
    for (std::size_t i = 0; i < components.size(); ++i) components[i] += o.components[i];
    return *this;
  }
  friend PAVectorField operator+(PAVectorField a, const PAVectorField& b) { return a += b; }

  PAVectorField scaled(const GradedPolynomial& p) const {
    PAVectorField r = *this;
    for (auto& c : r.components) c = c * p;
    return r;
  }

  bool operator==(const PAVectorField& o) const {
    return split == o.split && components == o.components;
  }
};

// Lie bracket with the convention [V, W] = JW . V - JV . W, where JV is the
// Jacobian of the component vector in all n + m coordinates. Sanity anchor:
// [d/dx1, d/du1 + x1 d/du2] = d/du2.
inline PAVectorField bracket(const PAVectorField& v, const PAVectorField& w) {
  require_same_split(v.split, w.split, "bracket");
  const int width = v.split.total();
  PAVectorField out = PAVectorField::zero(v.split);
  for (int k = 0; k < width; ++k) {
    GradedPolynomial acc(v.split);
    for (int j = 0; j < width; ++j) {
      acc += w.components[static_cast<std::size_t>(k)].partial(j) *
             v.components[static_cast<std::size_t>(j)];
      acc -= v.components[static_cast<std::size_t>(k)].partial(j) *
             w.components[static_cast<std::size_t>(j)];
    }
    out.components[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

}  // namespace involute
