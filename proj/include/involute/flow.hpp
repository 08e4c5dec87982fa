#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "involute/vector_field.hpp"

namespace involute {

// Right-hand side of a first-order system: dy = f(t, y).
using OdeRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

struct OdeResult {
  std::vector<double> state;
  bool blew_up = false;
  std::size_t steps = 0;
};

namespace detail {

inline bool out_of_guard(const std::vector<double>& y, double guard) {
  for (const double v : y)
    if (!std::isfinite(v) || std::abs(v) > guard) return true;
  return false;
}

}  // namespace detail

// Classic fixed-step fourth-order Runge-Kutta from t0 to t1; the last
// partial step is shortened to land on t1 exactly. Aborts when any state
// component leaves the overflow guard.
inline OdeResult rk4_integrate(const OdeRhs& rhs, std::vector<double> y0, double t0,
                               double t1, double h, double guard = 1e9,
                               const std::function<void(double, const std::vector<double>&)>&
                                   on_sample = nullptr) {
  if (!(h > 0)) throw std::invalid_argument("rk4_integrate: step must be positive");
  OdeResult out;
  const std::size_t dim = y0.size();
  std::vector<double> y = std::move(y0);
  double t = t0;
  if (on_sample) on_sample(t, y);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  auto axpy = [&](const std::vector<double>& base, double a, const std::vector<double>& k) {
    std::vector<double> r(dim);
    for (std::size_t i = 0; i < dim; ++i) r[i] = base[i] + a * k[i];
    return r;
  };
  while (dir * (t1 - t) > 0) {
    double step = dir * h;
    if (dir * (t1 - (t + step)) < 0) step = t1 - t;
    const auto k1 = rhs(t, y);
    const auto k2 = rhs(t + step / 2, axpy(y, step / 2, k1));
    const auto k3 = rhs(t + step / 2, axpy(y, step / 2, k2));
    const auto k4 = rhs(t + step, axpy(y, step, k3));
    for (std::size_t i = 0; i < dim; ++i)
      y[i] += step / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t += step;
    ++out.steps;
    if (detail::out_of_guard(y, guard)) {
      out.state = std::move(y);
      out.blew_up = true;
      return out;
    }
    if (on_sample) on_sample(t, y);
  }
  out.state = std::move(y);
  return out;
}

struct FlowSpec {
  PAVectorField field;
  double h = 1e-3;
  double blowup_guard = 1e9;
};

inline OdeRhs field_rhs(const PAVectorField& v) {
  return [&v](double, const std::vector<double>& z) {
    std::vector<double> dz;
    dz.reserve(v.components.size());
    for (const auto& c : v.components) dz.push_back(c.eval_double(z));
    return dz;
  };
}

// Flow of an autonomous partially algebraic field for time t (may be
// negative).
inline OdeResult flow(const FlowSpec& spec, const std::vector<double>& z0, double t) {
  if (static_cast<int>(z0.size()) != spec.field.split.total())
    throw std::invalid_argument("flow: state width mismatch");
  if (t == 0.0) return {z0, false, 0};
  // The lambda in field_rhs captures by reference; spec outlives the call.
  return rk4_integrate(field_rhs(spec.field), z0, 0.0, t, spec.h, spec.blowup_guard);
}

}  // namespace involute
