#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "involute/distribution.hpp"
#include "involute/flow.hpp"
#include "involute/leaf.hpp"

namespace involute {

struct InvarianceReport {
  std::vector<double> times;
  std::vector<double> angles;  // largest principal angle per sample
  double max_angle = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool blew_up = false;
};

// Transports an orthonormal frame of the distribution's span at z0 along
// the flow of one generator by integrating the linearized equation
// W' = J_V(z) W next to z' = V(z), and compares the transported span with
// the distribution's span at the moved point. For a flow-invariant
// distribution the angles stay at zero.
inline InvarianceReport flow_invariance_check(const Distribution& d, std::size_t field_index,
                                              const std::vector<double>& z0, double t_max,
                                              int samples, double tolerance = 1e-6,
                                              double h = 1e-3, double guard = 1e9,
                                              double sv_rel = 1e-8) {
  if (field_index >= d.generators.size())
    throw std::invalid_argument("flow_invariance_check: generator index out of range");
  if (samples < 1) throw std::invalid_argument("flow_invariance_check: samples < 1");
  const int width = d.split.total();
  if (static_cast<int>(z0.size()) != width)
    throw std::invalid_argument("flow_invariance_check: state width mismatch");
  const PAVectorField& v = d.generators[field_index].field;

  const auto span_at = [&](const std::vector<double>& z) {
    Eigen::MatrixXd span(width, static_cast<long>(d.generators.size()));
    for (std::size_t gi = 0; gi < d.generators.size(); ++gi)
      for (int c = 0; c < width; ++c)
        span(c, static_cast<long>(gi)) =
            d.generators[gi].field.components[static_cast<std::size_t>(c)].eval_double(z);
    return detail::orthonormal_span(span, sv_rel);
  };

  const Eigen::MatrixXd frame0 = span_at(z0);
  const long r = frame0.cols();

  // Jacobian entries of the transported field, J[k][j] = d V_k / d z_j.
  std::vector<std::vector<GradedPolynomial>> jac;
  jac.reserve(static_cast<std::size_t>(width));
  for (int k = 0; k < width; ++k) {
    std::vector<GradedPolynomial> row;
    row.reserve(static_cast<std::size_t>(width));
    for (int j = 0; j < width; ++j)
      row.push_back(v.components[static_cast<std::size_t>(k)].partial(j));
    jac.push_back(std::move(row));
  }

  // State layout: z, then W column-major (r columns of width entries).
  const std::size_t dim = static_cast<std::size_t>(width) * (1 + static_cast<std::size_t>(r));
  std::vector<double> y(dim);
  for (int c = 0; c < width; ++c) y[static_cast<std::size_t>(c)] = z0[static_cast<std::size_t>(c)];
  for (long col = 0; col < r; ++col)
    for (int c = 0; c < width; ++c)
      y[static_cast<std::size_t>(width) * (1 + static_cast<std::size_t>(col)) +
        static_cast<std::size_t>(c)] = frame0(c, col);

  const OdeRhs rhs = [&](double, const std::vector<double>& state) {
    const std::vector<double> z(state.begin(), state.begin() + width);
    std::vector<double> dy(state.size(), 0.0);
    for (int c = 0; c < width; ++c)
      dy[static_cast<std::size_t>(c)] = v.components[static_cast<std::size_t>(c)].eval_double(z);
    std::vector<std::vector<double>> j(static_cast<std::size_t>(width),
                                       std::vector<double>(static_cast<std::size_t>(width)));
    for (int k = 0; k < width; ++k)
      for (int jj = 0; jj < width; ++jj)
        j[static_cast<std::size_t>(k)][static_cast<std::size_t>(jj)] =
            jac[static_cast<std::size_t>(k)][static_cast<std::size_t>(jj)].eval_double(z);
    for (long col = 0; col < r; ++col) {
      const std::size_t off =
          static_cast<std::size_t>(width) * (1 + static_cast<std::size_t>(col));
      for (int k = 0; k < width; ++k) {
        double acc = 0.0;
        for (int jj = 0; jj < width; ++jj)
          acc += j[static_cast<std::size_t>(k)][static_cast<std::size_t>(jj)] *
                 state[off + static_cast<std::size_t>(jj)];
        dy[off + static_cast<std::size_t>(k)] = acc;
      }
    }
    return dy;
  };

  InvarianceReport rep;
  rep.tolerance = tolerance;
  double t_prev = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_max * i / samples;
    if (i > 0) {
      OdeResult res = rk4_integrate(rhs, y, t_prev, t, h, guard);
      if (res.blew_up) {
        rep.blew_up = true;
        rep.pass = false;
        return rep;
      }
      y = std::move(res.state);
      t_prev = t;
    }
    const std::vector<double> z(y.begin(), y.begin() + width);
    Eigen::MatrixXd w(width, r);
    for (long col = 0; col < r; ++col)
      for (int c = 0; c < width; ++c)
        w(c, col) = y[static_cast<std::size_t>(width) * (1 + static_cast<std::size_t>(col)) +
                      static_cast<std::size_t>(c)];
    const double angle =
        detail::max_principal_angle(detail::orthonormal_span(w, sv_rel), span_at(z));
    rep.times.push_back(t);
    rep.angles.push_back(angle);
    rep.max_angle = std::max(rep.max_angle, angle);
  }
  rep.pass = rep.max_angle <= tolerance;
  return rep;
}

struct ResolventReport {
  std::vector<double> times;
  std::vector<int> ranks;
  // Smallest ratio between the last kept and first discarded singular value
  // over all samples; infinity when no value was ever discarded.
  double min_gap_ratio = std::numeric_limits<double>::infinity();
  double sv_threshold_rel = 1e-8;
  bool rank_constant = false;
  bool pass = false;
  bool blew_up = false;
  std::vector<std::vector<double>> final_state;  // X(t_max)
};

// Integrates the linear matrix equation X' = A(t) X and reports the
// numerical rank of X at sampled times. Entries of A are polynomials in a
// single base variable (the time).
inline ResolventReport resolvent_rank_check(
    const std::vector<std::vector<GradedPolynomial>>& a,
    const std::vector<std::vector<double>>& x0, double t_max, double h, int samples = 32,
    double sv_rel = 1e-8, double guard = 1e9) {
  const std::size_t k = a.size();
  if (k == 0) throw std::invalid_argument("resolvent_rank_check: empty matrix");
  for (const auto& row : a)
    if (row.size() != k) throw std::invalid_argument("resolvent_rank_check: A must be square");
  const VarSplit& ts = a.front().front().split();
  if (ts.total() != 1)
    throw std::invalid_argument("resolvent_rank_check: A entries must be univariate in time");
  for (const auto& row : a)
    for (const auto& e : row) require_same_split(ts, e.split(), "resolvent_rank_check");
  if (x0.size() != k)
    throw std::invalid_argument("resolvent_rank_check: X0 must have one row per A row");
  const std::size_t n = x0.front().size();
  for (const auto& row : x0)
    if (row.size() != n) throw std::invalid_argument("resolvent_rank_check: ragged X0");
  if (samples < 1) throw std::invalid_argument("resolvent_rank_check: samples < 1");

  // Row-major flattening of X.
  std::vector<double> y;
  y.reserve(k * n);
  for (const auto& row : x0) y.insert(y.end(), row.begin(), row.end());

  const OdeRhs rhs = [&](double t, const std::vector<double>& state) {
    std::vector<std::vector<double>> at(k, std::vector<double>(k));
    const std::vector<double> tp{t};
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) at[i][j] = a[i][j].eval_double(tp);
    std::vector<double> dy(state.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < n; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += at[i][j] * state[j * n + c];
        dy[i * n + c] = acc;
      }
    return dy;
  };

  ResolventReport rep;
  rep.sv_threshold_rel = sv_rel;
  const auto record = [&](double t, const std::vector<double>& state) {
    Eigen::MatrixXd x(static_cast<long>(k), static_cast<long>(n));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < n; ++c)
        x(static_cast<long>(i), static_cast<long>(c)) = state[i * n + c];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int rank = 0;
    for (long i = 0; i < sv.size(); ++i)
      if (smax > 0 && sv[i] >= sv_rel * smax) ++rank;
    if (rank > 0 && rank < sv.size()) {
      const double kept = sv[rank - 1];
      const double discarded = sv[rank];
      const double ratio = discarded > 0 ? kept / discarded
                                         : std::numeric_limits<double>::infinity();
      rep.min_gap_ratio = std::min(rep.min_gap_ratio, ratio);
    }
    rep.times.push_back(t);
    rep.ranks.push_back(rank);
  };

  record(0.0, y);
  double t_prev = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = t_max * i / samples;
    OdeResult res = rk4_integrate(rhs, y, t_prev, t, h, guard);
    if (res.blew_up) {
      rep.blew_up = true;
      rep.pass = false;
      return rep;
    }
    y = std::move(res.state);
    t_prev = t;
    record(t, y);
  }
  rep.rank_constant = true;
  for (const int r : rep.ranks)
    if (r != rep.ranks.front()) rep.rank_constant = false;
  rep.pass = rep.rank_constant;
  rep.final_state.assign(k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < n; ++c) rep.final_state[i][c] = y[i * n + c];
  return rep;
}

}  // namespace involute
