#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "involute/distribution.hpp"
#include "involute/flow.hpp"

namespace involute {

// Chart of a candidate leaf: the map t -> phi^{t_1}_{V_1} o ... o
// phi^{t_r}_{V_r}(center) sampled on a uniform parameter grid. Points are
// stored row-major with the last parameter axis fastest.
struct LeafChart {
  VarSplit split{1, 0};
  std::vector<PAVectorField> fields;  // V_1..V_r; V_r flows first
  std::vector<double> center;
  std::vector<std::pair<double, double>> box;
  int resolution = 21;
  double h = 1e-3;
  double blowup_guard = 1e9;
  std::vector<std::vector<double>> grid;
  bool complete = false;
  bool rank_locally_constant = true;

  int dim() const { return static_cast<int>(fields.size()); }

  std::size_t grid_index(const std::vector<int>& multi) const {
    std::size_t idx = 0;
    for (const int i : multi) idx = idx * static_cast<std::size_t>(resolution) +
                                    static_cast<std::size_t>(i);
    return idx;
  }

  std::vector<double> param_at(const std::vector<int>& multi) const {
    std::vector<double> t(multi.size());
    for (std::size_t a = 0; a < multi.size(); ++a) {
      const auto [lo, hi] = box[a];
      t[a] = resolution == 1 ? lo
                             : lo + (hi - lo) * multi[a] / (resolution - 1);
    }
    return t;
  }
};

// Applies the flows of fields in reverse index order: the point for
// parameter t is phi^{t_1}_{V_1}( ... phi^{t_r}_{V_r}(z0) ).
inline OdeResult compose_flows(const std::vector<PAVectorField>& fields,
                               const std::vector<double>& z0, const std::vector<double>& t,
                               double h, double guard = 1e9) {
  if (fields.size() != t.size())
    throw std::invalid_argument("compose_flows: one time per field");
  OdeResult cur{z0, false, 0};
  for (std::size_t i = fields.size(); i-- > 0;) {
    FlowSpec spec{fields[i], h, guard};
    OdeResult next = flow(spec, cur.state, t[i]);
    next.steps += cur.steps;
    if (next.blew_up) return next;
    cur = std::move(next);
  }
  return cur;
}

// Fills a LeafChart grid from explicit fields, with no integrability
// checks. This is the raw construction; build_leaf wraps it with the
// closure and rank validation.
inline LeafChart compose_flow_grid(const std::vector<PAVectorField>& fields,
                                   const std::vector<double>& center,
                                   const std::vector<std::pair<double, double>>& box,
                                   int resolution, double h, double guard = 1e9) {
  if (fields.empty()) throw std::invalid_argument("compose_flow_grid: no fields");
  if (box.size() != fields.size())
    throw std::invalid_argument("compose_flow_grid: one parameter range per field");
  if (resolution < 2) throw std::invalid_argument("compose_flow_grid: resolution < 2");
  LeafChart chart;
  chart.split = fields.front().split;
  for (const auto& f : fields) require_same_split(chart.split, f.split, "compose_flow_grid");
  if (static_cast<int>(center.size()) != chart.split.total())
    throw std::invalid_argument("compose_flow_grid: center width mismatch");
  chart.fields = fields;
  chart.center = center;
  chart.box = box;
  chart.resolution = resolution;
  chart.h = h;
  chart.blowup_guard = guard;

  const int r = chart.dim();
  std::size_t total = 1;
  for (int a = 0; a < r; ++a) total *= static_cast<std::size_t>(resolution);
  chart.grid.reserve(total);
  std::vector<int> multi(static_cast<std::size_t>(r), 0);
  chart.complete = true;
  for (std::size_t flat = 0; flat < total; ++flat) {
    const auto t = chart.param_at(multi);
    OdeResult res = compose_flows(fields, center, t, h, guard);
    if (res.blew_up) {
      chart.complete = false;
      break;
    }
    chart.grid.push_back(std::move(res.state));
    for (int a = r - 1; a >= 0; --a) {
      if (++multi[static_cast<std::size_t>(a)] < resolution) break;
      multi[static_cast<std::size_t>(a)] = 0;
    }
  }
  return chart;
}

// Builds a leaf chart of a closed distribution through z0. The flowed
// fields are the pivot generators of the exact evaluation matrix at z0, in
// generator order; their count is the evaluation rank r, and the box must
// supply one parameter range per pivot.
inline LeafChart build_leaf(const Distribution& closure, const std::vector<Rational>& z0,
                            const std::vector<std::pair<double, double>>& box,
                            int resolution = 21, double h = 1e-3, double guard = 1e9) {
  if (closure.closure_state != ClosureState::closed)
    throw std::invalid_argument("build_leaf: distribution is not a completed closure");
  if (static_cast<int>(z0.size()) != closure.split.total())
    throw std::invalid_argument("build_leaf: center width mismatch");

  std::vector<std::size_t> pivots;
  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < closure.generators.size(); ++i) {
    std::vector<std::vector<Rational>> cand = rows;
    cand.push_back(closure.generators[i].field.evaluate(z0));
    if (exact_rank(cand) > static_cast<int>(rows.size())) {
      rows = std::move(cand);
      pivots.push_back(i);
    }
  }
  if (pivots.empty())
    throw std::invalid_argument("build_leaf: every generator vanishes at the center");
  if (box.size() != pivots.size())
    throw std::invalid_argument("build_leaf: need one parameter range per pivot field (rank " +
                                std::to_string(pivots.size()) + ")");

  std::vector<PAVectorField> fields;
  fields.reserve(pivots.size());
  for (const std::size_t i : pivots) fields.push_back(closure.generators[i].field);

  std::vector<double> center;
  center.reserve(z0.size());
  for (const auto& c : z0) center.push_back(c.to_double());

  LeafChart chart = compose_flow_grid(fields, center, box, resolution, h, guard);

  const int r = static_cast<int>(pivots.size());
  chart.rank_locally_constant = true;
  const Rational delta(1, 100);
  for (int j = 0; j < closure.split.total() && chart.rank_locally_constant; ++j) {
    for (const int sign : {1, -1}) {
      std::vector<Rational> p = z0;
      p[static_cast<std::size_t>(j)] += Rational(sign) * delta;
      if (evaluation_rank(closure, p) != r) {
        chart.rank_locally_constant = false;
        break;
      }
    }
  }
  return chart;
}

struct TangencyReport {
  std::vector<double> angles;  // per grid point, radians, in [0, pi/2]
  double max_angle = 0.0;
  double mean_angle = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t boundary_points = 0;    // tangent used one-sided differences
  std::size_t degenerate_points = 0;  // tangent frame lost numerical rank
};

namespace detail {

// Columns of an orthonormal basis for the column span of M, with the
// relative singular-value cut sigma >= rel * sigma_max.
inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m, double rel = 1e-8) {
  if (m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  long rank = 0;
  for (long i = 0; i < sv.size(); ++i)
    if (smax > 0 && sv[i] >= rel * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Sine of the largest principal angle between span(qa) and span(qb), both
// orthonormal: the norm of the component of qa outside span(qb). Exact
// containment gives exactly zero, unlike the cosine route.
inline double max_principal_angle(const Eigen::MatrixXd& qa, const Eigen::MatrixXd& qb) {
  if (qa.cols() == 0) return 0.0;
  if (qb.cols() == 0) return std::asin(1.0);
  const Eigen::MatrixXd resid = qa - qb * (qb.transpose() * qa);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  const double s = std::min(1.0, svd.singularValues()[0]);
  return std::asin(s);
}

}  // namespace detail

// Checks that the numerical tangent space of the chart lies inside the span
// of the distribution's generators at every grid point. Tangents come from
// central differences of the grid map (one-sided on the boundary).
inline TangencyReport verify_tangency(const LeafChart& chart, const Distribution& d,
                                      double tolerance, double sv_rel = 1e-8) {
  if (!chart.complete) throw std::invalid_argument("verify_tangency: chart grid incomplete");
  require_same_split(chart.split, d.split, "verify_tangency");
  const int r = chart.dim();
  const int res = chart.resolution;
  const int width = chart.split.total();

  TangencyReport rep;
  rep.tolerance = tolerance;
  rep.angles.reserve(chart.grid.size());

  std::vector<int> multi(static_cast<std::size_t>(r), 0);
  for (std::size_t flat = 0; flat < chart.grid.size(); ++flat) {
    Eigen::MatrixXd tangent(width, r);
    bool boundary = false;
    for (int a = 0; a < r; ++a) {
      const auto [lo, hi] = chart.box[static_cast<std::size_t>(a)];
      const double step = (hi - lo) / (res - 1);
      const int ia = multi[static_cast<std::size_t>(a)];
      const auto shifted = [&](int offset) -> const std::vector<double>& {
        std::vector<int> mi = multi;
        mi[static_cast<std::size_t>(a)] += offset;
        return chart.grid[chart.grid_index(mi)];
      };
      if (ia > 0 && ia + 1 < res) {
        const auto& pu = shifted(1);
        const auto& pd = shifted(-1);
        for (int c = 0; c < width; ++c)
          tangent(c, a) =
              (pu[static_cast<std::size_t>(c)] - pd[static_cast<std::size_t>(c)]) / (2 * step);
      } else {
        // One-sided estimate at the grid boundary, second order when a
        // further neighbor exists.
        boundary = true;
        const double sgn = ia == 0 ? 1.0 : -1.0;
        const auto& p0 = chart.grid[flat];
        const auto& p1 = shifted(ia == 0 ? 1 : -1);
        if (res >= 3) {
          const auto& p2 = shifted(ia == 0 ? 2 : -2);
          for (int c = 0; c < width; ++c) {
            const std::size_t cc = static_cast<std::size_t>(c);
            tangent(c, a) = sgn * (-3 * p0[cc] + 4 * p1[cc] - p2[cc]) / (2 * step);
          }
        } else {
          for (int c = 0; c < width; ++c) {
            const std::size_t cc = static_cast<std::size_t>(c);
            tangent(c, a) = sgn * (p1[cc] - p0[cc]) / step;
          }
        }
      }
    }
    if (boundary) ++rep.boundary_points;

    const Eigen::MatrixXd qt = detail::orthonormal_span(tangent, sv_rel);
    if (qt.cols() < r) ++rep.degenerate_points;

    Eigen::MatrixXd span(width, static_cast<long>(d.generators.size()));
    for (std::size_t gi = 0; gi < d.generators.size(); ++gi)
      for (int c = 0; c < width; ++c)
        span(c, static_cast<long>(gi)) =
            d.generators[gi].field.components[static_cast<std::size_t>(c)].eval_double(
                chart.grid[flat]);
    const Eigen::MatrixXd qe = detail::orthonormal_span(span, sv_rel);

    const double angle = detail::max_principal_angle(qt, qe);
    rep.angles.push_back(angle);
    rep.max_angle = std::max(rep.max_angle, angle);
    rep.mean_angle += angle;

    for (int a = r - 1; a >= 0; --a) {
      if (++multi[static_cast<std::size_t>(a)] < res) break;
      multi[static_cast<std::size_t>(a)] = 0;
    }
  }
  if (!rep.angles.empty()) rep.mean_angle /= static_cast<double>(rep.angles.size());
  rep.pass = rep.max_angle <= tolerance;
  return rep;
}

}  // namespace involute
