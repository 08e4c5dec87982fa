#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "involute/affine_chart.hpp"
#include "involute/grassmann.hpp"
#include "involute/isometry_scan.hpp"
#include "involute/parse.hpp"

using involute::AffineChart;
using involute::bracket;
using involute::build_constraints;
using involute::ChristoffelEntry;
using involute::ClosureState;
using involute::ConstraintOptions;
using involute::dinfty;
using involute::Distribution;
using involute::FiberVerdict;
using involute::FlowSpec;
using involute::FwConstructible;
using involute::FwSet;
using involute::gauss_lift_residual;
using involute::geodesic_spray;
using involute::GradedPolynomial;
using involute::GrStarChart;
using involute::involutive_closure;
using involute::isometry_scan;
using involute::PairSample;
using involute::parse_poly;
using involute::Rational;
using involute::rk4_integrate;
using involute::ScanOptions;
using involute::tautological_field;
using involute::tautological_generators;
using involute::validate_tautological_field;
using involute::VarSplit;

namespace {

GradedPolynomial base_poly(const std::string& text, int n) {
  return parse_poly(text, VarSplit(n, 0));
}

std::vector<std::vector<GradedPolynomial>> euclidean_metric(int n) {
  const VarSplit s(n, 0);
  std::vector<std::vector<GradedPolynomial>> g;
  for (int i = 0; i < n; ++i) {
    std::vector<GradedPolynomial> row;
    for (int j = 0; j < n; ++j)
      row.push_back(GradedPolynomial::constant(s, i == j ? 1 : 0));
    g.push_back(std::move(row));
  }
  return g;
}

AffineChart curved_two() {
  return AffineChart(2, {{1, 1, 2, base_poly("x2", 2)},
                         {2, 2, 2, base_poly("x1*x2", 2)},
                         {2, 1, 1, base_poly("1/2", 2)}});
}

}  // namespace

TEST_CASE("affine chart construction and symmetry", "[geometry]") {
  CHECK(AffineChart::flat(3).is_flat());

  const AffineChart c(2, {{1, 1, 2, base_poly("x2", 2)}});
  CHECK((c.gamma(1, 2, 1) - base_poly("x2", 2)).is_zero());
  CHECK(c.gamma(1, 1, 1).is_zero());
  CHECK_FALSE(c.is_flat());

  CHECK_THROWS_AS(AffineChart(2, {{1, 1, 2, base_poly("x1", 2)},
                                  {1, 2, 1, base_poly("x2", 2)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(AffineChart(2, {{3, 1, 1, base_poly("x1", 2)}}), std::out_of_range);
  CHECK_THROWS_AS(AffineChart(2, {{1, 1, 1, base_poly("x1", 1)}}), std::invalid_argument);
  CHECK_THROWS_AS(AffineChart(0), std::invalid_argument);

  auto bad_metric = euclidean_metric(2);
  bad_metric[0][1] = base_poly("x1", 2);
  CHECK_THROWS_AS(AffineChart(2, {}, bad_metric), std::invalid_argument);

  auto good_metric = euclidean_metric(2);
  good_metric[0][1] = base_poly("x1", 2);
  good_metric[1][0] = base_poly("x1", 2);
  const AffineChart m(2, {}, good_metric);
  REQUIRE(m.has_metric());
  CHECK((m.metric(1, 2) - base_poly("x1", 2)).is_zero());
  CHECK_FALSE(AffineChart::flat(2).has_metric());
}

TEST_CASE("geodesic spray anchors", "[geometry]") {
  const auto flat = geodesic_spray(AffineChart::flat(2));
  const VarSplit s(2, 2);
  CHECK((flat.components[0] - parse_poly("u1", s)).is_zero());
  CHECK((flat.components[1] - parse_poly("u2", s)).is_zero());
  CHECK(flat.components[2].is_zero());
  CHECK(flat.components[3].is_zero());

  const auto r = involute::flow(FlowSpec{flat, 1e-3, 1e9}, {0.5, -1.0, 2.0, 0.25}, 0.8);
  REQUIRE_FALSE(r.blew_up);
  CHECK(r.state[0] == Catch::Approx(0.5 + 0.8 * 2.0).margin(1e-12));
  CHECK(r.state[1] == Catch::Approx(-1.0 + 0.8 * 0.25).margin(1e-12));
  CHECK(r.state[2] == 2.0);

  const auto lin = geodesic_spray(AffineChart(1, {{1, 1, 1, base_poly("x1", 1)}}));
  const VarSplit s1(1, 1);
  CHECK((lin.components[0] - parse_poly("u1", s1)).is_zero());
  CHECK((lin.components[1] - parse_poly("-x1*u1^2", s1)).is_zero());
  REQUIRE(lin.fiber_degree().has_value());
  CHECK(*lin.fiber_degree() == 2);
}

TEST_CASE("spray curves satisfy the geodesic equation", "[geometry]") {
  const AffineChart chart(1, {{1, 1, 1, base_poly("x1", 1)}});
  const auto spray = geodesic_spray(chart);
  const double h = 1e-3;
  std::vector<std::vector<double>> track;
  const auto rhs = involute::field_rhs(spray);
  const auto run = rk4_integrate(rhs, {0.0, 1.0}, 0.0, 0.5, h, 1e9,
                                 [&](double, const std::vector<double>& z) {
                                   track.push_back(z);
                                 });
  REQUIRE_FALSE(run.blew_up);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < track.size(); ++k) {
    const double xdd = (track[k + 1][0] - 2.0 * track[k][0] + track[k - 1][0]) / (h * h);
    const double xd = (track[k + 1][0] - track[k - 1][0]) / (2.0 * h);
    worst = std::max(worst, std::abs(xdd + track[k][0] * xd * xd));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("tautological field in flat charts", "[geometry]") {
  const GrStarChart g(AffineChart::flat(2), AffineChart::flat(2));
  const auto gens = tautological_generators(g);
  REQUIRE(gens.size() == 2);
  for (int c = 1; c <= 2; ++c) {
    const auto& v = gens[static_cast<std::size_t>(c - 1)];
    CHECK((v.components[0] - GradedPolynomial::constant(g.split, c == 1 ? 1 : 0)).is_zero());
    CHECK((v.components[1] - GradedPolynomial::constant(g.split, c == 2 ? 1 : 0)).is_zero());
    CHECK((v.components[2] - g.u_poly(1, c)).is_zero());
    CHECK((v.components[3] - g.u_poly(2, c)).is_zero());
    for (int r = 4; r < 8; ++r) CHECK(v.components[static_cast<std::size_t>(r)].is_zero());
  }
  CHECK(bracket(gens[0], gens[1]).is_zero());

  const Distribution cl = involutive_closure(tautological_field(g));
  CHECK(cl.closure_state == ClosureState::closed);
  CHECK(cl.generators.size() == 2);
  CHECK(dinfty(cl).equations.empty());
}

TEST_CASE("plane field formula passes its oracles on curved charts", "[geometry]") {
  const GrStarChart same(curved_two(), curved_two());
  const auto rep = validate_tautological_field(same);
  CHECK(rep.flat_ok);
  CHECK(rep.identity_ok);
  CHECK(rep.geodesic_ok);
  CHECK(rep.geodesic_residual <= 1e-6);
  CHECK(rep.endpoint_gap <= 1e-6);
  CHECK(rep.pass);

  const GrStarChart mixed(AffineChart(1, {{1, 1, 1, base_poly("x1^2", 1)}}),
                          AffineChart(1, {{1, 1, 1, base_poly("2*x1", 1)}}));
  const auto rep2 = validate_tautological_field(mixed);
  CHECK(rep2.pass);
  CHECK(rep2.geodesic_residual <= 1e-6);
}

TEST_CASE("gauss lift residual separates affine from curved maps", "[geometry]") {
  const GrStarChart flat(AffineChart::flat(2), AffineChart::flat(2));
  const std::vector<std::vector<Rational>> samples{{Rational(1), Rational(1)},
                                                   {Rational(0), Rational(3)},
                                                   {Rational(-2), Rational(1, 2)}};

  const std::vector<GradedPolynomial> affine{base_poly("2*x1 + 3", 2),
                                             base_poly("x1 + x2 - 1", 2)};
  const auto ra = gauss_lift_residual(flat, affine, samples);
  CHECK(ra.zero);
  CHECK(ra.max_residual == Rational(0));

  const std::vector<GradedPolynomial> curved{base_poly("x1^2", 2), base_poly("x2", 2)};
  const auto rc = gauss_lift_residual(flat, curved, samples);
  CHECK_FALSE(rc.zero);
  CHECK(rc.max_residual == Rational(2));

  const GrStarChart same(curved_two(), curved_two());
  const std::vector<GradedPolynomial> ident{base_poly("x1", 2), base_poly("x2", 2)};
  CHECK(gauss_lift_residual(same, ident, samples).zero);

  CHECK_THROWS_AS(gauss_lift_residual(flat, ident, {{Rational(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(gauss_lift_residual(flat, {base_poly("x1", 2)}, samples),
                  std::invalid_argument);
}

TEST_CASE("constraint packs", "[geometry]") {
  const GrStarChart plain(AffineChart::flat(2), AffineChart::flat(2));
  const auto pack = build_constraints(plain);
  REQUIRE(pack.invertibility.negative.size() == 1);
  CHECK((pack.invertibility.negative[0] - parse_poly("u1*u4 - u2*u3", plain.split)).is_zero());
  CHECK(pack.invertibility.positive.equations.empty());
  CHECK_FALSE(pack.isotropy.has_value());
  CHECK(pack.extra.empty());
  CHECK_THROWS_AS(build_constraints(plain, {true, false, {}}), std::invalid_argument);

  const AffineChart withg(2, {}, euclidean_metric(2));
  const GrStarChart gpair(withg, withg);
  ConstraintOptions co;
  co.isotropy = true;
  co.unimodular = true;
  const auto mp = build_constraints(gpair, co);
  REQUIRE(mp.isotropy.has_value());
  REQUIRE(mp.isotropy->equations.size() == 4);
  CHECK((mp.isotropy->equations[0] - parse_poly("u1^2 + u3^2 - 1", gpair.split)).is_zero());
  CHECK((mp.isotropy->equations[1] - parse_poly("u1*u2 + u3*u4", gpair.split)).is_zero());
  REQUIRE(mp.extra.size() == 1);
  CHECK((mp.extra[0].equations[0] - parse_poly("u1*u4 - u2*u3 - 1", gpair.split)).is_zero());
}

TEST_CASE("flat scans connect every sampled pair through identity witnesses",
          "[geometry][scan]") {
  const GrStarChart g(AffineChart::flat(2), AffineChart::flat(2));
  const auto pack = build_constraints(g);
  const std::vector<PairSample> pairs{
      {{Rational(0), Rational(0)}, {Rational(1), Rational(-1)}},
      {{Rational(0), Rational(0)}, {Rational(3, 2), Rational(2)}},
      {{Rational(1), Rational(-1)}, {Rational(3, 2), Rational(2)}}};

  const auto rep = isometry_scan(g, pack, pairs);
  CHECK(rep.validation.pass);
  CHECK(rep.closure_state == ClosureState::closed);
  CHECK(rep.generator_count == 2);
  CHECK(rep.equation_count == 0);
  CHECK_FALSE(rep.outer_approximation);
  CHECK(rep.count_nonempty == 3);
  for (const auto& pr : rep.pairs) {
    REQUIRE(pr.probe.verdict == FiberVerdict::nonempty);
    REQUIRE(pr.probe.witness.has_value());
    REQUIRE(pr.probe.witness->is_exact);
    const std::vector<Rational> id{Rational(1), Rational(0), Rational(0), Rational(1)};
    CHECK(pr.probe.witness->exact == id);
    CHECK(pr.probe.note == "preferred witness");
  }
  REQUIRE(rep.points.size() == 3);
  REQUIRE(rep.orbit_classes.size() == 1);
  CHECK(rep.orbit_classes[0] == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("isotropic scans return exact orthogonal witnesses", "[geometry][scan]") {
  const AffineChart withg(2, {}, euclidean_metric(2));
  const GrStarChart g(withg, withg);
  ConstraintOptions co;
  co.isotropy = true;
  const auto pack = build_constraints(g, co);
  const std::vector<PairSample> pairs{
      {{Rational(0), Rational(0)}, {Rational(2), Rational(1)}}};

  const auto rep = isometry_scan(g, pack, pairs);
  REQUIRE(rep.count_nonempty == 1);
  const auto& w = rep.pairs[0].probe.witness;
  REQUIRE(w.has_value());
  REQUIRE(w->is_exact);
  // U^T U = I holds exactly for the returned witness.
  const auto& u = w->exact;
  CHECK(u[0] * u[0] + u[2] * u[2] == Rational(1));
  CHECK(u[1] * u[1] + u[3] * u[3] == Rational(1));
  CHECK(u[0] * u[1] + u[2] * u[3] == Rational(0));

  // A user-preferred rotation takes priority over the identity fallback.
  ScanOptions so;
  so.probe.preferred = {{Rational(0), Rational(-1), Rational(1), Rational(0)}};
  const auto rot = isometry_scan(g, pack, pairs, so);
  REQUIRE(rot.count_nonempty == 1);
  REQUIRE(rot.pairs[0].probe.witness->is_exact);
  const auto& ru = rot.pairs[0].probe.witness->exact;
  CHECK(ru == so.probe.preferred[0]);

  // Scan symmetry: the inverse witness solves the swapped pair.
  const Rational det = ru[0] * ru[3] - ru[1] * ru[2];
  REQUIRE_FALSE(det.is_zero());
  const std::vector<Rational> inv{ru[3] / det, -ru[1] / det, -ru[2] / det, ru[0] / det};
  std::vector<Rational> swapped = pairs[0].y;
  swapped.insert(swapped.end(), pairs[0].x.begin(), pairs[0].x.end());
  std::vector<Rational> full = swapped;
  full.insert(full.end(), inv.begin(), inv.end());
  const FwConstructible back(FwSet(g.split, pack.isotropy->equations),
                             pack.invertibility.negative);
  CHECK(back.member(full));
}

TEST_CASE("embedded scans lift exact witnesses across the auxiliary variable",
          "[geometry][scan]") {
  const GrStarChart g(AffineChart::flat(2), AffineChart::flat(2));
  const auto pack = build_constraints(g);
  ScanOptions so;
  so.use_rabinowitsch = true;
  const std::vector<PairSample> pairs{
      {{Rational(0), Rational(0)}, {Rational(1), Rational(2)}}};
  const auto rep = isometry_scan(g, pack, pairs, so);
  CHECK(rep.rabinowitsch);
  REQUIRE(rep.count_nonempty == 1);
  const auto& w = rep.pairs[0].probe.witness;
  REQUIRE(w.has_value());
  REQUIRE(w->is_exact);
  REQUIRE(w->exact.size() == 5);
  CHECK(w->exact[0] == Rational(1));
  CHECK(w->exact[4] == Rational(1));
}

TEST_CASE("high-order vanishing curvature separates depth-capped fibers",
          "[geometry][scan]") {
  // One symbol, Gamma^1_{22} = x1^3: the curvature vanishes to second order
  // at the origin, so a depth-capped bracket closure leaves the fiber over
  // the origin pair unconstrained while generic pairs pick up equations.
  const AffineChart chart(2, {{1, 2, 2, base_poly("x1^3", 2)}});
  const GrStarChart g(chart, chart);
  const auto gens = tautological_generators(g);
  const auto br = bracket(gens[0], gens[1]);
  CHECK_FALSE(br.is_zero());
  CHECK((br.components[7] - parse_poly("3*x1^2*u3", g.split)).is_zero());

  involute::ClosureOptions co;
  co.max_depth = 1;
  const Distribution cl = involutive_closure(tautological_field(g), co);
  CHECK(cl.closure_state == ClosureState::budget_exhausted);
  CHECK(cl.generators.size() == 3);
  CHECK(cl.bracket_depth_reached == 1);

  const FwSet d = dinfty(cl);
  CHECK(d.outer_approximation);
  CHECK(d.equations.size() == 30);

  const std::vector<Rational> origin{Rational(0), Rational(0), Rational(0), Rational(0)};
  const std::vector<Rational> generic{Rational(1, 2), Rational(1, 4), Rational(1, 3),
                                      Rational(1, 5)};
  int nonzero_origin = 0, nonzero_generic = 0;
  for (const auto& e : d.equations) {
    if (!e.fiber_restrict(origin).is_zero()) ++nonzero_origin;
    if (!e.fiber_restrict(generic).is_zero()) ++nonzero_generic;
  }
  CHECK(nonzero_origin == 0);
  CHECK(nonzero_generic == 30);

  // The identity map lies in the origin fiber but violates the generic one.
  std::vector<Rational> with_id = generic;
  const std::vector<Rational> id{Rational(1), Rational(0), Rational(0), Rational(1)};
  with_id.insert(with_id.end(), id.begin(), id.end());
  CHECK(d.member(std::vector<Rational>{origin[0], origin[1], origin[2], origin[3],
                                       id[0], id[1], id[2], id[3]}));
  CHECK_FALSE(d.member(with_id));
}

TEST_CASE("one-dimensional connections are locally homogeneous", "[geometry][scan]") {
  // With a single base dimension the plane field has one generator, every
  // bracket vanishes, and the integrability locus is unconstrained: every
  // sampled pair is connected no matter how the symbols vanish at a point.
  const AffineChart cubic(1, {{1, 1, 1, base_poly("x1^3", 1)}});
  const GrStarChart g(cubic, cubic);
  const auto pack = build_constraints(g);
  ScanOptions so;
  so.closure.max_depth = 4;
  const std::vector<PairSample> pairs{
      {{Rational(0)}, {Rational(0)}},
      {{Rational(1, 2)}, {Rational(1, 2)}},
      {{Rational(1, 2)}, {Rational(1, 4)}}};
  const auto rep = isometry_scan(g, pack, pairs, so);
  CHECK(rep.closure_state == ClosureState::closed);
  CHECK(rep.generator_count == 1);
  CHECK(rep.bracket_depth == 0);
  CHECK(rep.equation_count == 0);
  CHECK_FALSE(rep.outer_approximation);
  CHECK(rep.count_nonempty == 3);
  // No probe connected 0 to the other two points, so they stay in separate
  // evidence classes.
  REQUIRE(rep.orbit_classes.size() == 2);
  CHECK(rep.orbit_classes[0] == std::vector<std::size_t>{0});
  CHECK(rep.orbit_classes[1] == std::vector<std::size_t>{1, 2});
}
