// Acceptance gate: one line per criterion, [PASS] or [FAIL], with the
// tolerances and time limits pinned in code next to each check.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "involute/affine_chart.hpp"
#include "involute/distribution.hpp"
#include "involute/fiber_probe.hpp"
#include "involute/grassmann.hpp"
#include "involute/groebner.hpp"
#include "involute/isometry_scan.hpp"
#include "involute/leaf.hpp"
#include "involute/parse.hpp"
#include "involute/variational.hpp"

namespace {

using namespace involute;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> notes;
};

PAVectorField field(const VarSplit& s, const std::vector<std::string>& comps) {
  std::vector<GradedPolynomial> polys;
  polys.reserve(comps.size());
  for (const auto& c : comps) polys.push_back(parse_poly(c, s));
  return PAVectorField(s, std::move(polys));
}

PAVectorField rand_field(std::mt19937_64& g, const VarSplit& s, int deg, int terms) {
  std::vector<GradedPolynomial> comps;
  for (int i = 0; i < s.total(); ++i) comps.push_back(testgen::rand_poly(g, s, deg, terms));
  return PAVectorField(s, std::move(comps));
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1. Exact Lie-algebra identities on randomized triples, with degree and
// class bookkeeping for the bracket.
Outcome criterion1() {
  Outcome out;
  constexpr int kTriples = 200;
  const std::vector<VarSplit> splits{{1, 1}, {2, 1}, {1, 2}, {2, 2},
                                     {3, 1}, {1, 3}, {2, 0}, {0, 2}};
  auto g = testgen::rng(101);
  int done = 0, failures = 0;
  while (done < kTriples) {
    const VarSplit& s = splits[static_cast<std::size_t>(done) % splits.size()];
    const auto v = rand_field(g, s, 2, 3);
    const auto w = rand_field(g, s, 2, 3);
    const auto z = rand_field(g, s, 2, 3);
    const auto vw = bracket(v, w);

    bool ok = (vw + bracket(w, v)).is_zero();

    Rational a = testgen::rand_rational(g);
    const auto ca = GradedPolynomial::constant(s, a);
    ok = ok && (bracket(v.scaled(ca) + w, z) == bracket(v, z).scaled(ca) + bracket(w, z));

    const auto jacobi =
        bracket(v, bracket(w, z)) + bracket(w, bracket(z, v)) + bracket(z, bracket(v, w));
    ok = ok && jacobi.is_zero();

    // Class and degree bookkeeping: the bracket stays partially algebraic on
    // the same split, with fiber degree at most the sum of the inputs'.
    ok = ok && vw.split == s;
    const auto dv = v.fiber_degree(), dw = w.fiber_degree(), db = vw.fiber_degree();
    if (db && dv && dw) ok = ok && *db <= *dv + *dw;

    if (!ok) ++failures;
    ++done;
  }
  out.notes.push_back(std::to_string(done) + " random triples over " +
                      std::to_string(splits.size()) + " splits, " + std::to_string(failures) +
                      " failures");
  out.pass = failures == 0;
  return out;
}

// 2. Pushforward naturality under verified partially linear diffeomorphisms.
Outcome criterion2() {
  Outcome out;
  constexpr int kInstances = 52;
  const std::vector<VarSplit> splits{{1, 1}, {2, 1}, {1, 2}, {2, 2}};
  auto g = testgen::rng(202);
  int done = 0, failures = 0;
  while (done < kInstances) {
    const VarSplit& s = splits[static_cast<std::size_t>(done) % splits.size()];
    const auto phi = testgen::rand_diffeo(g, s);
    const auto v = rand_field(g, s, 2, 3);
    const auto w = rand_field(g, s, 2, 3);
    if (!(pushforward(phi, bracket(v, w)) == bracket(pushforward(phi, v), pushforward(phi, w))))
      ++failures;
    ++done;
  }
  out.notes.push_back(std::to_string(done) + " instances, " + std::to_string(failures) +
                      " failures");
  out.pass = failures == 0;
  return out;
}

// 3. Chow regime on the contact frame.
Outcome criterion3() {
  Outcome out;
  const VarSplit s(1, 2);
  const auto d =
      make_distribution(s, {field(s, {"1", "0", "0"}), field(s, {"0", "1", "x1"})}, 2);
  const Distribution cl = involutive_closure(d);
  bool ok = cl.closure_state == ClosureState::closed && cl.generators.size() == 3 &&
            cl.bracket_depth_reached == 1;
  auto g = testgen::rng(303);
  int rank3 = 0;
  for (int i = 0; i < 100; ++i)
    if (evaluation_rank(cl, testgen::rand_point(g, 3)) == 3) ++rank3;
  ok = ok && rank3 == 100;
  const FwSet locus = dinfty(cl);
  ok = ok && locus.certified_empty() && !locus.outer_approximation;
  out.notes.push_back("closure: " + std::to_string(cl.generators.size()) +
                      " generators at depth " + std::to_string(cl.bracket_depth_reached) +
                      "; rank 3 at " + std::to_string(rank3) +
                      "/100 points; locus certified empty: " +
                      (locus.certified_empty() ? "yes" : "no"));
  out.pass = ok;
  return out;
}

// 4. Frobenius regime: involutive suite charts pass tangency at 1e-6, the
// non-involutive control fails at 1e-2.
Outcome criterion4() {
  Outcome out;
  constexpr double kTol = 1e-6;
  constexpr double kControlFloor = 1e-2;
  constexpr double kH = 1e-3;
  constexpr int kRes = 21;
  const VarSplit s(1, 1);
  struct Example {
    const char* label;
    std::vector<PAVectorField> fields;
    std::vector<Rational> center;
  };
  const std::vector<Example> suite{
      {"flat pair", {field(s, {"1", "0"}), field(s, {"0", "1"})}, {0, 0}},
      {"shear pair", {field(s, {"1", "u1"}), field(s, {"0", "u1"})}, {0, 1}},
      {"scaling pair", {field(s, {"1", "0"}), field(s, {"0", "u1"})}, {0, 1}},
  };
  bool ok = true;
  for (const auto& ex : suite) {
    const auto d = make_distribution(s, ex.fields);
    const Distribution cl = involutive_closure(d);
    const bool nothing_added =
        cl.closure_state == ClosureState::closed && cl.generators.size() == ex.fields.size();
    const bool certified = closure_certificate(cl);
    const auto chart =
        build_leaf(cl, ex.center, {{-1.0, 1.0}, {-1.0, 1.0}}, kRes, kH);
    const auto rep = verify_tangency(chart, cl, kTol);
    ok = ok && nothing_added && certified && chart.complete && rep.pass;
    out.notes.push_back(std::string(ex.label) + ": closure added " +
                        std::to_string(cl.generators.size() - ex.fields.size()) +
                        ", certificate " + (certified ? "ok" : "BAD") + ", max angle " +
                        fmt(rep.max_angle));
  }
  const VarSplit sc(1, 2);
  const std::vector<PAVectorField> control{field(sc, {"1", "0", "0"}),
                                           field(sc, {"0", "x1", "1"})};
  const auto chart = compose_flow_grid(control, {0.0, 0.0, 0.0},
                                       {{-1.0, 1.0}, {-1.0, 1.0}}, kRes, kH);
  const auto rep = verify_tangency(chart, make_distribution(sc, control), kTol);
  ok = ok && !rep.pass && rep.max_angle >= kControlFloor;
  out.notes.push_back("negative control max angle " + fmt(rep.max_angle) + " (floor " +
                      fmt(kControlFloor) + ")");
  out.pass = ok;
  return out;
}

// 5. Groebner soundness: combinations reduce to zero, principal-ideal
// non-members are rejected with a division cross-check, and the pinned basis
// collapses to the unit ideal.
Outcome criterion5() {
  Outcome out;
  auto g = testgen::rng(505);
  const std::vector<VarSplit> splits{{1, 1}, {2, 1}, {1, 2}};
  int checks = 0, failures = 0;

  for (int i = 0; i < 250; ++i) {
    const VarSplit& s = splits[static_cast<std::size_t>(i) % splits.size()];
    const int rank = 1 + i % 2;
    std::vector<FreeModuleElement> gens;
    for (int k = 0; k < 2; ++k) {
      std::vector<GradedPolynomial> comps;
      for (int r = 0; r < rank; ++r) comps.push_back(testgen::rand_poly(g, s, 2, 2));
      FreeModuleElement e(std::move(comps));
      if (e.is_zero()) e[0] = GradedPolynomial::variable(s, 0);
      gens.push_back(std::move(e));
    }
    FreeModuleElement f(s, rank);
    for (const auto& gen : gens) f += gen.times_poly(testgen::rand_poly(g, s, 2, 2));
    const ModuleBasis basis = buchberger(gens);
    ++checks;
    if (!basis.is_groebner || !member(f, basis)) ++failures;
  }

  for (int i = 0; i < 250; ++i) {
    const VarSplit& s = splits[static_cast<std::size_t>(i) % splits.size()];
    GradedPolynomial p = testgen::rand_poly(g, s, 2, 2);
    p += GradedPolynomial::variable(s, 0).scaled(Rational(1));
    if (!p.degree() || *p.degree() == 0) p = GradedPolynomial::variable(s, 0);
    Rational c = testgen::rand_rational(g);
    if (c.is_zero()) c = Rational(1);
    const GradedPolynomial q = testgen::rand_poly(g, s, 2, 2);
    const GradedPolynomial inside = q * p;
    const GradedPolynomial outside = inside + GradedPolynomial::constant(s, c);
    const ModuleBasis basis = ideal_basis({p});
    ++checks;
    if (!ideal_member(inside, basis)) ++failures;
    ++checks;
    if (ideal_member(outside, basis)) ++failures;
    // Division cross-check: reducing by p alone must leave exactly c.
    const auto rr = reduce(as_module_element(outside), {as_module_element(p)}, basis.order);
    if (!(rr.complete && rr.remainder.components()[0] == GradedPolynomial::constant(s, c)))
      ++failures;
  }

  const VarSplit s11(1, 1);
  const ModuleBasis unit = ideal_basis({parse_poly("u1^2", s11), parse_poly("u1*x1 + 1", s11)});
  ++checks;
  const bool unit_ok = unit.is_groebner && unit.generators.size() == 1 &&
                       unit.generators[0].components()[0] ==
                           GradedPolynomial::constant(s11, Rational(1));
  if (!unit_ok) ++failures;

  out.notes.push_back(std::to_string(checks) + " membership checks, " +
                      std::to_string(failures) + " failures; unit-ideal basis " +
                      (unit_ok ? "reproduced" : "WRONG"));
  out.pass = failures == 0;
  return out;
}

// 6. Rank constancy of the matrix ODE X' = A(t) X.
Outcome criterion6() {
  Outcome out;
  constexpr double kGapFloor = 1e6;
  const VarSplit t(1, 0);
  const auto zero = GradedPolynomial::zero(t);
  const auto one = GradedPolynomial::constant(t, Rational(1));
  bool ok = true;

  const auto r0 = resolvent_rank_check({{zero, zero}, {zero, zero}},
                                       {{1.0, 0.0}, {0.0, 1.0}}, 1.0, 1e-3);
  ok = ok && r0.pass && r0.rank_constant && r0.ranks.front() == 2 &&
       r0.min_gap_ratio > kGapFloor;
  out.notes.push_back("A = 0: rank " + std::to_string(r0.ranks.front()) + ", gap " +
                      fmt(r0.min_gap_ratio));

  const auto r1 = resolvent_rank_check({{zero, one}, {zero, zero}},
                                       {{1.0, 0.0}, {0.0, 0.0}}, 2.0, 1e-3);
  bool nilpotent_ok = r1.pass && r1.rank_constant && r1.ranks.front() == 1 &&
                      r1.min_gap_ratio > kGapFloor;
  // Explicit solution (I + tA) X0: entry (0,0) stays 1, the rest stay 0.
  const double dev = std::max(
      {std::abs(r1.final_state[0][0] - 1.0), std::abs(r1.final_state[0][1]),
       std::abs(r1.final_state[1][0]), std::abs(r1.final_state[1][1])});
  nilpotent_ok = nilpotent_ok && dev <= 1e-9;
  ok = ok && nilpotent_ok;
  out.notes.push_back("nilpotent: rank " + std::to_string(r1.ranks.front()) + ", gap " +
                      fmt(r1.min_gap_ratio) + ", closed-form deviation " + fmt(dev));

  const auto r2 = resolvent_rank_check({{zero, one}, {zero, zero}},
                                       {{0.0, 0.0}, {0.0, 0.0}}, 1.0, 1e-3);
  ok = ok && r2.pass && r2.rank_constant && r2.ranks.front() == 0;
  out.notes.push_back("X0 = 0: rank " + std::to_string(r2.ranks.front()));

  out.pass = ok;
  return out;
}

AffineChart curved_two() {
  const VarSplit b(2, 0);
  std::vector<ChristoffelEntry> entries;
  entries.push_back({1, 1, 2, parse_poly("x2", b)});
  entries.push_back({2, 2, 2, parse_poly("x1*x2", b)});
  entries.push_back({2, 1, 1, parse_poly("1/2", b)});
  return AffineChart(2, entries);
}

// 7. Tautological-field oracles: exact flat and identity-graph checks plus
// the geodesic-projection residual.
Outcome criterion7() {
  Outcome out;
  constexpr double kResidual = 1e-6;
  constexpr double kH = 1e-3;
  struct Case {
    const char* label;
    GrStarChart chart;
  };
  const VarSplit b1(1, 0);
  std::vector<Case> cases;
  cases.push_back({"flat 2d", GrStarChart(AffineChart::flat(2), AffineChart::flat(2))});
  cases.push_back({"curved 2d", GrStarChart(curved_two(), curved_two())});
  cases.push_back({"mixed 1d",
                   GrStarChart(AffineChart(1, {{1, 1, 1, parse_poly("x1^2", b1)}}),
                               AffineChart(1, {{1, 1, 1, parse_poly("2*x1", b1)}}))});
  bool ok = true;
  for (const auto& c : cases) {
    const auto v = validate_tautological_field(c.chart, kH, kResidual);
    ok = ok && v.pass && v.flat_ok && v.identity_ok && v.geodesic_ok &&
         v.geodesic_residual <= kResidual;
    out.notes.push_back(std::string(c.label) + ": flat " + (v.flat_ok ? "ok" : "BAD") +
                        ", identity " + (v.identity_ok ? "ok" : "BAD") + ", residual " +
                        fmt(v.geodesic_residual) + ", endpoint gap " + fmt(v.endpoint_gap));
  }
  out.pass = ok;
  return out;
}

std::vector<Rational> identity_fiber(int n) {
  std::vector<Rational> u(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                          Rational(0));
  for (int i = 0; i < n; ++i)
    u[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
      static_cast<std::size_t>(i)] = Rational(1);
  return u;
}

// 8. Orbit-evidence demonstration: flat scans produce exact identity
// witnesses, isotropic witnesses are orthogonal, and a high-order-vanishing
// symbol separates the origin fiber from a generic one.
Outcome criterion8() {
  Outcome out;
  bool ok = true;

  {  // 8a: flat chart, every pair nonempty with the exact identity witness.
    GrStarChart g(AffineChart::flat(2), AffineChart::flat(2));
    const auto pack = build_constraints(g, {});
    std::vector<PairSample> pairs;
    auto rg = testgen::rng(808);
    for (int i = 0; i < 5; ++i)
      pairs.push_back({testgen::rand_point(rg, 2), testgen::rand_point(rg, 2)});
    ScanOptions so;
    so.probe.seed = 81;
    const ScanReport rep = isometry_scan(g, pack, pairs, so);
    bool all_identity = rep.count_nonempty == static_cast<int>(pairs.size());
    const auto id = identity_fiber(2);
    for (const auto& p : rep.pairs)
      all_identity = all_identity && p.probe.witness && p.probe.witness->is_exact &&
                     p.probe.witness->exact == id;
    ok = ok && all_identity;
    out.notes.push_back(std::string("8a flat scan: ") + std::to_string(rep.count_nonempty) +
                        "/" + std::to_string(pairs.size()) + " nonempty, identity witnesses " +
                        (all_identity ? "exact" : "MISSING"));
  }

  {  // 8b: flat metric, isotropy on: witnesses satisfy U^T U = I.
    constexpr double kOrth = 1e-9;
    const VarSplit b(2, 0);
    std::vector<std::vector<GradedPolynomial>> metric{
        {GradedPolynomial::constant(b, Rational(1)), GradedPolynomial::zero(b)},
        {GradedPolynomial::zero(b), GradedPolynomial::constant(b, Rational(1))}};
    const AffineChart chart(2, {}, metric);
    GrStarChart g(chart, chart);
    ConstraintOptions co;
    co.isotropy = true;
    const auto pack = build_constraints(g, co);
    std::vector<PairSample> pairs{{{Rational(0), Rational(0)}, {Rational(1), Rational(0)}},
                                  {{Rational(1, 2), Rational(1, 2)},
                                   {Rational(-1, 2), Rational(1, 2)}},
                                  {{Rational(1), Rational(-1)}, {Rational(0), Rational(2)}}};
    ScanOptions so;
    so.probe.seed = 82;
    const ScanReport rep = isometry_scan(g, pack, pairs, so);
    bool orth_ok = rep.count_nonempty == static_cast<int>(pairs.size());
    for (const auto& p : rep.pairs) {
      if (!p.probe.witness) {
        orth_ok = false;
        continue;
      }
      const auto& w = *p.probe.witness;
      if (w.is_exact) {
        // U^T U - I must vanish exactly.
        for (int i = 0; i < 2 && orth_ok; ++i)
          for (int j = 0; j < 2 && orth_ok; ++j) {
            Rational acc(0);
            for (int a = 0; a < 2; ++a)
              acc += w.exact[static_cast<std::size_t>(2 * a + i)] *
                     w.exact[static_cast<std::size_t>(2 * a + j)];
            if (i == j) acc -= Rational(1);
            if (!acc.is_zero()) orth_ok = false;
          }
      } else {
        for (int i = 0; i < 2 && orth_ok; ++i)
          for (int j = 0; j < 2 && orth_ok; ++j) {
            double acc = 0;
            for (int a = 0; a < 2; ++a)
              acc += w.floating[static_cast<std::size_t>(2 * a + i)] *
                     w.floating[static_cast<std::size_t>(2 * a + j)];
            if (i == j) acc -= 1.0;
            if (std::abs(acc) > kOrth) orth_ok = false;
          }
      }
    }
    ok = ok && orth_ok;
    out.notes.push_back(std::string("8b isotropic scan: ") +
                        std::to_string(rep.count_nonempty) + "/" +
                        std::to_string(pairs.size()) + " nonempty, orthogonality " +
                        (orth_ok ? "verified" : "VIOLATED"));
  }

  {  // 8c: the one-dimensional cubic symbol, depth caps 0..4, fibers over the
     // origin pair versus a generic pair compared symbolically.
    const VarSplit b1(1, 0);
    const AffineChart cubic(1, {{1, 1, 1, parse_poly("x1^3", b1)}});
    GrStarChart g(cubic, cubic);
    const std::vector<Rational> origin_pair{Rational(0), Rational(0)};
    const std::vector<Rational> generic_pair{Rational(1, 2), Rational(1, 3)};
    bool contrast_found = false;
    int max_equations = 0;
    for (int cap = 0; cap <= 4; ++cap) {
      ClosureOptions copts;
      copts.max_depth = cap;
      const Distribution cl = involutive_closure(tautological_field(g), copts);
      const FwSet locus = dinfty(cl);
      max_equations = std::max(max_equations, static_cast<int>(locus.equations.size()));
      bool origin_free = true, generic_cut = false;
      for (const auto& eq : locus.equations) {
        if (!eq.fiber_restrict(origin_pair).is_zero()) origin_free = false;
        if (!eq.fiber_restrict(generic_pair).is_zero()) generic_cut = true;
      }
      if (origin_free && generic_cut) contrast_found = true;
    }
    ok = ok && contrast_found;
    if (!contrast_found) {
      out.notes.push_back(
          "8c cubic symbol (dim 1): NO depth-capped contrast exists, and none can:");
      out.notes.push_back(
          "    the graph plane field has a single generator whose self-bracket vanishes,");
      out.notes.push_back(
          "    so every closure is closed with 1 generator and the minor locus is empty");
      out.notes.push_back("    (" + std::to_string(max_equations) +
                          " equations at every cap; both fibers are the whole line);");
      out.notes.push_back(
          "    geometrically a one-dimensional connection carries no curvature, so the");
      out.notes.push_back(
          "    origin and generic fibers agree for real reasons, not for lack of depth.");
    } else {
      out.notes.push_back("8c cubic symbol (dim 1): contrast found");
    }
  }

  {  // 8c supplement (dim 2): the same cubic placed on a curvature-bearing
     // index pair shows exactly the intended strict fiber contrast.
    const VarSplit b2(2, 0);
    const AffineChart cubic2(2, {{1, 2, 2, parse_poly("x1^3", b2)}});
    GrStarChart g(cubic2, cubic2);
    const std::vector<Rational> origin_pair{Rational(0), Rational(0), Rational(0),
                                            Rational(0)};
    const std::vector<Rational> generic_pair{Rational(1, 2), Rational(1, 4), Rational(1, 3),
                                             Rational(1, 5)};
    bool supplement_ok = false;
    for (int cap = 1; cap <= 2 && !supplement_ok; ++cap) {
      ClosureOptions copts;
      copts.max_depth = cap;
      const Distribution cl = involutive_closure(tautological_field(g), copts);
      const FwSet locus = dinfty(cl);
      bool origin_free = true, generic_cut = false;
      for (const auto& eq : locus.equations) {
        if (!eq.fiber_restrict(origin_pair).is_zero()) origin_free = false;
        if (!eq.fiber_restrict(generic_pair).is_zero()) generic_cut = true;
      }
      // The identity plane separates the fibers concretely.
      const auto id = identity_fiber(2);
      auto with_fiber = [&](const std::vector<Rational>& base) {
        auto pt = base;
        pt.insert(pt.end(), id.begin(), id.end());
        return pt;
      };
      const bool id_separates =
          locus.member(with_fiber(origin_pair)) && !locus.member(with_fiber(generic_pair));
      if (origin_free && generic_cut && id_separates) {
        supplement_ok = true;
        out.notes.push_back("8c supplement (dim 2, cubic on a curvature index): cap " +
                            std::to_string(cap) + " gives " +
                            std::to_string(locus.equations.size()) +
                            " equations, all vanish over the origin pair, some cut the "
                            "generic pair, identity plane separates: strict contrast "
                            "demonstrated");
      }
    }
    if (!supplement_ok)
      out.notes.push_back("8c supplement (dim 2): contrast NOT reproduced (unexpected)");
    // The supplement documents the intended phenomenon but cannot rescue the
    // one-dimensional criterion, so it does not enter the verdict.
  }

  out.pass = ok;
  return out;
}

// 9. Projection-probe verdicts against closed-form ground truth.
Outcome criterion9() {
  Outcome out;
  const VarSplit s(1, 1);
  FiberProbeOptions popts;
  popts.seed = 909;
  bool ok = true;

  {
    const FwConstructible c(FwSet(s, {parse_poly("u1*x1 - 1", s)}), {});
    const std::vector<std::vector<Rational>> pts{{Rational(-2)}, {Rational(-1)},
                                                 {Rational(-1, 2)}, {Rational(0)},
                                                 {Rational(1, 2)}, {Rational(1)},
                                                 {Rational(2)}};
    const ProjectionReport rep = projection_probe(c, pts, popts);
    bool match = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const bool zero_base = pts[i][0].is_zero();
      const auto v = rep.results[i].verdict;
      if (zero_base && v != FiberVerdict::certified_empty) match = false;
      if (!zero_base && v != FiberVerdict::nonempty) match = false;
    }
    ok = ok && match;
    out.notes.push_back(std::string("reciprocal set: ground truth ") +
                        (match ? "matched" : "MISSED") + " at " + std::to_string(pts.size()) +
                        " points (certified empty exactly at the pole)");
  }

  {
    const FwConstructible c(FwSet(s, {parse_poly("u1^2 - x1", s)}), {});
    const std::vector<std::vector<Rational>> pts{{Rational(-2)}, {Rational(-1)},
                                                 {Rational(0)},  {Rational(1, 4)},
                                                 {Rational(1)},  {Rational(9, 4)}};
    const ProjectionReport rep = projection_probe(c, pts, popts);
    bool match = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const bool nonneg = pts[i][0].sign() >= 0;
      const auto v = rep.results[i].verdict;
      if (nonneg && v != FiberVerdict::nonempty) match = false;
      if (!nonneg && v == FiberVerdict::nonempty) match = false;
      if (!nonneg && v == FiberVerdict::unknown) match = false;
    }
    ok = ok && match;
    out.notes.push_back(std::string("parabola set: nonempty iff the base is nonnegative ") +
                        (match ? "matched" : "MISSED"));
  }

  {
    const FwConstructible c(FwSet(s, {parse_poly("u1^2 + 1", s)}), {});
    auto g = testgen::rng(919);
    std::vector<std::vector<Rational>> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(testgen::rand_point(g, 1));
    const ProjectionReport rep = projection_probe(c, pts, popts);
    const bool none = rep.count_nonempty == 0 && rep.nonempty_fraction == 0.0;
    ok = ok && none;
    out.notes.push_back(std::string("empty set: ") + std::to_string(rep.count_nonempty) +
                        " nonempty of " + std::to_string(pts.size()) + " (fraction " +
                        fmt(rep.nonempty_fraction) + ")");
  }

  out.pass = ok;
  return out;
}

// 10. Determinism: every shipped job reproduces byte-identical reports under
// the same seed.
Outcome criterion10() {
  Outcome out;
  const std::vector<std::string> jobs{
      "heisenberg-closure.json", "heisenberg-dinfty.json", "sphere-leaf.json",
      "groebner-demo.json",      "chain-demo.json",        "projection-probe-demo.json",
      "flat-scan.json",          "isotropy-scan.json",     "cubic-scan.json"};
  bool ok = true;
  auto slurp = [](const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
  };
  for (const auto& name : jobs) {
    const std::string job = std::string(JOBS_DIR) + "/" + name;
    const std::string o1 = "/tmp/acceptance_det_1.json";
    const std::string o2 = "/tmp/acceptance_det_2.json";
    auto run = [&](const std::string& dst) {
      const std::string cmd = "cd /tmp && " + std::string(CLI_PATH) + " -i " + job + " -o " +
                              dst + " >/dev/null 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    const int rc1 = run(o1);
    const int rc2 = run(o2);
    const bool same = rc1 == rc2 && (rc1 == 0 || rc1 == 2) && slurp(o1) == slurp(o2) &&
                      !slurp(o1).empty();
    ok = ok && same;
    if (!same)
      out.notes.push_back(name + ": NOT reproducible (exit " + std::to_string(rc1) + "/" +
                          std::to_string(rc2) + ")");
  }
  out.notes.push_back(std::to_string(jobs.size()) + " jobs re-run and byte-compared" +
                      (ok ? ", all identical" : ""));
  out.pass = ok;
  return out;
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 1;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "exact Lie-algebra identities on 200 random triples", 30, criterion1},
      {2, "pushforward naturality on 52 verified diffeomorphisms", 30, criterion2},
      {3, "contact frame closes and certifies an empty locus", 5, criterion3},
      {4, "involutive suite integrates, control fails tangency", 60, criterion4},
      {5, "module and ideal membership soundness, 751 checks", 60, criterion5},
      {6, "matrix-ODE rank constancy with singular-value gaps", 10, criterion6},
      {7, "tautological-field oracles on three chart pairs", 60, criterion7},
      {8, "orbit-evidence scans and the high-order-vanishing contrast", 300, criterion8},
      {9, "projection-probe verdicts against closed-form truth", 30, criterion9},
      {10, "byte-identical reports for every shipped job", 60, criterion10},
  };

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = Clock::now();
    Outcome o = c.run();
    o.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_time = o.seconds < c.limit_seconds;
    const bool pass = o.pass && in_time;
    std::printf("[%s] criterion %d: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL",
                c.id, c.title, o.seconds, c.limit_seconds);
    for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
    if (!in_time) std::printf("       time limit exceeded\n");
    if (!pass) ++failed;
  }
  if (ran == 0) {
    std::cerr << "no such criterion\n";
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
