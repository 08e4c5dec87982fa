#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "involute/distribution.hpp"
#include "involute/fiber_probe.hpp"
#include "involute/fw_set.hpp"
#include "involute/grassmann.hpp"

namespace involute {

struct PairSample {
  std::vector<Rational> x;
  std::vector<Rational> y;
};

struct PairResult {
  PairSample pair;
  FiberProbeResult probe;
  std::uint64_t seed = 0;
};

struct ScanOptions {
  ClosureOptions closure;
  FiberProbeOptions probe;
  // Replace witness filtering of det U != 0 by the exact embedding with one
  // auxiliary fiber variable.
  bool use_rabinowitsch = false;
  double validation_h = 1e-3;
  double validation_tolerance = 1e-6;
};

struct ScanReport {
  TautologicalValidation validation;
  ClosureState closure_state = ClosureState::raw;
  int generator_count = 0;
  int bracket_depth = 0;
  std::uint64_t gb_steps = 0;
  std::size_t equation_count = 0;
  bool outer_approximation = false;
  bool rabinowitsch = false;
  std::vector<PairResult> pairs;
  int count_nonempty = 0;
  int count_empty_evidence = 0;
  int count_certified_empty = 0;
  int count_unknown = 0;
  // Distinct base points appearing as pair endpoints, and their partition
  // into evidence classes: two points land in one class when some probed
  // pair connecting them came back nonempty.
  std::vector<std::vector<Rational>> points;
  std::vector<std::vector<std::size_t>> orbit_classes;
};

// Evidence scan for the orbit structure of the affine (or isometric)
// pseudo-group: close the graph plane field under brackets, cut its
// integrability locus with the constraint pack, and probe the fiber over
// each sampled point pair for a linear map witness. A nonempty verdict at
// (x, y) is evidence for a local affine map sending x to y.
inline ScanReport isometry_scan(const GrStarChart& g, const ConstraintPack& constraints,
                                const std::vector<PairSample>& pair_samples,
                                const ScanOptions& opts = {}) {
  const int n = g.dim();
  require_same_split(g.split, constraints.split, "isometry_scan");

  ScanReport rep;
  rep.validation =
      validate_tautological_field(g, opts.validation_h, opts.validation_tolerance);
  if (!rep.validation.pass)
    throw std::runtime_error("isometry_scan: plane field formula failed oracle validation");

  const Distribution cl = involutive_closure(tautological_field(g), opts.closure);
  rep.closure_state = cl.closure_state;
  rep.generator_count = static_cast<int>(cl.generators.size());
  rep.bracket_depth = cl.bracket_depth_reached;
  rep.gb_steps = cl.gb_steps_used;

  const FwSet d = dinfty(cl);
  std::vector<GradedPolynomial> eqs = d.equations;
  bool outer = d.outer_approximation;
  if (constraints.isotropy) {
    outer = outer || constraints.isotropy->outer_approximation;
    for (const auto& e : constraints.isotropy->equations) eqs.push_back(e);
  }
  for (const auto& s : constraints.extra) {
    outer = outer || s.outer_approximation;
    for (const auto& e : s.equations) eqs.push_back(e);
  }
  rep.equation_count = eqs.size();
  rep.outer_approximation = outer;
  rep.rabinowitsch = opts.use_rabinowitsch;

  const FwConstructible scan_set(FwSet(g.split, std::move(eqs), outer),
                                 constraints.invertibility.negative);
  RabinowitschResult embedded;
  if (opts.use_rabinowitsch) embedded = rabinowitsch_embed(scan_set);

  std::vector<Rational> identity_fiber;
  identity_fiber.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) identity_fiber.emplace_back(a == b ? 1 : 0);

  auto point_index = [&](const std::vector<Rational>& p) -> std::size_t {
    for (std::size_t i = 0; i < rep.points.size(); ++i)
      if (rep.points[i] == p) return i;
    rep.points.push_back(p);
    return rep.points.size() - 1;
  };
  std::vector<std::size_t> parent;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  for (std::size_t idx = 0; idx < pair_samples.size(); ++idx) {
    const auto& pr = pair_samples[idx];
    if (static_cast<int>(pr.x.size()) != n || static_cast<int>(pr.y.size()) != n)
      throw std::invalid_argument("isometry_scan: pair sample width mismatch");
    std::vector<Rational> base = pr.x;
    base.insert(base.end(), pr.y.begin(), pr.y.end());

    FiberProbeOptions po = opts.probe;
    po.seed = detail::splitmix64(opts.probe.seed ^ detail::splitmix64(idx + 1));
    po.preferred.push_back(identity_fiber);

    PairResult out;
    out.pair = pr;
    out.seed = po.seed;
    if (opts.use_rabinowitsch && !embedded.negative_was_empty) {
      // Lift exact candidates across the embedding: the auxiliary variable
      // must carry the inverse of the excluded polynomial's value.
      const GradedPolynomial& det = scan_set.negative.front();
      std::vector<std::vector<Rational>> lifted;
      for (const auto& cand : po.preferred) {
        std::vector<Rational> full = base;
        full.insert(full.end(), cand.begin(), cand.end());
        const Rational dv = det.eval(full);
        if (dv.is_zero()) continue;
        std::vector<Rational> up = cand;
        up.push_back(Rational(1) / dv);
        lifted.push_back(std::move(up));
      }
      po.preferred = std::move(lifted);
      out.probe = fiber_nonempty(embedded.set, base, po);
    } else {
      out.probe = fiber_nonempty(scan_set, base, po);
    }

    switch (out.probe.verdict) {
      case FiberVerdict::nonempty: ++rep.count_nonempty; break;
      case FiberVerdict::empty_evidence: ++rep.count_empty_evidence; break;
      case FiberVerdict::certified_empty: ++rep.count_certified_empty; break;
      case FiberVerdict::unknown: ++rep.count_unknown; break;
    }

    const std::size_t xi = point_index(pr.x);
    const std::size_t yi = point_index(pr.y);
    while (parent.size() < rep.points.size()) parent.push_back(parent.size());
    if (out.probe.verdict == FiberVerdict::nonempty) parent[find(xi)] = find(yi);
    rep.pairs.push_back(std::move(out));
  }

  std::vector<std::vector<std::size_t>> classes(rep.points.size());
  for (std::size_t i = 0; i < rep.points.size(); ++i) classes[find(i)].push_back(i);
  for (auto& c : classes)
    if (!c.empty()) rep.orbit_classes.push_back(std::move(c));
  return rep;
}

}  // namespace involute
