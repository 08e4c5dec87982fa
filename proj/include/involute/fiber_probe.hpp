#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "involute/fw_set.hpp"
#include "involute/rational.hpp"

namespace involute {

// Verdict of a fiber emptiness probe. The two certified verdicts are exact;
// the evidence verdicts only summarize what the search saw.
enum class FiberVerdict { nonempty, empty_evidence, certified_empty, unknown };

inline const char* to_string(FiberVerdict v) {
  switch (v) {
    case FiberVerdict::nonempty: return "nonempty";
    case FiberVerdict::empty_evidence: return "empty-evidence";
    case FiberVerdict::certified_empty: return "certified-empty";
    case FiberVerdict::unknown: return "unknown";
  }
  return "?";
}

enum class ProbeStrategy { linear, search, grid };

inline const char* to_string(ProbeStrategy s) {
  switch (s) {
    case ProbeStrategy::linear: return "linear";
    case ProbeStrategy::search: return "search";
    case ProbeStrategy::grid: return "grid";
  }
  return "?";
}

struct FiberWitness {
  std::vector<Rational> exact;   // set when is_exact
  std::vector<double> floating;  // always set
  bool is_exact = false;
  double residual = 0.0;  // max |equation| at the floating witness
};

struct FiberProbeOptions {
  ProbeStrategy strategy = ProbeStrategy::search;
  double tolerance = 1e-9;
  int attempts = 24;
  int max_iterations = 120;
  std::uint64_t seed = 0;
  double box_low = -3.0;
  double box_high = 3.0;
  int grid_resolution = 17;
  // A floating witness must push some negative polynomial above this.
  double negative_threshold = 1e-6;
  std::uint64_t reconstruction_den_bound = 1000000;
  // Exact fiber points checked first under every strategy.
  std::vector<std::vector<Rational>> preferred;
};

struct FiberProbeResult {
  FiberVerdict verdict = FiberVerdict::unknown;
  std::optional<FiberWitness> witness;
  double best_residual = std::numeric_limits<double>::infinity();
  std::string note;
};

namespace detail {

inline double eval_double(const GradedPolynomial& p, const Eigen::VectorXd& z) {
  return p.eval_double(std::vector<double>(z.data(), z.data() + z.size()));
}

// Enumerates 0, 1, -1, 2, -2, ...
inline Rational sweep_value(std::size_t t) {
  if (t == 0) return Rational(0);
  const long k = static_cast<long>((t + 1) / 2);
  return (t % 2 == 1) ? Rational(k) : Rational(-k);
}

// Finds a rational point where h is nonzero by sweeping a product grid with
// deg(h)+1 distinct values per variable; a nonzero polynomial cannot vanish
// on all of it. Returns nullopt only if the iteration cap is hit.
inline std::optional<std::vector<Rational>> nonvanishing_point(const GradedPolynomial& h,
                                                               std::size_t cap = 200000) {
  if (h.is_zero()) return std::nullopt;
  const std::size_t vars = static_cast<std::size_t>(h.split().total());
  const std::size_t per_var = static_cast<std::size_t>(*h.degree()) + 1;
  std::vector<std::size_t> idx(vars, 0);
  std::size_t used = 0;
  while (used++ < cap) {
    std::vector<Rational> p(vars);
    for (std::size_t i = 0; i < vars; ++i) p[i] = sweep_value(idx[i]);
    if (!h.eval(p).is_zero()) return p;
    std::size_t i = 0;
    while (i < vars && idx[i] + 1 == per_var) idx[i++] = 0;
    if (i == vars) return std::nullopt;
    ++idx[i];
  }
  return std::nullopt;
}

struct RestrictedFiber {
  std::vector<GradedPolynomial> positives;  // over split (0, m), nonzero
  std::vector<GradedPolynomial> negatives;  // over split (0, m), nonzero
  bool has_negative = false;                // original negative list nonempty
  std::optional<FiberProbeResult> early;    // set when restriction decides
};

inline RestrictedFiber restrict_fiber(const FwConstructible& c,
                                      const std::vector<Rational>& base_point) {
  RestrictedFiber rf;
  rf.has_negative = !c.negative.empty();
  for (const auto& e : c.positive.equations) {
    GradedPolynomial r = e.fiber_restrict(base_point);
    if (r.is_nonzero_constant()) {
      rf.early = FiberProbeResult{FiberVerdict::certified_empty, std::nullopt,
                                  std::numeric_limits<double>::infinity(),
                                  "a positive equation restricts to a nonzero constant"};
      return rf;
    }
    if (!r.is_zero()) rf.positives.push_back(std::move(r));
  }
  for (const auto& g : c.negative) {
    GradedPolynomial r = g.fiber_restrict(base_point);
    if (!r.is_zero()) rf.negatives.push_back(std::move(r));
  }
  if (rf.has_negative && rf.negatives.empty()) {
    rf.early = FiberProbeResult{FiberVerdict::certified_empty, std::nullopt,
                                std::numeric_limits<double>::infinity(),
                                "the negative part vanishes identically on the fiber"};
  }
  return rf;
}

// Exact membership of a fiber point against restricted equations.
inline bool exact_fiber_member(const RestrictedFiber& rf, const std::vector<Rational>& u) {
  for (const auto& p : rf.positives)
    if (!p.eval(u).is_zero()) return false;
  if (!rf.has_negative) return true;
  for (const auto& g : rf.negatives)
    if (!g.eval(u).is_zero()) return true;
  return false;
}

inline FiberProbeResult exact_witness_result(std::vector<Rational> u, std::string note) {
  FiberWitness w;
  w.floating.reserve(u.size());
  for (const auto& r : u) w.floating.push_back(r.to_double());
  w.exact = std::move(u);
  w.is_exact = true;
  w.residual = 0.0;
  FiberProbeResult res;
  res.verdict = FiberVerdict::nonempty;
  res.witness = std::move(w);
  res.best_residual = 0.0;
  res.note = std::move(note);
  return res;
}

// Exact affine solve over the fiber: row reduce [A | b], detect
// inconsistency, and return a particular solution plus a nullspace basis.
struct AffineSolve {
  bool inconsistent = false;
  std::vector<Rational> particular;
  std::vector<std::vector<Rational>> nullspace;  // basis vectors, length m
};

inline AffineSolve solve_affine_fiber(const std::vector<GradedPolynomial>& eqs,
                                      std::size_t m) {
  AffineSolve out;
  const std::size_t k = eqs.size();
  std::vector<std::vector<Rational>> a(k, std::vector<Rational>(m + 1, Rational(0)));
  for (std::size_t r = 0; r < k; ++r) {
    for (const auto& [mono, coef] : eqs[r].terms()) {
      if (mono.degree() == 0) {
        a[r][m] = -coef;  // move constant to the right-hand side
        continue;
      }
      for (std::size_t i = 0; i < m; ++i)
        if (mono.exponents()[i] == 1) a[r][i] = coef;
    }
  }
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m && row < k; ++c) {
    std::size_t sel = row;
    while (sel < k && a[sel][c].is_zero()) ++sel;
    if (sel == k) continue;
    std::swap(a[sel], a[row]);
    const Rational inv = a[row][c].inverse();
    for (std::size_t cc = 0; cc <= m; ++cc) a[row][cc] = a[row][cc] * inv;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == row || a[r][c].is_zero()) continue;
      const Rational f = a[r][c];
      for (std::size_t cc = 0; cc <= m; ++cc) a[r][cc] = a[r][cc] - f * a[row][cc];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < k; ++r)
    if (!a[r][m].is_zero()) {
      out.inconsistent = true;
      return out;
    }
  out.particular.assign(m, Rational(0));
  for (std::size_t r = 0; r < pivot_col.size(); ++r) out.particular[pivot_col[r]] = a[r][m];
  std::vector<bool> is_pivot(m, false);
  for (const auto c : pivot_col) is_pivot[c] = true;
  for (std::size_t free_c = 0; free_c < m; ++free_c) {
    if (is_pivot[free_c]) continue;
    std::vector<Rational> v(m, Rational(0));
    v[free_c] = Rational(1);
    for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -a[r][free_c];
    out.nullspace.push_back(std::move(v));
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Probes whether the fiber of a constructible set over base_point is
// nonempty. Verdicts "nonempty" with an exact witness and "certified-empty"
// are proofs; floating witnesses and "empty-evidence" are numerical
// evidence only.
inline FiberProbeResult fiber_nonempty(const FwConstructible& c,
                                       const std::vector<Rational>& base_point,
                                       const FiberProbeOptions& opts = {}) {
  const VarSplit& s = c.split();
  if (static_cast<int>(base_point.size()) != s.n)
    throw std::invalid_argument("fiber_nonempty: base point width mismatch");
  if (opts.tolerance <= 0 || opts.negative_threshold <= 0)
    throw std::invalid_argument("fiber_nonempty: thresholds must be positive");

  // Degenerate fiber: membership of the base point itself is decidable.
  if (s.m == 0) {
    if (c.member(base_point)) return detail::exact_witness_result({}, "zero-dimensional fiber");
    return {FiberVerdict::certified_empty, std::nullopt,
            std::numeric_limits<double>::infinity(), "zero-dimensional fiber"};
  }

  const std::size_t m = static_cast<std::size_t>(s.m);
  detail::RestrictedFiber rf = detail::restrict_fiber(c, base_point);
  if (rf.early) return *rf.early;

  for (const auto& u : opts.preferred) {
    if (u.size() != m) throw std::invalid_argument("fiber_nonempty: preferred point width");
    if (detail::exact_fiber_member(rf, u))
      return detail::exact_witness_result(u, "preferred witness");
  }

  if (opts.strategy == ProbeStrategy::linear) {
    for (const auto& p : rf.positives) {
      const auto d = p.degree();
      if (d && *d > 1)
        return {FiberVerdict::unknown, std::nullopt,
                std::numeric_limits<double>::infinity(),
                "linear strategy requires affine fiber equations"};
    }
    const auto sol = detail::solve_affine_fiber(rf.positives, m);
    if (sol.inconsistent)
      return {FiberVerdict::certified_empty, std::nullopt,
              std::numeric_limits<double>::infinity(), "inconsistent affine fiber system"};
    if (!rf.has_negative)
      return detail::exact_witness_result(sol.particular, "affine solve");
    if (sol.nullspace.empty()) {
      if (detail::exact_fiber_member(rf, sol.particular))
        return detail::exact_witness_result(sol.particular, "affine solve, unique point");
      return {FiberVerdict::certified_empty, std::nullopt,
              std::numeric_limits<double>::infinity(),
              "the negative part vanishes on the unique affine solution"};
    }
    // Parametrize the solution flat and look for a parameter value where
    // some negative polynomial survives.
    const VarSplit par(0, static_cast<int>(sol.nullspace.size()));
    std::vector<GradedPolynomial> images;
    images.reserve(m);
    for (std::size_t a = 0; a < m; ++a) {
      GradedPolynomial img = GradedPolynomial::constant(par, sol.particular[a]);
      for (std::size_t t = 0; t < sol.nullspace.size(); ++t)
        img += GradedPolynomial::variable(par, static_cast<int>(t))
                   .scaled(sol.nullspace[t][a]);
      images.push_back(std::move(img));
    }
    for (const auto& g : rf.negatives) {
      const GradedPolynomial h = g.substitute(images);
      const auto sstar = detail::nonvanishing_point(h);
      if (!sstar) continue;
      std::vector<Rational> u(m);
      for (std::size_t a = 0; a < m; ++a) u[a] = images[a].eval(*sstar);
      return detail::exact_witness_result(std::move(u), "affine solve with negative sweep");
    }
    return {FiberVerdict::certified_empty, std::nullopt,
            std::numeric_limits<double>::infinity(),
            "every negative polynomial vanishes identically on the solution flat"};
  }

  if (opts.strategy == ProbeStrategy::grid && (m < 1 || m > 2))
    return {FiberVerdict::unknown, std::nullopt, std::numeric_limits<double>::infinity(),
            "grid strategy supports fiber dimension 1 or 2"};

  // Without positive equations the locus is cut out by negatives alone;
  // sweep exact small points, which decides membership exactly per point.
  if (rf.positives.empty()) {
    GradedPolynomial sq(VarSplit(0, static_cast<int>(m)));
    for (const auto& g : rf.negatives) sq += g * g;
    if (!rf.has_negative) {
      return detail::exact_witness_result(std::vector<Rational>(m, Rational(0)),
                                          "unconstrained fiber");
    }
    const auto pt = detail::nonvanishing_point(sq);
    if (pt) return detail::exact_witness_result(*pt, "negative sweep");
    return {FiberVerdict::empty_evidence, std::nullopt,
            std::numeric_limits<double>::infinity(), "negative sweep found no point"};
  }

  // Numerical search: damped least squares on the positive residuals from
  // several starts (random box samples, or grid nodes for the grid
  // strategy), followed by rational reconstruction and exact reverification.
  std::vector<std::vector<GradedPolynomial>> jac;
  jac.reserve(rf.positives.size());
  for (const auto& p : rf.positives) {
    std::vector<GradedPolynomial> row;
    row.reserve(m);
    for (std::size_t i = 0; i < m; ++i) row.push_back(p.partial(static_cast<int>(i)));
    jac.push_back(std::move(row));
  }
  const auto residual_vec = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd r(static_cast<long>(rf.positives.size()));
    for (std::size_t i = 0; i < rf.positives.size(); ++i)
      r[static_cast<long>(i)] = detail::eval_double(rf.positives[i], u);
    return r;
  };
  const auto max_abs_residual = [&](const Eigen::VectorXd& u) {
    return residual_vec(u).cwiseAbs().maxCoeff();
  };
  const auto refine = [&](Eigen::VectorXd u) {
    double lambda = 1e-3;
    double best = residual_vec(u).squaredNorm();
    for (int it = 0; it < opts.max_iterations; ++it) {
      const Eigen::VectorXd r = residual_vec(u);
      Eigen::MatrixXd J(static_cast<long>(rf.positives.size()), static_cast<long>(m));
      for (std::size_t i = 0; i < rf.positives.size(); ++i)
        for (std::size_t j = 0; j < m; ++j)
          J(static_cast<long>(i), static_cast<long>(j)) = detail::eval_double(jac[i][j], u);
      const Eigen::MatrixXd lhs =
          J.transpose() * J + lambda * Eigen::MatrixXd::Identity(static_cast<long>(m),
                                                                 static_cast<long>(m));
      const Eigen::VectorXd delta = lhs.ldlt().solve(-J.transpose() * r);
      if (!delta.allFinite()) break;
      const Eigen::VectorXd cand = u + delta;
      const double val = residual_vec(cand).squaredNorm();
      if (val < best) {
        u = cand;
        best = val;
        lambda = std::max(lambda * 0.4, 1e-12);
        if (best < opts.tolerance * opts.tolerance * 1e-4) break;
      } else {
        lambda *= 2.5;
        if (lambda > 1e10) break;
      }
    }
    return u;
  };

  FiberProbeResult out;
  out.verdict = FiberVerdict::empty_evidence;
  const auto consider = [&](Eigen::VectorXd start) -> bool {
    const Eigen::VectorXd u = refine(std::move(start));
    const double res = max_abs_residual(u);
    out.best_residual = std::min(out.best_residual, res);
    if (res > opts.tolerance) return false;
    double neg_best = 0.0;
    for (const auto& g : rf.negatives)
      neg_best = std::max(neg_best, std::abs(detail::eval_double(g, u)));
    if (rf.has_negative && neg_best <= opts.negative_threshold) return false;

    FiberWitness w;
    w.floating.assign(u.data(), u.data() + u.size());
    w.residual = res;
    std::vector<Rational> exact;
    exact.reserve(m);
    bool ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      const auto rec = reconstruct_rational(u[static_cast<long>(i)],
                                            opts.reconstruction_den_bound,
                                            std::max(1e-8, opts.tolerance * 10));
      if (!rec) {
        ok = false;
        break;
      }
      exact.push_back(*rec);
    }
    if (ok && detail::exact_fiber_member(rf, exact)) {
      w.exact = std::move(exact);
      w.is_exact = true;
      w.residual = 0.0;
      out.best_residual = 0.0;
      out.note = "reconstructed exact witness";
    } else {
      out.note = "floating witness";
    }
    out.verdict = FiberVerdict::nonempty;
    out.witness = std::move(w);
    return true;
  };

  std::vector<Eigen::VectorXd> starts;
  for (const auto& u : opts.preferred) {
    Eigen::VectorXd v(static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i) v[static_cast<long>(i)] = u[i].to_double();
    starts.push_back(std::move(v));
  }
  if (opts.strategy == ProbeStrategy::grid) {
    const int res = std::max(2, opts.grid_resolution);
    const double step = (opts.box_high - opts.box_low) / (res - 1);
    std::vector<std::pair<double, Eigen::VectorXd>> nodes;
    if (m == 1) {
      for (int i = 0; i < res; ++i) {
        Eigen::VectorXd v(1);
        v[0] = opts.box_low + step * i;
        nodes.emplace_back(max_abs_residual(v), std::move(v));
      }
    } else {
      for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
          Eigen::VectorXd v(2);
          v[0] = opts.box_low + step * i;
          v[1] = opts.box_low + step * j;
          nodes.emplace_back(max_abs_residual(v), std::move(v));
        }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t take = std::min<std::size_t>(nodes.size(),
                                                   static_cast<std::size_t>(opts.attempts));
    for (std::size_t i = 0; i < take; ++i) starts.push_back(nodes[i].second);
    if (out.note.empty()) out.note = "grid scan with local refinement";
  } else {
    std::mt19937_64 rng(opts.seed);
    const double width = opts.box_high - opts.box_low;
    for (int a = 0; a < opts.attempts; ++a) {
      Eigen::VectorXd v(static_cast<long>(m));
      for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v[static_cast<long>(i)] = opts.box_low + width * t;
      }
      starts.push_back(std::move(v));
    }
  }
  for (auto& st : starts)
    if (consider(std::move(st))) return out;
  if (out.note.empty())
    out.note = opts.strategy == ProbeStrategy::grid
                   ? "no zero found on the grid within the box"
                   : "no zero found from the sampled starts";
  return out;
}

inline FiberProbeResult fiber_nonempty(const FwSet& s, const std::vector<Rational>& base_point,
                                       const FiberProbeOptions& opts = {}) {
  return fiber_nonempty(FwConstructible(s, {}), base_point, opts);
}

struct ProjectionReport {
  std::vector<std::vector<Rational>> samples;
  std::vector<FiberProbeResult> results;
  int count_nonempty = 0;
  int count_empty_evidence = 0;
  int count_certified_empty = 0;
  int count_unknown = 0;
  double nonempty_fraction = 0.0;
  double dense_threshold = 0.9;
  bool dense_evidence = false;
  ProbeStrategy strategy = ProbeStrategy::search;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
};

// Probes the projection of a constructible set to the base over a sample
// list; each sample gets an independently derived deterministic seed.
inline ProjectionReport projection_probe(const FwConstructible& c,
                                         const std::vector<std::vector<Rational>>& samples,
                                         const FiberProbeOptions& opts = {},
                                         double dense_threshold = 0.9) {
  if (samples.empty()) throw std::invalid_argument("projection_probe: no samples");
  ProjectionReport rep;
  rep.samples = samples;
  rep.dense_threshold = dense_threshold;
  rep.strategy = opts.strategy;
  rep.seed = opts.seed;
  rep.tolerance = opts.tolerance;
  rep.results.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    FiberProbeOptions per = opts;
    per.seed = detail::splitmix64(opts.seed ^ detail::splitmix64(i + 1));
    FiberProbeResult r = fiber_nonempty(c, samples[i], per);
    switch (r.verdict) {
      case FiberVerdict::nonempty: ++rep.count_nonempty; break;
      case FiberVerdict::empty_evidence: ++rep.count_empty_evidence; break;
      case FiberVerdict::certified_empty: ++rep.count_certified_empty; break;
      case FiberVerdict::unknown: ++rep.count_unknown; break;
    }
    rep.results.push_back(std::move(r));
  }
  rep.nonempty_fraction =
      static_cast<double>(rep.count_nonempty) / static_cast<double>(samples.size());
  rep.dense_evidence = rep.nonempty_fraction >= dense_threshold;
  return rep;
}

// Deterministic small-rational base samples for projection probes.
inline std::vector<std::vector<Rational>> sample_base_points(const VarSplit& split,
                                                             int count,
                                                             std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_base_points: count must be positive");
  std::vector<std::vector<Rational>> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uint64_t state = detail::splitmix64(seed ^ 0x5bf03635ULL);
  auto next = [&]() {
    state = detail::splitmix64(state);
    return state;
  };
  for (int i = 0; i < count; ++i) {
    std::vector<Rational> p;
    p.reserve(static_cast<std::size_t>(split.n));
    for (int j = 0; j < split.n; ++j) {
      const long num = static_cast<long>(next() % 19) - 9;
      const long den = 1 + static_cast<long>(next() % 4);
      p.emplace_back(num, den);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace involute
