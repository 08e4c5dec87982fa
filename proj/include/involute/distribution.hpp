#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "involute/fw_set.hpp"
#include "involute/groebner.hpp"
#include "involute/vector_field.hpp"

namespace involute {

// Exact rank of a rational matrix by Gaussian elimination.
inline int exact_rank(std::vector<std::vector<Rational>> m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  for (const auto& row : m)
    if (row.size() != cols) throw std::invalid_argument("exact_rank: ragged matrix");
  int rank = 0;
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows; ++c) {
    std::size_t sel = pivot_row;
    while (sel < rows && m[sel][c].is_zero()) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[pivot_row]);
    const Rational inv = m[pivot_row][c].inverse();
    for (std::size_t cc = c; cc < cols; ++cc) m[pivot_row][cc] = m[pivot_row][cc] * inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pivot_row || m[r][c].is_zero()) continue;
      const Rational factor = m[r][c];
      for (std::size_t cc = c; cc < cols; ++cc)
        m[r][cc] = m[r][cc] - factor * m[pivot_row][cc];
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

enum class ClosureState { raw, closed, budget_exhausted };

inline const char* to_string(ClosureState s) {
  switch (s) {
    case ClosureState::raw: return "raw";
    case ClosureState::closed: return "closed";
    case ClosureState::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

struct DistGenerator {
  PAVectorField field;
  int depth = 0;            // nesting depth of the bracket that produced it
  std::string provenance;   // e.g. "[V1,[V1,V2]]"
};

struct Distribution {
  VarSplit split{1, 0};
  std::vector<DistGenerator> generators;
  std::optional<int> plane_dim;
  ClosureState closure_state = ClosureState::raw;
  int bracket_depth_reached = 0;
  std::uint64_t gb_steps_used = 0;

  std::vector<std::vector<Rational>> evaluate(const std::vector<Rational>& point) const {
    std::vector<std::vector<Rational>> rows;
    rows.reserve(generators.size());
    for (const auto& g : generators) rows.push_back(g.field.evaluate(point));
    return rows;
  }
};

inline int evaluation_rank(const Distribution& d, const std::vector<Rational>& point) {
  return exact_rank(d.evaluate(point));
}

namespace detail {

// Deterministic probe points used to sanity-check a declared plane
// dimension. Spread over small rationals; a wrong declaration that holds on
// all of them would have to be wrong on a thin set only.
inline std::vector<std::vector<Rational>> rank_probe_points(const VarSplit& split,
                                                            int count) {
  std::vector<std::vector<Rational>> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<Rational> p;
    p.reserve(static_cast<std::size_t>(split.total()));
    for (int j = 0; j < split.total(); ++j) {
      const long num = ((static_cast<long>(i) * 31 + j * 17 + 5) % 11) - 5;
      const long den = 1 + ((i + 2 * j) % 3);
      p.emplace_back(num, den);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace detail

// Build a distribution with an optional declared plane dimension. A
// declaration is checked against the evaluation rank on a fixed probe set
// and rejected on any mismatch; this catches wrong declarations off the
// degeneracy locus but cannot certify constant rank.
inline Distribution make_distribution(const VarSplit& split,
                                      std::vector<PAVectorField> fields,
                                      std::optional<int> plane_dim = std::nullopt) {
  if (fields.empty()) throw std::invalid_argument("make_distribution: no generators");
  Distribution d;
  d.split = split;
  d.generators.reserve(fields.size());
  int i = 0;
  for (auto& f : fields) {
    require_same_split(split, f.split, "make_distribution");
    ++i;
    std::string prov = f.name.empty() ? "V" + std::to_string(i) : f.name;
    d.generators.push_back({std::move(f), 0, std::move(prov)});
  }
  if (plane_dim) {
    if (*plane_dim < 1 || *plane_dim > split.total())
      throw std::invalid_argument("make_distribution: plane_dim out of range");
    for (const auto& p : detail::rank_probe_points(split, 12)) {
      const int r = evaluation_rank(d, p);
      if (r != *plane_dim)
        throw std::invalid_argument(
            "make_distribution: declared plane_dim " + std::to_string(*plane_dim) +
            " but evaluation rank is " + std::to_string(r) + " at a probe point");
    }
    d.plane_dim = plane_dim;
  }
  return d;
}

struct ClosureOptions {
  int max_depth = 6;
  std::uint64_t gb_budget = 100000;  // 0 = unlimited
  std::uint64_t max_degree = 0;      // cap on bracket component degree, 0 = off
};

// Involutive closure by bracket sweeps. New brackets are kept when they are
// not members of the module generated so far (exact Groebner membership);
// the state records whether the sweep ran to completion or was truncated by
// the depth, degree, or reduction budget.
inline Distribution involutive_closure(const Distribution& d, const ClosureOptions& opts = {}) {
  Distribution out;
  out.split = d.split;
  out.generators = d.generators;
  out.plane_dim = d.plane_dim;

  // A depth cap of zero forbids forming any bracket at all, so a multi
  // generator input is truncated before the sweep; a single generator has
  // no pairs and closes vacuously.
  if (opts.max_depth == 0 && d.generators.size() > 1) {
    out.closure_state = ClosureState::budget_exhausted;
    out.bracket_depth_reached = 0;
    out.gb_steps_used = 0;
    return out;
  }

  Budget budget{opts.gb_budget, 0};
  auto module_gens = [&]() {
    std::vector<FreeModuleElement> gens;
    gens.reserve(out.generators.size());
    for (const auto& g : out.generators) gens.push_back(g.field.as_module_element());
    return gens;
  };

  TermOrder order;
  ModuleBasis basis = buchberger(module_gens(), order, budget);
  auto truncated = [&](int depth_reached) {
    out.closure_state = ClosureState::budget_exhausted;
    out.bracket_depth_reached = depth_reached;
    out.gb_steps_used = budget.used;
  };
  if (!basis.is_groebner) {
    truncated(0);
    return out;
  }

  std::deque<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < out.generators.size(); ++i)
    for (std::size_t j = i + 1; j < out.generators.size(); ++j) pairs.emplace_back(i, j);

  int depth_reached = 0;
  while (!pairs.empty()) {
    const auto [i, j] = pairs.front();
    pairs.pop_front();
    const PAVectorField b = bracket(out.generators[i].field, out.generators[j].field);
    if (b.is_zero()) continue;
    const int depth = 1 + std::max(out.generators[i].depth, out.generators[j].depth);
    const ReduceResult red = reduce(b.as_module_element(), basis.generators, order, budget);
    if (!red.complete) {
      truncated(depth_reached);
      return out;
    }
    if (red.remainder.is_zero()) continue;
    if (depth > opts.max_depth) {
      truncated(depth_reached);
      return out;
    }
    if (opts.max_degree > 0) {
      std::uint64_t full = 0;
      for (const auto& comp : b.components) {
        const auto dc = comp.degree();
        if (dc) full = std::max(full, *dc);
      }
      if (full > opts.max_degree) {
        truncated(depth_reached);
        return out;
      }
    }
    std::string prov =
        "[" + out.generators[i].provenance + "," + out.generators[j].provenance + "]";
    out.generators.push_back({b, depth, std::move(prov)});
    depth_reached = std::max(depth_reached, depth);
    const std::size_t k = out.generators.size() - 1;
    for (std::size_t t = 0; t < k; ++t) pairs.emplace_back(t, k);
    basis = buchberger(module_gens(), order, budget);
    if (!basis.is_groebner) {
      truncated(depth_reached);
      return out;
    }
  }
  out.closure_state = ClosureState::closed;
  out.bracket_depth_reached = depth_reached;
  out.gb_steps_used = budget.used;
  return out;
}

// Certificate that every pairwise bracket lies in the module span of the
// generators. Exact; used to audit closures independently of how they were
// produced.
inline bool closure_certificate(const Distribution& d, std::uint64_t gb_budget = 0) {
  Budget budget{gb_budget, 0};
  std::vector<FreeModuleElement> gens;
  gens.reserve(d.generators.size());
  for (const auto& g : d.generators) gens.push_back(g.field.as_module_element());
  TermOrder order;
  ModuleBasis basis = buchberger(gens, order, budget);
  if (!basis.is_groebner) return false;
  for (std::size_t i = 0; i < d.generators.size(); ++i)
    for (std::size_t j = i + 1; j < d.generators.size(); ++j) {
      const PAVectorField b = bracket(d.generators[i].field, d.generators[j].field);
      if (!member(b.as_module_element(), basis)) return false;
    }
  return true;
}

namespace detail {

inline void index_subsets(std::size_t n, std::size_t k,
                          const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// Degeneracy locus of a closed distribution: the fiberwise algebraic set
// where all (plane_dim+1)-minors of the generator evaluation matrix vanish,
// i.e. where the closure still has the plane dimension of the input. For a
// truncated closure the result is only an outer approximation and is
// flagged as such.
inline FwSet dinfty(const Distribution& closure) {
  if (closure.closure_state == ClosureState::raw)
    throw std::invalid_argument("dinfty: distribution has not been closed");
  if (!closure.plane_dim)
    throw std::invalid_argument("dinfty: closure carries no plane_dim");
  const std::size_t d = static_cast<std::size_t>(*closure.plane_dim);
  const std::size_t k = closure.generators.size();
  const std::size_t cols = static_cast<std::size_t>(closure.split.total());
  const bool outer = closure.closure_state == ClosureState::budget_exhausted;
  if (k <= d || cols <= d) return FwSet(closure.split, {}, outer);

  std::vector<std::vector<GradedPolynomial>> mat;
  mat.reserve(k);
  for (const auto& g : closure.generators) {
    std::vector<GradedPolynomial> row;
    row.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c)
      row.push_back(g.field.components[c]);
    mat.push_back(std::move(row));
  }

  std::vector<GradedPolynomial> equations;
  std::set<std::string> seen;
  detail::index_subsets(k, d + 1, [&](const std::vector<std::size_t>& rows) {
    detail::index_subsets(cols, d + 1, [&](const std::vector<std::size_t>& cs) {
      std::vector<std::vector<GradedPolynomial>> sub;
      sub.reserve(rows.size());
      for (const std::size_t r : rows) {
        std::vector<GradedPolynomial> row;
        row.reserve(cs.size());
        for (const std::size_t c : cs) row.push_back(mat[r][c]);
        sub.push_back(std::move(row));
      }
      GradedPolynomial det = poly_det(sub);
      if (det.is_zero()) return;
      if (seen.insert(det.str()).second) equations.push_back(std::move(det));
    });
  });
  return FwSet(closure.split, std::move(equations), outer);
}

struct RankProfile {
  std::vector<int> ranks;
  int min_rank = 0;
  int max_rank = 0;
  bool constant = true;
};

inline RankProfile rank_profile(const Distribution& d,
                                const std::vector<std::vector<Rational>>& samples) {
  if (samples.empty()) throw std::invalid_argument("rank_profile: no samples");
  RankProfile rp;
  rp.ranks.reserve(samples.size());
  for (const auto& p : samples) rp.ranks.push_back(evaluation_rank(d, p));
  rp.min_rank = *std::min_element(rp.ranks.begin(), rp.ranks.end());
  rp.max_rank = *std::max_element(rp.ranks.begin(), rp.ranks.end());
  rp.constant = rp.min_rank == rp.max_rank;
  return rp;
}

}  // namespace involute
