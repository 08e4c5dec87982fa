#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "involute/groebner.hpp"
#include "involute/polynomial.hpp"

namespace involute {

// Increasing chain of ideals over a base-only split: stage k's generator
// list reappears verbatim at the head of stage k+1.
struct IdealChain {
  VarSplit split{1, 0};
  std::vector<std::vector<GradedPolynomial>> stages;

  IdealChain(const VarSplit& s, std::vector<std::vector<GradedPolynomial>> st)
      : split(s), stages(std::move(st)) {
    if (split.m != 0)
      throw std::invalid_argument("IdealChain: needs a base-only split (m = 0)");
    if (stages.empty()) throw std::invalid_argument("IdealChain: no stages");
    for (const auto& stage : stages)
      for (const auto& p : stage)
        require_same_split(split, p.split(), "IdealChain");
    for (std::size_t k = 1; k < stages.size(); ++k) {
      if (stages[k].size() < stages[k - 1].size())
        throw std::invalid_argument("IdealChain: stages must grow");
      for (std::size_t i = 0; i < stages[k - 1].size(); ++i)
        if (!(stages[k][i] == stages[k - 1][i]))
          throw std::invalid_argument(
              "IdealChain: stage " + std::to_string(k + 1) +
              " does not extend stage " + std::to_string(k) + " verbatim");
    }
  }
};

enum class StageTriviality { unit, zero, nontrivial };

inline const char* to_string(StageTriviality t) {
  switch (t) {
    case StageTriviality::unit: return "unit";
    case StageTriviality::zero: return "zero";
    default: return "nontrivial";
  }
}

struct StationarityReport {
  // classification[sample][stage]
  std::vector<std::vector<StageTriviality>> classification;
  // 1-based index of the first stage whose ideal already contains every
  // later stage. The last stage qualifies vacuously, so this always exists
  // when the budget holds out.
  int stationarity_index = 0;
  bool budget_exhausted = false;
  // Samples where every stage is locally trivial or already past the
  // stationarity index.
  std::vector<std::size_t> settled_samples;
  // Locality scale attached to "unit" witnesses: a generator nonzero at the
  // sample stays nonzero on some neighborhood; this echoes the radius the
  // caller declared for that claim.
  Rational neighborhood_radius{0};
  std::uint64_t gb_steps = 0;
};

// Desk-scale shadow of local stationarity for ideal chains: classifies each
// stage at each sample ("unit" when a generator is nonzero at the point,
// "zero" when the stage is identically zero) and finds the first stage after
// which the chain stops growing as an ideal.
inline StationarityReport chain_stationarity(const IdealChain& chain,
                                             const std::vector<std::vector<Rational>>& samples,
                                             const Rational& neighborhood_radius,
                                             Budget& budget) {
  if (neighborhood_radius.sign() <= 0)
    throw std::invalid_argument("chain_stationarity: radius must be positive");
  for (const auto& y : samples)
    if (static_cast<int>(y.size()) != chain.split.total())
      throw std::invalid_argument("chain_stationarity: sample width mismatch");

  StationarityReport rep;
  rep.neighborhood_radius = neighborhood_radius;
  const std::size_t stage_count = chain.stages.size();

  rep.classification.resize(samples.size());
  for (std::size_t si = 0; si < samples.size(); ++si) {
    auto& row = rep.classification[si];
    row.reserve(stage_count);
    for (const auto& stage : chain.stages) {
      bool all_zero_polys = true;
      bool unit_witness = false;
      for (const auto& p : stage) {
        if (!p.is_zero()) all_zero_polys = false;
        if (!p.eval(samples[si]).is_zero()) {
          unit_witness = true;
          break;
        }
      }
      if (unit_witness)
        row.push_back(StageTriviality::unit);
      else if (all_zero_polys)
        row.push_back(StageTriviality::zero);
      else
        row.push_back(StageTriviality::nontrivial);
    }
  }

  // Stationarity: smallest s with gens(stage j) in ideal(stage s) for all
  // j > s. The chain is increasing, so testing each later stage against
  // stage s's basis is enough.
  rep.stationarity_index = static_cast<int>(stage_count);
  for (std::size_t s = 0; s < stage_count; ++s) {
    bool nonzero_stage = false;
    for (const auto& p : chain.stages[s])
      if (!p.is_zero()) nonzero_stage = true;
    bool stationary = true;
    if (!nonzero_stage) {
      // Ideal (0): later stages must all be zero too.
      for (std::size_t j = s + 1; j < stage_count && stationary; ++j)
        for (const auto& p : chain.stages[j])
          if (!p.is_zero()) stationary = false;
    } else {
      ModuleBasis basis = ideal_basis(chain.stages[s], TermOrder{}, budget);
      rep.gb_steps = budget.used;
      if (!basis.is_groebner) {
        rep.budget_exhausted = true;
        rep.stationarity_index = 0;
        return rep;
      }
      for (std::size_t j = s + 1; j < stage_count && stationary; ++j)
        for (const auto& p : chain.stages[j])
          if (!ideal_member(p, basis)) {
            stationary = false;
            break;
          }
    }
    if (stationary) {
      rep.stationarity_index = static_cast<int>(s + 1);
      break;
    }
  }
  rep.gb_steps = budget.used;

  for (std::size_t si = 0; si < samples.size(); ++si) {
    bool settled = true;
    for (std::size_t st = 0; st < stage_count; ++st) {
      const bool trivial = rep.classification[si][st] != StageTriviality::nontrivial;
      const bool past_stationary = static_cast<int>(st + 1) >= rep.stationarity_index;
      if (!trivial && !past_stationary) {
        settled = false;
        break;
      }
    }
    if (settled) rep.settled_samples.push_back(si);
  }
  return rep;
}

inline StationarityReport chain_stationarity(
    const IdealChain& chain, const std::vector<std::vector<Rational>>& samples,
    const Rational& neighborhood_radius) {
  Budget unlimited;
  return chain_stationarity(chain, samples, neighborhood_radius, unlimited);
}

}  // namespace involute
