#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "involute/affine_chart.hpp"
#include "involute/distribution.hpp"
#include "involute/fiber_probe.hpp"
#include "involute/fw_set.hpp"
#include "involute/grassmann.hpp"
#include "involute/groebner.hpp"
#include "involute/ideal_chain.hpp"
#include "involute/isometry_scan.hpp"
#include "involute/leaf.hpp"
#include "involute/parse.hpp"
#include "involute/polynomial.hpp"
#include "involute/rational.hpp"
#include "involute/varsplit.hpp"
#include "involute/vector_field.hpp"

namespace involute {

// nlohmann::json keeps object keys sorted, which is what makes report
// output reproducible byte for byte.
using Json = nlohmann::json;

// Schema violation tagged with the JSON pointer of the offending value.
class JobError : public std::runtime_error {
 public:
  JobError(std::string pointer, const std::string& message)
      : std::runtime_error(message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

namespace jobio {

inline std::string pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

inline const Json& expect_object(const Json& j, const std::string& ptr) {
  if (!j.is_object())
    throw JobError(ptr, std::string("expected an object, got ") + j.type_name());
  return j;
}

inline const Json& expect_array(const Json& j, const std::string& ptr) {
  if (!j.is_array())
    throw JobError(ptr, std::string("expected an array, got ") + j.type_name());
  return j;
}

inline void reject_unknown(const Json& obj, const std::string& ptr,
                           std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known)
      throw JobError(ptr + "/" + pointer_token(it.key()),
                     "unknown field '" + it.key() + "'");
  }
}

inline const Json* find(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline const Json& expect_key(const Json& obj, const std::string& ptr, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw JobError(ptr, std::string("missing required field '") + key + "'");
  return *it;
}

inline long expect_int(const Json& j, const std::string& ptr,
                       long lo = std::numeric_limits<long>::min(),
                       long hi = std::numeric_limits<long>::max()) {
  if (!j.is_number_integer())
    throw JobError(ptr, std::string("expected an integer, got ") + j.type_name());
  const long v = j.get<long>();
  if (v < lo || v > hi)
    throw JobError(ptr, "value " + std::to_string(v) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
  return v;
}

inline std::uint64_t expect_u64(const Json& j, const std::string& ptr) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0)
    return static_cast<std::uint64_t>(j.get<long long>());
  throw JobError(ptr, std::string("expected a nonnegative integer, got ") + j.type_name());
}

inline double expect_number(const Json& j, const std::string& ptr) {
  if (!j.is_number())
    throw JobError(ptr, std::string("expected a number, got ") + j.type_name());
  return j.get<double>();
}

inline bool expect_bool(const Json& j, const std::string& ptr) {
  if (!j.is_boolean())
    throw JobError(ptr, std::string("expected a boolean, got ") + j.type_name());
  return j.get<bool>();
}

inline std::string expect_string(const Json& j, const std::string& ptr) {
  if (!j.is_string())
    throw JobError(ptr, std::string("expected a string, got ") + j.type_name());
  return j.get<std::string>();
}

inline Rational parse_rational(const Json& j, const std::string& ptr) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      return Rational::from_string(j.get<std::string>());
    } catch (const std::domain_error& e) {
      throw JobError(ptr, e.what());
    }
  }
  throw JobError(ptr, "expected an integer or a rational string like \"3/2\"");
}

inline std::vector<Rational> parse_point(const Json& j, const std::string& ptr, int width) {
  expect_array(j, ptr);
  if (width >= 0 && static_cast<int>(j.size()) != width)
    throw JobError(ptr, "expected " + std::to_string(width) + " coordinates, got " +
                            std::to_string(j.size()));
  std::vector<Rational> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_rational(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

inline std::vector<std::vector<Rational>> parse_points(const Json& j, const std::string& ptr,
                                                       int width) {
  expect_array(j, ptr);
  std::vector<std::vector<Rational>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_point(j[i], ptr + "/" + std::to_string(i), width));
  return out;
}

inline VarSplit parse_split(const Json& j, const std::string& ptr) {
  expect_object(j, ptr);
  reject_unknown(j, ptr, {"base", "fiber"});
  const long base = expect_int(expect_key(j, ptr, "base"), ptr + "/base", 0, 64);
  long fiber = 0;
  if (const Json* f = find(j, "fiber")) fiber = expect_int(*f, ptr + "/fiber", 0, 4096);
  try {
    return VarSplit(static_cast<int>(base), static_cast<int>(fiber));
  } catch (const std::invalid_argument& e) {
    throw JobError(ptr, e.what());
  }
}

inline GradedPolynomial parse_job_poly(const Json& j, const std::string& ptr,
                                       const VarSplit& split) {
  if (!j.is_string())
    throw JobError(ptr, std::string("expected a polynomial string, got ") + j.type_name());
  try {
    return parse_poly(j.get<std::string>(), split);
  } catch (const ParseError& e) {
    throw JobError(ptr, e.what());
  }
}

inline std::vector<GradedPolynomial> parse_poly_list(const Json& j, const std::string& ptr,
                                                     const VarSplit& split) {
  expect_array(j, ptr);
  std::vector<GradedPolynomial> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_job_poly(j[i], ptr + "/" + std::to_string(i), split));
  return out;
}

inline std::vector<PAVectorField> parse_fields(const Json& j, const std::string& ptr,
                                               const VarSplit& split) {
  expect_array(j, ptr);
  if (j.empty()) throw JobError(ptr, "at least one field is required");
  std::vector<PAVectorField> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = ptr + "/" + std::to_string(i);
    const Json& fj = expect_object(j[i], p);
    reject_unknown(fj, p, {"name", "components"});
    std::string name = "V" + std::to_string(i + 1);
    if (const Json* n = find(fj, "name")) name = expect_string(*n, p + "/name");
    const Json& comps = expect_array(expect_key(fj, p, "components"), p + "/components");
    if (static_cast<int>(comps.size()) != split.total())
      throw JobError(p + "/components",
                     "expected " + std::to_string(split.total()) +
                         " components for the declared split, got " +
                         std::to_string(comps.size()));
    std::vector<GradedPolynomial> polys;
    polys.reserve(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k)
      polys.push_back(parse_job_poly(comps[k], p + "/components/" + std::to_string(k), split));
    out.emplace_back(split, std::move(polys), std::move(name));
  }
  return out;
}

inline bool parse_index_triple(const std::string& s, int& k, int& i, int& j) {
  int vals[3];
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int t = 0; t < 3; ++t) {
    const auto r = std::from_chars(p, end, vals[t]);
    if (r.ec != std::errc()) return false;
    p = r.ptr;
    if (t < 2) {
      if (p == end || *p != ',') return false;
      ++p;
    }
  }
  if (p != end) return false;
  k = vals[0];
  i = vals[1];
  j = vals[2];
  return true;
}

// Chart syntax: {"dim": n, "gamma": {"k,i,j": "poly in x1..xn"}, "metric":
// [[...]]}. Indices are 1-based; omitted symbols are zero; the lower pair is
// completed symmetrically and conflicting duplicates are rejected.
inline AffineChart parse_chart(const Json& j, const std::string& ptr) {
  expect_object(j, ptr);
  reject_unknown(j, ptr, {"dim", "gamma", "metric"});
  const int n = static_cast<int>(expect_int(expect_key(j, ptr, "dim"), ptr + "/dim", 1, 16));
  const VarSplit base(n, 0);
  std::vector<ChristoffelEntry> entries;
  if (const Json* g = find(j, "gamma")) {
    expect_object(*g, ptr + "/gamma");
    for (auto it = g->begin(); it != g->end(); ++it) {
      const std::string ep = ptr + "/gamma/" + pointer_token(it.key());
      int k = 0, a = 0, b = 0;
      if (!parse_index_triple(it.key(), k, a, b))
        throw JobError(ep, "key must look like \"k,i,j\" with 1-based indices");
      ChristoffelEntry e;
      e.k = k;
      e.i = a;
      e.j = b;
      e.value = parse_job_poly(it.value(), ep, base);
      entries.push_back(std::move(e));
    }
  }
  std::optional<std::vector<std::vector<GradedPolynomial>>> metric;
  if (const Json* m = find(j, "metric")) {
    const std::string mp = ptr + "/metric";
    expect_array(*m, mp);
    if (static_cast<int>(m->size()) != n)
      throw JobError(mp, "expected " + std::to_string(n) + " rows");
    std::vector<std::vector<GradedPolynomial>> rows;
    for (int r = 0; r < n; ++r) {
      const std::string rp = mp + "/" + std::to_string(r);
      const Json& row = expect_array((*m)[r], rp);
      if (static_cast<int>(row.size()) != n)
        throw JobError(rp, "expected " + std::to_string(n) + " entries");
      std::vector<GradedPolynomial> out_row;
      for (int c = 0; c < n; ++c)
        out_row.push_back(parse_job_poly(row[c], rp + "/" + std::to_string(c), base));
      rows.push_back(std::move(out_row));
    }
    metric = std::move(rows);
  }
  try {
    return AffineChart(n, entries, std::move(metric));
  } catch (const std::invalid_argument& e) {
    throw JobError(ptr, e.what());
  }
}

inline Json json_finite(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline Json rational_array(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(r.str());
  return out;
}

inline Json poly_array(const std::vector<GradedPolynomial>& v) {
  Json out = Json::array();
  for (const auto& p : v) out.push_back(p.str());
  return out;
}

inline Json to_json(const VarSplit& s) { return Json{{"base", s.n}, {"fiber", s.m}}; }

inline Json to_json(const PAVectorField& f) {
  return Json{{"name", f.name}, {"components", poly_array(f.components)}};
}

inline Json to_json(const Distribution& d) {
  Json gens = Json::array();
  for (const auto& g : d.generators)
    gens.push_back(Json{{"provenance", g.provenance},
                        {"depth", g.depth},
                        {"components", poly_array(g.field.components)}});
  Json out{{"split", to_json(d.split)},
           {"state", to_string(d.closure_state)},
           {"generators", gens},
           {"bracket_depth", d.bracket_depth_reached},
           {"gb_steps", d.gb_steps_used}};
  out["plane_dim"] = d.plane_dim ? Json(*d.plane_dim) : Json(nullptr);
  return out;
}

inline Json to_json(const FwSet& s) {
  return Json{{"split", to_json(s.split)},
              {"equations", poly_array(s.equations)},
              {"outer_approximation", s.outer_approximation},
              {"certified_empty", s.certified_empty()}};
}

inline Json to_json(const FiberWitness& w) {
  Json fl = Json::array();
  for (double v : w.floating) fl.push_back(json_finite(v));
  Json out{{"is_exact", w.is_exact},
           {"floating", fl},
           {"residual", json_finite(w.residual)}};
  out["exact"] = w.is_exact ? rational_array(w.exact) : Json(nullptr);
  return out;
}

inline Json to_json(const FiberProbeResult& r) {
  Json out{{"verdict", to_string(r.verdict)},
           {"note", r.note},
           {"best_residual", json_finite(r.best_residual)}};
  out["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return out;
}

inline Json to_json(const ProjectionReport& r) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    samples.push_back(Json{{"base_point", rational_array(r.samples[i])},
                           {"probe", to_json(r.results[i])}});
  return Json{{"samples", samples},
              {"count_nonempty", r.count_nonempty},
              {"count_empty_evidence", r.count_empty_evidence},
              {"count_certified_empty", r.count_certified_empty},
              {"count_unknown", r.count_unknown},
              {"nonempty_fraction", r.nonempty_fraction},
              {"dense_threshold", r.dense_threshold},
              {"dense_evidence", r.dense_evidence},
              {"strategy", to_string(r.strategy)},
              {"seed", r.seed},
              {"tolerance", r.tolerance}};
}

inline Json to_json(const TangencyReport& t) {
  return Json{{"max_angle", json_finite(t.max_angle)},
              {"mean_angle", json_finite(t.mean_angle)},
              {"tolerance", t.tolerance},
              {"pass", t.pass},
              {"grid_points", t.angles.size()},
              {"boundary_points", t.boundary_points},
              {"degenerate_points", t.degenerate_points}};
}

inline Json to_json(const StationarityReport& r) {
  Json cls = Json::array();
  for (const auto& row : r.classification) {
    Json jr = Json::array();
    for (const auto t : row) jr.push_back(to_string(t));
    cls.push_back(jr);
  }
  Json settled = Json::array();
  for (const auto s : r.settled_samples) settled.push_back(s);
  return Json{{"classification", cls},
              {"stationarity_index", r.stationarity_index},
              {"budget_exhausted", r.budget_exhausted},
              {"settled_samples", settled},
              {"neighborhood_radius", r.neighborhood_radius.str()},
              {"gb_steps", r.gb_steps}};
}

inline Json to_json(const TautologicalValidation& v) {
  return Json{{"flat_ok", v.flat_ok},
              {"identity_ok", v.identity_ok},
              {"geodesic_ok", v.geodesic_ok},
              {"geodesic_residual", json_finite(v.geodesic_residual)},
              {"endpoint_gap", json_finite(v.endpoint_gap)},
              {"blew_up", v.blew_up},
              {"tolerance", v.tolerance},
              {"pass", v.pass}};
}

inline Json to_json(const ScanReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs)
    pairs.push_back(Json{{"x", rational_array(p.pair.x)},
                         {"y", rational_array(p.pair.y)},
                         {"seed", p.seed},
                         {"probe", to_json(p.probe)}});
  Json points = Json::array();
  for (const auto& pt : r.points) points.push_back(rational_array(pt));
  Json classes = Json::array();
  for (const auto& cls : r.orbit_classes) {
    Json jc = Json::array();
    for (const auto idx : cls) jc.push_back(idx);
    classes.push_back(jc);
  }
  return Json{{"validation", to_json(r.validation)},
              {"closure_state", to_string(r.closure_state)},
              {"generator_count", r.generator_count},
              {"bracket_depth", r.bracket_depth},
              {"gb_steps", r.gb_steps},
              {"equation_count", r.equation_count},
              {"outer_approximation", r.outer_approximation},
              {"rabinowitsch", r.rabinowitsch},
              {"pairs", pairs},
              {"count_nonempty", r.count_nonempty},
              {"count_empty_evidence", r.count_empty_evidence},
              {"count_certified_empty", r.count_certified_empty},
              {"count_unknown", r.count_unknown},
              {"points", points},
              {"orbit_classes", classes}};
}

}  // namespace jobio
}  // namespace involute
