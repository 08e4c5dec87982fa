#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "involute/json_io.hpp"
#include "third_party/CLI11.hpp"

namespace {

using namespace involute;
namespace jb = involute::jobio;

constexpr const char* kToolName = "involute-cli";
constexpr const char* kToolVersion = "0.1.0";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> max_degree;
  std::optional<long> max_depth;
  std::optional<std::uint64_t> gb_budget;
  std::optional<long> samples;
  std::optional<double> tolerance;
  std::optional<std::string> strategy;
};

struct TaskOutput {
  Json config;
  Json report;
  Json work;
  bool truncated = false;
  std::string csv;  // side table, written when the job names a csv path
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json tool_stamp() { return Json{{"name", kToolName}, {"version", kToolVersion}}; }

ClosureOptions closure_from(const Json* params, const std::string& ptr, const Overrides& ov) {
  ClosureOptions o;
  if (params) {
    if (const Json* v = jb::find(*params, "max_depth"))
      o.max_depth = static_cast<int>(jb::expect_int(*v, ptr + "/max_depth", 0, 64));
    if (const Json* v = jb::find(*params, "gb_budget"))
      o.gb_budget = jb::expect_u64(*v, ptr + "/gb_budget");
    if (const Json* v = jb::find(*params, "max_degree"))
      o.max_degree = jb::expect_u64(*v, ptr + "/max_degree");
  }
  if (ov.max_depth) o.max_depth = static_cast<int>(*ov.max_depth);
  if (ov.gb_budget) o.gb_budget = *ov.gb_budget;
  if (ov.max_degree) o.max_degree = static_cast<std::uint64_t>(*ov.max_degree);
  return o;
}

Json closure_config(const ClosureOptions& o) {
  return Json{{"max_depth", o.max_depth},
              {"gb_budget", o.gb_budget},
              {"max_degree", o.max_degree}};
}

ProbeStrategy parse_strategy(const std::string& s, const std::string& ptr) {
  if (s == "linear") return ProbeStrategy::linear;
  if (s == "search") return ProbeStrategy::search;
  if (s == "grid") return ProbeStrategy::grid;
  throw JobError(ptr, "unknown strategy '" + s + "' (expected linear, search or grid)");
}

FiberProbeOptions probe_from(const Json* params, const std::string& ptr, const Overrides& ov,
                             int fiber_width) {
  FiberProbeOptions o;
  if (params) {
    if (const Json* v = jb::find(*params, "strategy"))
      o.strategy = parse_strategy(jb::expect_string(*v, ptr + "/strategy"), ptr + "/strategy");
    if (const Json* v = jb::find(*params, "tolerance"))
      o.tolerance = jb::expect_number(*v, ptr + "/tolerance");
    if (const Json* v = jb::find(*params, "attempts"))
      o.attempts = static_cast<int>(jb::expect_int(*v, ptr + "/attempts", 1, 100000));
    if (const Json* v = jb::find(*params, "max_iterations"))
      o.max_iterations = static_cast<int>(jb::expect_int(*v, ptr + "/max_iterations", 1, 1000000));
    if (const Json* v = jb::find(*params, "seed")) o.seed = jb::expect_u64(*v, ptr + "/seed");
    if (const Json* v = jb::find(*params, "box_low"))
      o.box_low = jb::expect_number(*v, ptr + "/box_low");
    if (const Json* v = jb::find(*params, "box_high"))
      o.box_high = jb::expect_number(*v, ptr + "/box_high");
    if (const Json* v = jb::find(*params, "grid_resolution"))
      o.grid_resolution = static_cast<int>(jb::expect_int(*v, ptr + "/grid_resolution", 2, 10000));
    if (const Json* v = jb::find(*params, "negative_threshold"))
      o.negative_threshold = jb::expect_number(*v, ptr + "/negative_threshold");
    if (const Json* v = jb::find(*params, "reconstruction_den_bound"))
      o.reconstruction_den_bound = jb::expect_u64(*v, ptr + "/reconstruction_den_bound");
    if (const Json* v = jb::find(*params, "preferred"))
      o.preferred = jb::parse_points(*v, ptr + "/preferred", fiber_width);
  }
  if (ov.seed) o.seed = *ov.seed;
  if (ov.tolerance) o.tolerance = *ov.tolerance;
  if (ov.strategy) o.strategy = parse_strategy(*ov.strategy, ptr + "/strategy");
  return o;
}

Json probe_config(const FiberProbeOptions& o) {
  return Json{{"strategy", to_string(o.strategy)},
              {"tolerance", o.tolerance},
              {"attempts", o.attempts},
              {"max_iterations", o.max_iterations},
              {"seed", o.seed},
              {"box_low", o.box_low},
              {"box_high", o.box_high},
              {"grid_resolution", o.grid_resolution},
              {"negative_threshold", o.negative_threshold},
              {"reconstruction_den_bound", o.reconstruction_den_bound},
              {"preferred_count", o.preferred.size()}};
}

void require_seed(const Json* params, const Overrides& ov, const std::string& task) {
  if (ov.seed) return;
  if (params && jb::find(*params, "seed")) return;
  throw JobError("/params/seed",
                 "task '" + task + "' is randomized: give params.seed or pass --seed");
}

const Json* optional_params(const Json& job) { return jb::find(job, "params"); }

void check_params_keys(const Json* params, std::initializer_list<const char*> allowed) {
  if (!params) return;
  jb::expect_object(*params, "/params");
  jb::reject_unknown(*params, "/params", allowed);
}

struct FieldSetup {
  VarSplit split{1, 0};
  std::vector<PAVectorField> fields;
  Distribution dist;
};

FieldSetup parse_field_setup(const Json& job) {
  FieldSetup fs;
  fs.split = jb::parse_split(jb::expect_key(job, "", "split"), "/split");
  fs.fields = jb::parse_fields(jb::expect_key(job, "", "fields"), "/fields", fs.split);
  std::vector<PAVectorField> chosen = fs.fields;
  std::optional<int> plane_dim;
  if (const Json* dj = jb::find(job, "distribution")) {
    jb::expect_object(*dj, "/distribution");
    jb::reject_unknown(*dj, "/distribution", {"generators", "plane_dim"});
    if (const Json* gj = jb::find(*dj, "generators")) {
      jb::expect_array(*gj, "/distribution/generators");
      chosen.clear();
      for (std::size_t i = 0; i < gj->size(); ++i) {
        const std::string p = "/distribution/generators/" + std::to_string(i);
        const std::string name = jb::expect_string((*gj)[i], p);
        bool found = false;
        for (const auto& f : fs.fields) {
          if (f.name == name) {
            chosen.push_back(f);
            found = true;
            break;
          }
        }
        if (!found) throw JobError(p, "no declared field is named '" + name + "'");
      }
    }
    if (const Json* pj = jb::find(*dj, "plane_dim"))
      plane_dim = static_cast<int>(
          jb::expect_int(*pj, "/distribution/plane_dim", 1, fs.split.total()));
  }
  try {
    fs.dist = make_distribution(fs.split, std::move(chosen), plane_dim);
  } catch (const std::invalid_argument& e) {
    throw JobError("/distribution", e.what());
  }
  return fs;
}

TaskOutput run_bracket_closure(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "", {"version", "task", "split", "fields", "distribution", "params"});
  FieldSetup fs = parse_field_setup(job);
  const Json* params = optional_params(job);
  check_params_keys(params, {"max_depth", "gb_budget", "max_degree"});
  const ClosureOptions opts = closure_from(params, "/params", ov);
  const Distribution cl = involutive_closure(fs.dist, opts);
  TaskOutput out;
  out.config = Json{{"split", jb::to_json(fs.split)}, {"closure", closure_config(opts)}};
  out.report = Json{{"closure", jb::to_json(cl)}};
  out.work = Json{{"gb_steps", cl.gb_steps_used},
                  {"bracket_depth", cl.bracket_depth_reached},
                  {"generator_count", cl.generators.size()}};
  out.truncated = cl.closure_state == ClosureState::budget_exhausted;
  return out;
}

TaskOutput run_dinfty(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "", {"version", "task", "split", "fields", "distribution", "params"});
  FieldSetup fs = parse_field_setup(job);
  if (!fs.dist.plane_dim)
    throw JobError("/distribution", "task 'dinfty' needs a declared plane_dim");
  const Json* params = optional_params(job);
  check_params_keys(params, {"max_depth", "gb_budget", "max_degree"});
  const ClosureOptions opts = closure_from(params, "/params", ov);
  const Distribution cl = involutive_closure(fs.dist, opts);
  const FwSet locus = dinfty(cl);
  TaskOutput out;
  out.config = Json{{"split", jb::to_json(fs.split)}, {"closure", closure_config(opts)}};
  out.report = Json{{"closure", jb::to_json(cl)}, {"locus", jb::to_json(locus)}};
  out.work = Json{{"gb_steps", cl.gb_steps_used},
                  {"bracket_depth", cl.bracket_depth_reached},
                  {"generator_count", cl.generators.size()},
                  {"equation_count", locus.equations.size()}};
  out.truncated = locus.outer_approximation;
  return out;
}

std::string leaf_csv(const LeafChart& chart) {
  std::ostringstream os;
  const int rank = chart.dim();
  os << "index";
  for (int a = 1; a <= rank; ++a) os << ",k" << a;
  for (int i = 0; i < chart.split.total(); ++i) os << "," << chart.split.var_name(i);
  os << "\n";
  for (std::size_t idx = 0; idx < chart.grid.size(); ++idx) {
    os << idx;
    std::size_t rem = idx;
    std::vector<std::size_t> multi(rank, 0);
    for (int a = rank - 1; a >= 0; --a) {
      multi[static_cast<std::size_t>(a)] = rem % static_cast<std::size_t>(chart.resolution);
      rem /= static_cast<std::size_t>(chart.resolution);
    }
    for (int a = 0; a < rank; ++a) os << "," << multi[static_cast<std::size_t>(a)];
    for (double v : chart.grid[idx]) os << "," << fmt_double(v);
    os << "\n";
  }
  return os.str();
}

TaskOutput run_leaf(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "",
                     {"version", "task", "split", "fields", "distribution", "params", "csv"});
  FieldSetup fs = parse_field_setup(job);
  const Json* params = optional_params(job);
  check_params_keys(params, {"center", "box", "resolution", "h", "blowup_guard", "tolerance",
                             "sv_rel", "max_depth", "gb_budget", "max_degree"});
  if (!params) throw JobError("", "missing required field 'params'");
  const ClosureOptions copts = closure_from(params, "/params", ov);

  const std::vector<Rational> center =
      jb::parse_point(jb::expect_key(*params, "/params", "center"), "/params/center",
                      fs.split.total());
  const Json& bj = jb::expect_array(jb::expect_key(*params, "/params", "box"), "/params/box");
  std::vector<std::pair<double, double>> box;
  for (std::size_t i = 0; i < bj.size(); ++i) {
    const std::string bp = "/params/box/" + std::to_string(i);
    jb::expect_array(bj[i], bp);
    if (bj[i].size() != 2) throw JobError(bp, "expected [low, high]");
    box.emplace_back(jb::expect_number(bj[i][0], bp + "/0"),
                     jb::expect_number(bj[i][1], bp + "/1"));
  }
  int resolution = 21;
  double h = 1e-3, guard = 1e9, tolerance = 1e-6, sv_rel = 1e-8;
  if (const Json* v = jb::find(*params, "resolution"))
    resolution = static_cast<int>(jb::expect_int(*v, "/params/resolution", 2, 4096));
  if (const Json* v = jb::find(*params, "h")) h = jb::expect_number(*v, "/params/h");
  if (const Json* v = jb::find(*params, "blowup_guard"))
    guard = jb::expect_number(*v, "/params/blowup_guard");
  if (const Json* v = jb::find(*params, "tolerance"))
    tolerance = jb::expect_number(*v, "/params/tolerance");
  if (const Json* v = jb::find(*params, "sv_rel"))
    sv_rel = jb::expect_number(*v, "/params/sv_rel");
  if (ov.tolerance) tolerance = *ov.tolerance;

  const Distribution cl = involutive_closure(fs.dist, copts);
  if (cl.closure_state != ClosureState::closed)
    throw std::runtime_error(
        "leaf task: bracket closure was truncated before completing; raise max_depth, "
        "gb_budget or max_degree");
  LeafChart chart;
  try {
    chart = build_leaf(cl, center, box, resolution, h, guard);
  } catch (const std::invalid_argument& e) {
    throw JobError("/params", e.what());
  }

  TaskOutput out;
  out.config = Json{{"split", jb::to_json(fs.split)},
                    {"closure", closure_config(copts)},
                    {"resolution", resolution},
                    {"h", h},
                    {"blowup_guard", guard},
                    {"tolerance", tolerance},
                    {"sv_rel", sv_rel}};
  Json leaf_meta{{"complete", chart.complete},
                 {"rank_locally_constant", chart.rank_locally_constant},
                 {"dim", chart.dim()},
                 {"grid_points", chart.grid.size()}};
  Json tang = nullptr;
  if (chart.complete) tang = jb::to_json(verify_tangency(chart, cl, tolerance, sv_rel));
  out.report = Json{{"closure", jb::to_json(cl)}, {"leaf", leaf_meta}, {"tangency", tang}};
  out.work = Json{{"gb_steps", cl.gb_steps_used},
                  {"bracket_depth", cl.bracket_depth_reached},
                  {"grid_points", chart.grid.size()}};
  out.truncated = !chart.complete;
  out.csv = leaf_csv(chart);
  return out;
}

FreeModuleElement parse_element(const Json& j, const std::string& ptr, const VarSplit& split,
                                int rank) {
  if (j.is_string()) {
    if (rank != 1) throw JobError(ptr, "a bare polynomial string needs rank 1");
    return as_module_element(jb::parse_job_poly(j, ptr, split));
  }
  jb::expect_array(j, ptr);
  if (static_cast<int>(j.size()) != rank)
    throw JobError(ptr, "expected " + std::to_string(rank) + " components, got " +
                            std::to_string(j.size()));
  std::vector<GradedPolynomial> comps;
  comps.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k)
    comps.push_back(jb::parse_job_poly(j[k], ptr + "/" + std::to_string(k), split));
  return FreeModuleElement(std::move(comps));
}

TaskOutput run_groebner(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "",
                     {"version", "task", "split", "rank", "generators", "queries", "params"});
  const VarSplit split = jb::parse_split(jb::expect_key(job, "", "split"), "/split");
  int rank = 1;
  if (const Json* rj = jb::find(job, "rank"))
    rank = static_cast<int>(jb::expect_int(*rj, "/rank", 1, 64));

  const Json* params = optional_params(job);
  check_params_keys(params, {"gb_budget", "order"});
  TermOrder ord;
  std::uint64_t gb_budget = 0;
  if (params) {
    if (const Json* v = jb::find(*params, "gb_budget"))
      gb_budget = jb::expect_u64(*v, "/params/gb_budget");
    if (const Json* oj = jb::find(*params, "order")) {
      jb::expect_object(*oj, "/params/order");
      jb::reject_unknown(*oj, "/params/order", {"monomial", "position"});
      if (const Json* mj = jb::find(*oj, "monomial")) {
        const std::string m = jb::expect_string(*mj, "/params/order/monomial");
        if (m == "grevlex")
          ord.mono = MonoOrder::grevlex;
        else if (m == "lex")
          ord.mono = MonoOrder::lex;
        else
          throw JobError("/params/order/monomial", "expected \"grevlex\" or \"lex\"");
      }
      if (const Json* pj = jb::find(*oj, "position")) {
        const std::string p = jb::expect_string(*pj, "/params/order/position");
        if (p == "position-over-term")
          ord.rule = PositionRule::position_over_term;
        else if (p == "term-over-position")
          ord.rule = PositionRule::term_over_position;
        else
          throw JobError("/params/order/position",
                         "expected \"position-over-term\" or \"term-over-position\"");
      }
    }
  }
  if (ov.gb_budget) gb_budget = *ov.gb_budget;

  const Json& gj = jb::expect_array(jb::expect_key(job, "", "generators"), "/generators");
  if (gj.empty()) throw JobError("/generators", "at least one generator is required");
  std::vector<FreeModuleElement> gens;
  gens.reserve(gj.size());
  for (std::size_t i = 0; i < gj.size(); ++i)
    gens.push_back(parse_element(gj[i], "/generators/" + std::to_string(i), split, rank));

  Budget budget{gb_budget, 0};
  const ModuleBasis basis = buchberger(gens, ord, budget);

  Json jgens = Json::array();
  for (const auto& g : basis.generators) jgens.push_back(jb::poly_array(g.components()));
  Json queries = Json::array();
  if (const Json* qj = jb::find(job, "queries")) {
    jb::expect_array(*qj, "/queries");
    for (std::size_t i = 0; i < qj->size(); ++i) {
      const FreeModuleElement q =
          parse_element((*qj)[i], "/queries/" + std::to_string(i), split, rank);
      const ReduceResult rr = reduce(q, basis.generators, basis.order);
      Json entry{{"remainder", jb::poly_array(rr.remainder.components())}};
      if (basis.is_groebner && rr.complete)
        entry["member"] = rr.remainder.is_zero();
      else {
        entry["member"] = nullptr;
        entry["note"] = "membership is undecided on a partial basis";
      }
      queries.push_back(std::move(entry));
    }
  }

  TaskOutput out;
  out.config = Json{{"split", jb::to_json(split)},
                    {"rank", rank},
                    {"gb_budget", gb_budget},
                    {"order",
                     Json{{"monomial", ord.mono == MonoOrder::grevlex ? "grevlex" : "lex"},
                          {"position", ord.rule == PositionRule::position_over_term
                                           ? "position-over-term"
                                           : "term-over-position"}}}};
  out.report = Json{{"basis",
                     Json{{"generators", jgens},
                          {"groebner", basis.is_groebner},
                          {"steps", basis.steps_used}}},
                    {"queries", queries}};
  out.work = Json{{"gb_steps", basis.steps_used}, {"basis_size", basis.generators.size()}};
  out.truncated = !basis.is_groebner;
  return out;
}

TaskOutput run_chain(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "", {"version", "task", "split", "stages", "samples", "params"});
  const VarSplit split = jb::parse_split(jb::expect_key(job, "", "split"), "/split");
  const Json& sj = jb::expect_array(jb::expect_key(job, "", "stages"), "/stages");
  if (sj.empty()) throw JobError("/stages", "at least one stage is required");
  std::vector<std::vector<GradedPolynomial>> stages;
  stages.reserve(sj.size());
  for (std::size_t i = 0; i < sj.size(); ++i)
    stages.push_back(jb::parse_poly_list(sj[i], "/stages/" + std::to_string(i), split));

  const Json* params = optional_params(job);
  check_params_keys(params, {"radius", "gb_budget"});
  Rational radius(1, 10);
  std::uint64_t gb_budget = 0;
  if (params) {
    if (const Json* v = jb::find(*params, "radius"))
      radius = jb::parse_rational(*v, "/params/radius");
    if (const Json* v = jb::find(*params, "gb_budget"))
      gb_budget = jb::expect_u64(*v, "/params/gb_budget");
  }
  if (ov.gb_budget) gb_budget = *ov.gb_budget;

  const std::vector<std::vector<Rational>> samples =
      jb::parse_points(jb::expect_key(job, "", "samples"), "/samples", split.total());
  if (samples.empty()) throw JobError("/samples", "at least one sample is required");

  const IdealChain chain = [&] {
    try {
      return IdealChain(split, std::move(stages));
    } catch (const std::invalid_argument& e) {
      throw JobError("/stages", e.what());
    }
  }();
  Budget budget{gb_budget, 0};
  StationarityReport rep;
  try {
    rep = chain_stationarity(chain, samples, radius, budget);
  } catch (const std::invalid_argument& e) {
    throw JobError("/params/radius", e.what());
  }

  TaskOutput out;
  out.config = Json{{"split", jb::to_json(split)},
                    {"radius", radius.str()},
                    {"gb_budget", gb_budget},
                    {"stage_count", chain.stages.size()},
                    {"sample_count", samples.size()}};
  out.report = jb::to_json(rep);
  out.work = Json{{"gb_steps", rep.gb_steps}};
  out.truncated = rep.budget_exhausted;
  return out;
}

std::string probe_csv(const ProjectionReport& rep) {
  std::ostringstream os;
  os << "index";
  if (!rep.samples.empty())
    for (std::size_t i = 0; i < rep.samples[0].size(); ++i) os << ",x" << (i + 1);
  os << ",verdict,best_residual\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    os << i;
    for (const auto& c : rep.samples[i]) os << "," << c.str();
    os << "," << to_string(rep.results[i].verdict) << ","
       << fmt_double(rep.results[i].best_residual) << "\n";
  }
  return os.str();
}

TaskOutput run_projection_probe(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "", {"version", "task", "split", "set", "samples", "params", "csv"});
  const VarSplit split = jb::parse_split(jb::expect_key(job, "", "split"), "/split");
  const Json& setj = jb::expect_object(jb::expect_key(job, "", "set"), "/set");
  jb::reject_unknown(setj, "/set", {"positive", "negative"});
  std::vector<GradedPolynomial> positive =
      jb::parse_poly_list(jb::expect_key(setj, "/set", "positive"), "/set/positive", split);
  std::vector<GradedPolynomial> negative;
  if (const Json* nj = jb::find(setj, "negative"))
    negative = jb::parse_poly_list(*nj, "/set/negative", split);
  const FwConstructible c(FwSet(split, std::move(positive)), std::move(negative));

  const Json* params = optional_params(job);
  check_params_keys(params,
                    {"strategy", "tolerance", "attempts", "max_iterations", "seed", "box_low",
                     "box_high", "grid_resolution", "negative_threshold",
                     "reconstruction_den_bound", "preferred", "dense_threshold"});
  require_seed(params, ov, "projection-probe");
  const FiberProbeOptions popts = probe_from(params, "/params", ov, split.m);
  double dense_threshold = 0.9;
  if (params)
    if (const Json* v = jb::find(*params, "dense_threshold"))
      dense_threshold = jb::expect_number(*v, "/params/dense_threshold");

  const Json& sj = jb::expect_key(job, "", "samples");
  std::vector<std::vector<Rational>> samples;
  if (sj.is_array()) {
    if (ov.samples) throw JobError("/samples", "--samples cannot override an explicit list");
    samples = jb::parse_points(sj, "/samples", split.n);
    if (samples.empty()) throw JobError("/samples", "at least one sample is required");
  } else if (sj.is_object()) {
    jb::reject_unknown(sj, "/samples", {"count"});
    long count = jb::expect_int(jb::expect_key(sj, "/samples", "count"), "/samples/count", 1,
                                1000000);
    if (ov.samples) count = *ov.samples;
    samples = sample_base_points(split, static_cast<int>(count), popts.seed);
  } else {
    throw JobError("/samples", "expected an array of base points or {\"count\": N}");
  }

  const ProjectionReport rep = projection_probe(c, samples, popts, dense_threshold);

  TaskOutput out;
  out.config = Json{{"split", jb::to_json(split)},
                    {"probe", probe_config(popts)},
                    {"dense_threshold", dense_threshold},
                    {"sample_count", samples.size()}};
  out.report = jb::to_json(rep);
  out.work = Json{{"samples", samples.size()},
                  {"equations", c.positive.equations.size() + c.negative.size()}};
  out.csv = probe_csv(rep);
  return out;
}

std::string scan_csv(const ScanReport& rep, int n) {
  std::ostringstream os;
  os << "index";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= n; ++i) os << ",y" << i;
  os << ",verdict,seed\n";
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const auto& p = rep.pairs[i];
    os << i;
    for (const auto& c : p.pair.x) os << "," << c.str();
    for (const auto& c : p.pair.y) os << "," << c.str();
    os << "," << to_string(p.probe.verdict) << "," << p.seed << "\n";
  }
  return os.str();
}

TaskOutput run_isometry_scan(const Json& job, const Overrides& ov) {
  jb::reject_unknown(job, "",
                     {"version", "task", "source", "target", "constraints", "pairs", "params",
                      "csv"});
  const AffineChart source = jb::parse_chart(jb::expect_key(job, "", "source"), "/source");
  AffineChart target = source;
  if (const Json* tj = jb::find(job, "target")) target = jb::parse_chart(*tj, "/target");
  GrStarChart g(source, target);
  const int n = g.dim();

  ConstraintOptions copts;
  if (const Json* cj = jb::find(job, "constraints")) {
    jb::expect_object(*cj, "/constraints");
    jb::reject_unknown(*cj, "/constraints", {"isotropy", "unimodular"});
    if (const Json* v = jb::find(*cj, "isotropy"))
      copts.isotropy = jb::expect_bool(*v, "/constraints/isotropy");
    if (const Json* v = jb::find(*cj, "unimodular"))
      copts.unimodular = jb::expect_bool(*v, "/constraints/unimodular");
  }
  ConstraintPack pack;
  try {
    pack = build_constraints(g, copts);
  } catch (const std::invalid_argument& e) {
    throw JobError("/constraints", e.what());
  }

  const Json* params = optional_params(job);
  check_params_keys(params,
                    {"max_depth", "gb_budget", "max_degree", "strategy", "tolerance", "attempts",
                     "max_iterations", "seed", "box_low", "box_high", "grid_resolution",
                     "negative_threshold", "reconstruction_den_bound", "preferred",
                     "use_rabinowitsch", "validation_h", "validation_tolerance"});
  require_seed(params, ov, "isometry-scan");
  ScanOptions sopts;
  sopts.closure = closure_from(params, "/params", ov);
  sopts.probe = probe_from(params, "/params", ov, n * n);
  if (params) {
    if (const Json* v = jb::find(*params, "use_rabinowitsch"))
      sopts.use_rabinowitsch = jb::expect_bool(*v, "/params/use_rabinowitsch");
    if (const Json* v = jb::find(*params, "validation_h"))
      sopts.validation_h = jb::expect_number(*v, "/params/validation_h");
    if (const Json* v = jb::find(*params, "validation_tolerance"))
      sopts.validation_tolerance = jb::expect_number(*v, "/params/validation_tolerance");
  }

  const Json& pj = jb::expect_key(job, "", "pairs");
  std::vector<PairSample> pairs;
  if (pj.is_array()) {
    if (ov.samples) throw JobError("/pairs", "--samples cannot override an explicit list");
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const std::string pp = "/pairs/" + std::to_string(i);
      const Json& e = jb::expect_object(pj[i], pp);
      jb::reject_unknown(e, pp, {"x", "y"});
      PairSample ps;
      ps.x = jb::parse_point(jb::expect_key(e, pp, "x"), pp + "/x", n);
      ps.y = jb::parse_point(jb::expect_key(e, pp, "y"), pp + "/y", n);
      pairs.push_back(std::move(ps));
    }
    if (pairs.empty()) throw JobError("/pairs", "at least one pair is required");
  } else if (pj.is_object()) {
    jb::reject_unknown(pj, "/pairs", {"count"});
    long count =
        jb::expect_int(jb::expect_key(pj, "/pairs", "count"), "/pairs/count", 1, 100000);
    if (ov.samples) count = *ov.samples;
    const auto pts =
        sample_base_points(VarSplit(n, 0), static_cast<int>(2 * count), sopts.probe.seed);
    for (long i = 0; i < count; ++i) {
      PairSample ps;
      ps.x = pts[static_cast<std::size_t>(2 * i)];
      ps.y = pts[static_cast<std::size_t>(2 * i + 1)];
      pairs.push_back(std::move(ps));
    }
  } else {
    throw JobError("/pairs", "expected an array of {\"x\", \"y\"} pairs or {\"count\": N}");
  }

  const ScanReport rep = isometry_scan(g, pack, pairs, sopts);

  TaskOutput out;
  out.config = Json{{"dim", n},
                    {"closure", closure_config(sopts.closure)},
                    {"probe", probe_config(sopts.probe)},
                    {"isotropy", copts.isotropy},
                    {"unimodular", copts.unimodular},
                    {"use_rabinowitsch", sopts.use_rabinowitsch},
                    {"validation_h", sopts.validation_h},
                    {"validation_tolerance", sopts.validation_tolerance},
                    {"pair_count", pairs.size()}};
  out.report = jb::to_json(rep);
  out.work = Json{{"pairs", pairs.size()},
                  {"gb_steps", rep.gb_steps},
                  {"equation_count", rep.equation_count}};
  out.truncated =
      rep.outer_approximation || rep.closure_state == ClosureState::budget_exhausted;
  out.csv = scan_csv(rep, n);
  return out;
}

int write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << kToolName << ": cannot open '" << path << "' for writing\n";
    return 1;
  }
  f << text;
  return f.good() ? 0 : 1;
}

int emit_error(const std::string& output, const std::string& message,
               const std::string& pointer = "") {
  Json err{{"tool", tool_stamp()}, {"error", Json{{"message", message}}}};
  if (!pointer.empty()) err["error"]["pointer"] = pointer;
  write_text(output, err.dump(2) + "\n");
  std::cerr << kToolName << ": error";
  if (!pointer.empty()) std::cerr << " at " << pointer;
  std::cerr << ": " << message << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch driver for the involutive toolkit"};
  std::string input, output;
  Overrides ov;
  std::uint64_t seed = 0, gb_budget = 0;
  long max_degree = 0, max_depth = 0, samples = 0;
  double tolerance = 0;
  std::string strategy;
  app.add_option("-i,--input", input, "job file (JSON)")->required();
  app.add_option("-o,--output", output, "report path (default: stdout)");
  auto* fseed = app.add_option("--seed", seed, "override the job seed");
  auto* fdeg = app.add_option("--max-degree", max_degree, "override the closure degree cap");
  auto* fdep = app.add_option("--max-depth", max_depth, "override the bracket depth cap");
  auto* fbud = app.add_option("--gb-budget", gb_budget, "override the reduction budget");
  auto* fsam = app.add_option("--samples", samples, "override the sample count");
  auto* ftol = app.add_option("--tolerance", tolerance, "override the numeric tolerance");
  auto* fstr = app.add_option("--strategy", strategy, "override the probe strategy");
  CLI11_PARSE(app, argc, argv);
  if (*fseed) ov.seed = seed;
  if (*fdeg) ov.max_degree = max_degree;
  if (*fdep) ov.max_depth = max_depth;
  if (*fbud) ov.gb_budget = gb_budget;
  if (*fsam) ov.samples = samples;
  if (*ftol) ov.tolerance = tolerance;
  if (*fstr) ov.strategy = strategy;

  std::ifstream in(input, std::ios::binary);
  if (!in) return emit_error(output, "cannot open input file '" + input + "'");
  std::ostringstream buf;
  buf << in.rdbuf();

  Json job;
  try {
    job = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    return emit_error(output, e.what());
  }

  const auto started = std::chrono::steady_clock::now();
  std::string task;
  TaskOutput result;
  try {
    jb::expect_object(job, "");
    const long version = jb::expect_int(jb::expect_key(job, "", "version"), "/version");
    if (version != 1)
      throw JobError("/version", "unsupported job version " + std::to_string(version));
    task = jb::expect_string(jb::expect_key(job, "", "task"), "/task");
    if (task == "bracket-closure")
      result = run_bracket_closure(job, ov);
    else if (task == "dinfty")
      result = run_dinfty(job, ov);
    else if (task == "leaf")
      result = run_leaf(job, ov);
    else if (task == "groebner")
      result = run_groebner(job, ov);
    else if (task == "chain")
      result = run_chain(job, ov);
    else if (task == "projection-probe")
      result = run_projection_probe(job, ov);
    else if (task == "isometry-scan")
      result = run_isometry_scan(job, ov);
    else
      throw JobError("/task",
                     "unknown task '" + task +
                         "' (expected bracket-closure, dinfty, leaf, groebner, chain, "
                         "projection-probe or isometry-scan)");
  } catch (const JobError& e) {
    return emit_error(output, e.what(), e.pointer());
  } catch (const ParseError& e) {
    return emit_error(output, e.what());
  } catch (const std::exception& e) {
    return emit_error(output, e.what());
  }

  Json envelope{{"tool", tool_stamp()},
                {"task", task},
                {"config", result.config},
                {"report", result.report},
                {"work", result.work},
                {"truncated", result.truncated}};
  if (write_text(output, envelope.dump(2) + "\n") != 0) return 1;

  if (const Json* cj = jb::find(job, "csv")) {
    const std::string path = jb::expect_string(*cj, "/csv");
    if (!result.csv.empty() && write_text(path, result.csv) != 0) return 1;
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  std::cerr << kToolName << ": task '" << task << "' "
            << (result.truncated ? "completed with truncation" : "completed") << " in "
            << elapsed << " ms\n";
  return result.truncated ? 2 : 0;
}
