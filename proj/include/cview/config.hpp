#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cview/errors.hpp"
#include "cview/experiment.hpp"
#include "cview/lattice.hpp"
#include "cview/mvcontext.hpp"
#include "cview/reduce.hpp"
#include "cview/tree.hpp"
#include "cview/views.hpp"

namespace cview {

// ---------------------------------------------------------------------------
// Reduction plans

struct KMedoidsSelector {
  std::size_t k = 1;
  std::uint64_t seed = 0;
};
struct ExplicitObjects {
  std::vector<std::string> ids;
};
struct TopKImportance {
  std::size_t k = 1;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
};
struct ExplicitPredicates {
  std::vector<std::string> predicates;
};
enum class Composition { by_class, leq, geq };

struct ReductionPlan {
  std::optional<std::variant<KMedoidsSelector, ExplicitObjects>> objects;
  std::optional<std::variant<TopKImportance, ExplicitPredicates>> attributes;
  std::optional<Composition> composition;
  GradeMap aggregation;
  std::optional<std::size_t> min_support;
};

/// One reduced view; `name` is empty unless a composition split the view.
struct ReducedView {
  std::string name;
  ViewContext view;
};

/// Applies object selection, attribute selection, aggregation and
/// composition, in that order. `ctx` supplies labels and raw rows; `forest`
/// the importance scores.
inline std::vector<ReducedView> apply_plan(const ViewContext& view, const ManyValuedContext& ctx, const Forest& forest,
                                           const ReductionPlan& plan, std::vector<std::string>* warnings = nullptr) {
  ViewContext v = view;
  if (plan.objects) {
    std::vector<std::size_t> keep;
    if (auto* km = std::get_if<KMedoidsSelector>(&*plan.objects)) {
      // cluster the view's own objects
      std::vector<std::size_t> rows;
      for (const auto& id : v.formal().objects()) rows.push_back(ctx.require_object(id));
      const auto sub = ctx.select(rows);
      keep = kmedoids_select(sub, km->k, km->seed);
    } else {
      for (const auto& id : std::get<ExplicitObjects>(*plan.objects).ids) {
        auto g = v.formal().find_object(id);
        if (!g) throw NoSuchObject("no object '" + id + "' in the view");
        keep.push_back(*g);
      }
    }
    v = select_objects(v, keep);
  }
  if (plan.attributes) {
    if (auto* top = std::get_if<TopKImportance>(&*plan.attributes)) {
      if (top->k < 1) throw InvalidArgument("top_k must be at least 1");
      const auto scores = permutation_importance(forest, ctx, top->repeats, top->seed);
      v = select_attributes(v, scores, top->k, warnings);
    } else {
      std::vector<std::size_t> cols;
      for (const auto& text : std::get<ExplicitPredicates>(*plan.attributes).predicates) {
        auto j = v.find_predicate(parse_predicate(v.schema(), text));
        if (!j) throw UnknownAttribute("predicate '" + text + "' is not a column of the view");
        cols.push_back(*j);
      }
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      v = select_columns(v, cols);
    }
  }
  if (!plan.aggregation.empty()) v = aggregate_attributes(v, plan.aggregation);
  std::vector<ReducedView> out;
  if (!plan.composition) {
    out.push_back({"", std::move(v)});
  } else if (*plan.composition == Composition::by_class) {
    for (auto& [label, part] : partition_by_class(v, view_labels(v, ctx))) out.push_back({label, std::move(part)});
  } else {
    const auto dir = *plan.composition == Composition::leq ? Direction::leq : Direction::geq;
    out.push_back({direction_symbol(dir), ordinal_factor(v, dir)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration

/// A run configuration document (JSON). Relative paths are resolved against
/// the directory holding the document.
struct RunConfig {
  std::filesystem::path base_dir = ".";
  std::optional<std::string> data;
  std::optional<std::string> domain;
  std::optional<std::string> label;
  std::optional<std::string> model;
  TrainConfig train;
  ViewKind view = ViewKind::tree_predicate;
  std::string scale = "interordinal";
  std::vector<std::string> formulas;
  ReductionPlan plan;
  std::size_t cv_folds = 4;
  ExperimentGrid grid{{2, 4}, {3, 5, 7}, {0, 1, 2}, 4};
  std::map<std::string, std::string> outputs;  // context, lattice, dot, model, report

  std::string resolve(const std::string& p) const {
    std::filesystem::path q(p);
    return (q.is_absolute() ? q : base_dir / q).lexically_normal().string();
  }
  std::optional<std::string> output(const std::string& key) const {
    auto it = outputs.find(key);
    if (it == outputs.end()) return std::nullopt;
    return resolve(it->second);
  }
};

namespace detail {

template <typename T>
std::vector<T> int_list(const nlohmann::json& j, const char* what) {
  if (j.is_number_integer()) return {j.get<T>()};
  if (j.is_object() && j.contains("from") && j.contains("to")) {
    std::vector<T> out;
    const T step = j.value("step", T(1));
    if (step == 0) throw ParseError(std::string(what) + ": step must be positive");
    for (T x = j.at("from").get<T>(); x <= j.at("to").get<T>(); x += step) out.push_back(x);
    return out;
  }
  if (!j.is_array()) throw ParseError(std::string(what) + " must be a number, a list or {from, to}");
  return j.get<std::vector<T>>();
}

inline void read_train(const nlohmann::json& j, TrainConfig& t) {
  if (j.contains("n_trees")) t.n_trees = j["n_trees"].get<std::size_t>();
  if (j.contains("max_depth"))
    t.max_depth = j["max_depth"].is_null() ? std::nullopt : std::optional<std::size_t>(j["max_depth"].get<std::size_t>());
  if (j.contains("rng_seed")) t.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("bagging")) t.bagging = j["bagging"].get<bool>();
  if (j.contains("features_per_split"))
    t.features_per_split = j["features_per_split"].is_null()
                               ? std::nullopt
                               : std::optional<std::size_t>(j["features_per_split"].get<std::size_t>());
  if (t.n_trees < 1) throw ParseError("train.n_trees must be at least 1");
  if (t.max_depth && *t.max_depth < 1) throw ParseError("train.max_depth must be at least 1");
}

inline ReductionPlan read_plan(const nlohmann::json& j) {
  ReductionPlan p;
  if (j.contains("objects")) {
    const auto& o = j["objects"];
    if (o.contains("kmedoids")) {
      KMedoidsSelector s{o["kmedoids"].get<std::size_t>(), o.value("seed", std::uint64_t(0))};
      if (s.k < 1) throw ParseError("plan.objects.kmedoids must be at least 1");
      p.objects = s;
    } else if (o.contains("ids")) {
      p.objects = ExplicitObjects{o["ids"].get<std::vector<std::string>>()};
    } else {
      throw ParseError("plan.objects needs 'kmedoids' or 'ids'");
    }
  }
  if (j.contains("attributes")) {
    const auto& a = j["attributes"];
    if (a.contains("top_k")) {
      TopKImportance s{a["top_k"].get<std::size_t>(), a.value("repeats", std::size_t(5)), a.value("seed", std::uint64_t(0))};
      if (s.k < 1) throw ParseError("plan.attributes.top_k must be at least 1");
      p.attributes = s;
    } else if (a.contains("predicates")) {
      p.attributes = ExplicitPredicates{a["predicates"].get<std::vector<std::string>>()};
    } else {
      throw ParseError("plan.attributes needs 'top_k' or 'predicates'");
    }
  }
  if (j.contains("composition")) {
    const auto c = j["composition"].get<std::string>();
    if (c == "class" || c == "by-class") p.composition = Composition::by_class;
    else if (c == "leq" || c == "<=") p.composition = Composition::leq;
    else if (c == "geq" || c == ">=") p.composition = Composition::geq;
    else throw ParseError("unknown composition '" + c + "'");
  }
  if (j.contains("aggregate")) {
    for (const auto& [attr, g] : j["aggregate"].items()) {
      Grading gr;
      gr.grades = g.at("grades").get<std::vector<std::string>>();
      gr.grade_of = g.at("map").get<std::map<std::string, std::string>>();
      p.aggregation[attr] = std::move(gr);
    }
  }
  if (j.contains("min_support")) p.min_support = j["min_support"].get<std::size_t>();
  return p;
}

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  try {
    if (!j.is_object()) throw ParseError("configuration must be a JSON object");
    if (j.contains("data")) c.data = j["data"].get<std::string>();
    if (j.contains("domain")) c.domain = j["domain"].get<std::string>();
    if (j.contains("label")) c.label = j["label"].get<std::string>();
    if (j.contains("model")) c.model = j["model"].get<std::string>();
    if (j.contains("train")) detail::read_train(j["train"], c.train);
    if (j.contains("view")) c.view = parse_view_kind(j["view"].get<std::string>());
    if (j.contains("scale")) c.scale = j["scale"].get<std::string>();
    if (j.contains("formulas")) c.formulas = j["formulas"].get<std::vector<std::string>>();
    if (j.contains("plan")) c.plan = detail::read_plan(j["plan"]);
    if (j.contains("cv_folds")) c.cv_folds = j["cv_folds"].get<std::size_t>();
    if (c.cv_folds < 2) throw ParseError("cv_folds must be at least 2");
    if (j.contains("experiment")) {
      const auto& e = j["experiment"];
      if (e.contains("n_trees")) c.grid.n_trees = detail::int_list<std::size_t>(e["n_trees"], "experiment.n_trees");
      if (e.contains("max_depths")) c.grid.max_depths = detail::int_list<std::size_t>(e["max_depths"], "experiment.max_depths");
      if (e.contains("seeds")) c.grid.seeds = detail::int_list<std::uint64_t>(e["seeds"], "experiment.seeds");
      c.grid.folds = e.value("folds", c.cv_folds);
      if (c.grid.n_trees.empty() || c.grid.max_depths.empty() || c.grid.seeds.empty())
        throw ParseError("experiment ranges must be non-empty");
    } else {
      c.grid.folds = c.cv_folds;
    }
    if (j.contains("output")) c.outputs = j["output"].get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad configuration: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  const auto j = parse_json_text(read_text_file(path), path);
  return run_config_from_json(j, std::filesystem::path(path).parent_path());
}

/// Reads the data set a configuration points at.
inline ManyValuedContext load_config_data(const RunConfig& c) {
  if (!c.data) throw InvalidArgument("configuration names no data file");
  if (!c.domain) throw InvalidArgument("configuration names no domain file");
  auto spec = load_domain_spec(c.resolve(*c.domain));
  if (c.label) spec.label_column = *c.label;
  return load_csv(c.resolve(*c.data), spec);
}

}  // namespace cview
